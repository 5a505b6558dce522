#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "droplet/active_set.hpp"
#include "droplet/rng.hpp"
#include "droplet/spin_configuration.hpp"

namespace droplet {

enum class Variant { standard, connectivity_preserving, eager_flip };

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::standard: return "standard";
    case Variant::connectivity_preserving: return "connectivity_preserving";
    case Variant::eager_flip: return "eager_flip";
  }
  return "standard";
}

inline std::optional<Variant> parse_variant(std::string_view s) {
  if (s == "standard") return Variant::standard;
  if (s == "connectivity_preserving" || s == "connectivity") return Variant::connectivity_preserving;
  if (s == "eager_flip" || s == "eager") return Variant::eager_flip;
  return std::nullopt;
}

// Zero-temperature heat-bath dynamics for one or several configurations driven by the same
// clocks and coins. Only sites whose update can change some configuration are scheduled; the
// superposition of their rate-1 clocks is simulated directly, so every other update (a no-op
// under the majority rule) is skipped without changing the law.
class GlauberEngine {
 public:
  GlauberEngine(SpinConfiguration config, std::uint64_t seed, Variant variant = Variant::standard)
      : GlauberEngine(std::vector<SpinConfiguration>{std::move(config)}, seed, std::vector<Variant>{variant}) {}

  GlauberEngine(std::vector<SpinConfiguration> configs, std::uint64_t seed, std::vector<Variant> variants = {})
      : rng_(seed, 0) {
    if (configs.empty()) throw std::invalid_argument("GlauberEngine: no configuration");
    Box u = configs[0].bbox();
    for (const auto& c : configs) u = union_box(u, c.bbox());
    universe_ = u;
    for (std::size_t i = 0; i < configs.size(); ++i) {
      Slot s;
      s.config = configs[i].bbox() == u ? std::move(configs[i]) : configs[i].embedded(u);
      s.variant = i < variants.size() ? variants[i] : (variants.empty() ? Variant::standard : variants.back());
      if (s.config.empty()) s.emptied_at = 0.0;
      slots_.push_back(std::move(s));
    }
    const std::size_t n = slots_[0].config.storage_size();
    stride_ = slots_[0].config.stride();
    union_count_.assign(n, 0);
    union_.resize(n);
    for (auto& s : slots_) {
      s.active.assign(n, 0);
      for (std::size_t k = 0; k < n; ++k) refresh(s, k);
    }
  }

  static constexpr const char* generator_name() { return Philox4x32::name; }

  double clock() const { return clock_; }
  std::uint64_t events() const { return events_; }
  std::size_t size() const { return slots_.size(); }
  const Box& universe() const { return universe_; }
  const SpinConfiguration& config(std::size_t i = 0) const { return slots_.at(i).config; }
  Variant variant(std::size_t i = 0) const { return slots_.at(i).variant; }
  void set_variant(Variant v) {
    for (auto& s : slots_) s.variant = v;
  }
  void set_variant(std::size_t i, Variant v) { slots_.at(i).variant = v; }
  std::optional<double> emptied_at(std::size_t i = 0) const { return slots_.at(i).emptied_at; }
  std::size_t active_count() const { return union_.size(); }

  // No further update can change any configuration.
  bool absorbed() const { return union_.empty(); }

  // Executes the next update event if it happens no later than t_limit; otherwise advances the
  // clock to t_limit and returns false. The pending event time is kept, so the trajectory does
  // not depend on how the horizon is chopped into calls.
  bool next_event(double t_limit) {
    if (union_.empty()) {
      if (t_limit > clock_ && t_limit < std::numeric_limits<double>::infinity()) clock_ = t_limit;
      return false;
    }
    if (!pending_) {
      next_time_ = clock_ + rng_.exponential(static_cast<double>(union_.size()));
      pending_ = true;
    }
    if (next_time_ > t_limit) {
      clock_ = t_limit;
      return false;
    }
    clock_ = next_time_;
    pending_ = false;
    ++events_;
    const std::uint32_t k = union_[rng_.below(union_.size())];
    const bool coin_plus = rng_.coin();
    for (auto& s : slots_) update(s, k, coin_plus);
    return true;
  }

  void step_to(double t) {
    if (t < clock_) throw std::invalid_argument("step_to: time in the past");
    while (next_event(t)) {
    }
  }

  // Applies one update at a site with a given tie coin to every configuration (testing hook).
  void force_update(Site site, bool coin_plus) {
    if (!universe_.contains(site)) return;
    pending_ = false;
    const auto k = static_cast<std::uint32_t>(slots_[0].config.index(site));
    for (auto& s : slots_) update(s, k, coin_plus);
  }

 private:
  struct Slot {
    SpinConfiguration config;
    Variant variant = Variant::standard;
    std::vector<std::uint8_t> active;
    std::optional<double> emptied_at;
  };

  static Box union_box(const Box& a, const Box& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    const int x0 = std::min(a.x0, b.x0), y0 = std::min(a.y0, b.y0);
    const int x1 = std::max(a.x0 + a.width, b.x0 + b.width), y1 = std::max(a.y0 + a.height, b.y0 + b.height);
    return {x0, y0, x1 - x0, y1 - y0};
  }

  int minus_nb(const SpinConfiguration& c, std::size_t k) const {
    return c.minus_at(k + 1) + c.minus_at(k - 1) + c.minus_at(k + stride_) + c.minus_at(k - stride_);
  }

  bool compute_active(const SpinConfiguration& c, std::size_t k) const {
    if (!c.interior(k) || c.frozen_at(k) != 0) return false;
    const int m = minus_nb(c, k);
    return c.minus_at(k) ? m <= 2 : m >= 2;
  }

  void refresh(Slot& s, std::size_t k) {
    const bool a = compute_active(s.config, k);
    if (a == (s.active[k] != 0)) return;
    s.active[k] = a;
    if (a) {
      if (union_count_[k]++ == 0) union_.insert(static_cast<std::uint32_t>(k));
    } else {
      if (--union_count_[k] == 0) union_.erase(static_cast<std::uint32_t>(k));
    }
  }

  void flip(Slot& s, std::size_t k, bool to_minus) {
    s.config.set_index(k, to_minus);
    refresh(s, k);
    refresh(s, k + 1);
    refresh(s, k - 1);
    refresh(s, k + stride_);
    refresh(s, k - stride_);
  }

  void update(Slot& s, std::uint32_t k, bool coin_plus) {
    if (!s.active[k]) return;
    const int m = minus_nb(s.config, k);
    const bool to_minus = m > 2 ? true : (m < 2 ? false : !coin_plus);
    if (to_minus == s.config.minus_at(k)) return;
    if (!to_minus && s.variant == Variant::connectivity_preserving && splits(s.config, k)) return;
    flip(s, k, to_minus);
    if (!to_minus && s.variant == Variant::eager_flip) cascade(s, k);
    if (s.config.empty() && !s.emptied_at) s.emptied_at = clock_;
  }

  // Erases every '-' site with at least three '+' neighbours, repeatedly.
  void cascade(Slot& s, std::size_t start) {
    std::vector<std::size_t> stack{start + 1, start - 1, start + stride_, start - stride_};
    while (!stack.empty()) {
      const std::size_t w = stack.back();
      stack.pop_back();
      const SpinConfiguration& c = s.config;
      if (!c.interior(w) || !c.minus_at(w) || c.frozen_at(w) != 0 || minus_nb(c, w) > 1) continue;
      flip(s, w, false);
      stack.insert(stack.end(), {w + 1, w - 1, w + stride_, w - stride_});
    }
  }

  // Would turning the '-' site k to '+' disconnect its '-' neighbours (4-connectivity)?
  bool splits(const SpinConfiguration& c, std::size_t k) const {
    const std::size_t st = stride_;
    // Ring order: E, NE, N, NW, W, SW, S, SE.
    const std::size_t ring[8] = {k + 1, k + st + 1, k + st, k + st - 1, k - 1, k - st - 1, k - st, k - st + 1};
    int edge_nb = 0;
    for (int r = 0; r < 8; r += 2) edge_nb += c.minus_at(ring[r]);
    if (edge_nb <= 1) return false;
    // Count groups of edge neighbours joined through a '-' corner in the ring.
    int groups = 0;
    for (int r = 0; r < 8; r += 2) {
      if (!c.minus_at(ring[r])) continue;
      const int prev_corner = (r + 7) % 8, prev_edge = (r + 6) % 8;
      if (!(c.minus_at(ring[prev_corner]) && c.minus_at(ring[prev_edge]))) ++groups;
    }
    if (groups == 0) groups = 1;  // all four edges and corners: a single ring
    if (groups <= 1) return false;
    // Global check: breadth-first search from one neighbour avoiding k.
    std::vector<std::size_t> targets;
    for (int r = 0; r < 8; r += 2)
      if (c.minus_at(ring[r])) targets.push_back(ring[r]);
    std::vector<std::uint8_t> seen(c.storage_size(), 0);
    seen[k] = 1;
    std::vector<std::size_t> queue{targets[0]};
    seen[targets[0]] = 1;
    std::size_t found = 1;
    for (std::size_t head = 0; head < queue.size() && found < targets.size(); ++head) {
      const std::size_t u = queue[head];
      for (std::size_t v : {u + 1, u - 1, u + st, u - st}) {
        if (seen[v] || !c.minus_at(v)) continue;
        seen[v] = 1;
        queue.push_back(v);
        for (std::size_t t : targets)
          if (t == v) ++found;
      }
    }
    return found < targets.size();
  }

  std::vector<Slot> slots_;
  Box universe_;
  std::size_t stride_ = 0;
  std::vector<std::uint8_t> union_count_;
  ActiveSet union_;
  CounterStream rng_;
  double clock_ = 0.0;
  double next_time_ = 0.0;
  bool pending_ = false;
  std::uint64_t events_ = 0;
};

// First time the configuration becomes empty, at an exact event time.
inline double disappearance_time(GlauberEngine& engine, std::size_t which = 0) {
  if (engine.config(which).has_frozen_minus()) throw std::invalid_argument("non-absorbing configuration");
  while (!engine.emptied_at(which)) {
    if (!engine.next_event(std::numeric_limits<double>::infinity()))
      throw std::runtime_error("non-absorbing configuration");
  }
  return *engine.emptied_at(which);
}

inline double disappearance_time(const SpinConfiguration& config, std::uint64_t seed, Variant v = Variant::standard) {
  GlauberEngine e(config, seed, v);
  return disappearance_time(e);
}

// Boundary of the union of '-' cells as closed lattice polygons: outer loops counter-clockwise,
// holes clockwise. At a vertex touched by two diagonal cells the loops are kept apart, matching
// 4-connectivity of cells.
inline std::vector<Polyline> boundary_loops(const SpinConfiguration& c) {
  struct Edge {
    int x0, y0, dx, dy;
  };
  std::map<std::pair<int, int>, std::vector<std::size_t>> out_edges;
  std::vector<Edge> edges;
  for (Site s : c.minus_sites()) {
    auto add = [&](int x0, int y0, int dx, int dy) {
      out_edges[{x0, y0}].push_back(edges.size());
      edges.push_back({x0, y0, dx, dy});
    };
    if (!c.is_minus({s.i, s.j - 1})) add(s.i, s.j, 1, 0);
    if (!c.is_minus({s.i + 1, s.j})) add(s.i + 1, s.j, 0, 1);
    if (!c.is_minus({s.i, s.j + 1})) add(s.i + 1, s.j + 1, -1, 0);
    if (!c.is_minus({s.i - 1, s.j})) add(s.i, s.j + 1, 0, -1);
  }
  std::vector<std::uint8_t> used(edges.size(), 0);
  std::vector<Polyline> loops;
  for (std::size_t e0 = 0; e0 < edges.size(); ++e0) {
    if (used[e0]) continue;
    Polyline loop;
    std::size_t e = e0;
    while (!used[e]) {
      used[e] = 1;
      const Edge& ed = edges[e];
      const int x1 = ed.x0 + ed.dx, y1 = ed.y0 + ed.dy;
      // Merge straight runs.
      if (loop.size() >= 2) {
        const Point a = loop[loop.size() - 2], b = loop.back();
        if (std::abs(cross(b - a, Point{static_cast<double>(ed.dx), static_cast<double>(ed.dy)})) < 0.5 &&
            dot(b - a, Point{static_cast<double>(ed.dx), static_cast<double>(ed.dy)}) > 0)
          loop.pop_back();
      }
      if (loop.empty()) loop.push_back({static_cast<double>(ed.x0), static_cast<double>(ed.y0)});
      loop.push_back({static_cast<double>(x1), static_cast<double>(y1)});
      const auto& cand = out_edges[{x1, y1}];
      std::size_t next = cand[0];
      if (cand.size() > 1) {
        // Saddle vertex: turn left.
        const int lx = -ed.dy, ly = ed.dx;
        for (std::size_t c2 : cand)
          if (edges[c2].dx == lx && edges[c2].dy == ly) next = c2;
      }
      e = next;
    }
    // Closing point duplicates the first; also merge across the seam.
    loop.pop_back();
    if (loop.size() >= 3) {
      auto collinear = [](Point a, Point b, Point c2) { return std::abs(cross(b - a, c2 - b)) < 0.5; };
      if (collinear(loop.back(), loop.front(), loop[1])) loop.erase(loop.begin());
      if (collinear(loop[loop.size() - 2], loop.back(), loop.front())) loop.pop_back();
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

struct DropletSnapshot {
  double time = 0.0;
  SpinConfiguration minus_cells;
  std::vector<Polyline> boundary;
};

inline DropletSnapshot snapshot(const GlauberEngine& e, std::size_t which = 0) {
  return {e.clock(), e.config(which), boundary_loops(e.config(which))};
}

// Coupled runs of several initial configurations sampled at the given (lattice) times.
inline std::vector<std::vector<DropletSnapshot>> couple(std::uint64_t seed, std::vector<SpinConfiguration> configs,
                                                        const std::vector<double>& times,
                                                        std::vector<Variant> variants = {}) {
  GlauberEngine e(std::move(configs), seed, std::move(variants));
  std::vector<std::vector<DropletSnapshot>> out(e.size());
  for (double t : times) {
    e.step_to(t);
    for (std::size_t i = 0; i < e.size(); ++i) out[i].push_back(snapshot(e, i));
  }
  return out;
}

}  // namespace droplet
