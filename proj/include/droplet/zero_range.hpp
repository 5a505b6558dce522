#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "droplet/active_set.hpp"
#include "droplet/rng.hpp"

namespace droplet {

// Heights h_x for x = left .. left + n - 1; the two end values never move.
struct ZeroRangeState {
  int left = 0;
  std::vector<std::int64_t> h;

  int right() const { return left + static_cast<int>(h.size()) - 1; }
  std::int64_t height(int x) const { return h[x - left]; }
  std::int64_t& height(int x) { return h[x - left]; }

  // eta_x = h_{x+1} - h_x for x = left .. right - 1.
  std::vector<std::int64_t> gradients() const {
    std::vector<std::int64_t> eta(h.size() - 1);
    for (std::size_t i = 0; i + 1 < h.size(); ++i) eta[i] = h[i + 1] - h[i];
    return eta;
  }

  friend bool operator==(const ZeroRangeState&, const ZeroRangeState&) = default;
};

// Two-species particle picture of the gradients: A particles where eta > 0, B where eta < 0.
struct ParticleView {
  std::vector<std::int64_t> eta;
  std::int64_t a_count = 0;
  std::int64_t b_count = 0;
  int sign_changes = 0;
};

inline ParticleView particle_view(const ZeroRangeState& s) {
  ParticleView v;
  v.eta = s.gradients();
  int last = 0;
  for (auto e : v.eta) {
    if (e > 0) v.a_count += e;
    if (e < 0) v.b_count -= e;
    const int sg = (e > 0) - (e < 0);
    if (sg != 0) {
      if (last != 0 && sg != last) ++v.sign_changes;
      last = sg;
    }
  }
  return v;
}

inline std::int64_t floor_i64(double v) {
  return static_cast<std::int64_t>(std::floor(v + 1e-9 * std::max(1.0, std::abs(v))));
}

// h_x = floor(L phi(x / L)) on {-L, ..., L+1} with zero boundary values.
inline ZeroRangeState zr_initial(const std::function<double(double)>& phi, int L) {
  ZeroRangeState s;
  s.left = -L;
  s.h.assign(2 * L + 2, 0);
  for (int x = -L + 1; x <= L; ++x) s.height(x) = floor_i64(L * phi(static_cast<double>(x) / L));
  return s;
}

// Independent signed geometric gradients with mean L (phi((x+1)/L) - phi(x/L)), phi = 0 outside
// [-1, 1]; heights are partial sums from h_{-L} = 0, so the right end is random.
inline ZeroRangeState zr_geometric_initial(const std::function<double(double)>& phi, int L, std::uint64_t seed) {
  auto f = [&](double u) { return std::abs(u) > 1.0 ? 0.0 : phi(u); };
  CounterStream rng(seed, 2);
  ZeroRangeState s;
  s.left = -L;
  s.h.assign(2 * L + 2, 0);
  for (int x = -L; x <= L; ++x) {
    const double m = L * (f(static_cast<double>(x + 1) / L) - f(static_cast<double>(x) / L));
    const std::int64_t g = rng.geometric(std::abs(m));
    s.height(x + 1) = s.height(x) + (m >= 0 ? g : -g);
  }
  return s;
}

enum class Annihilation { same_site, adjacent };
enum class Side : int { left = 0, right = 1 };

inline int sgn(std::int64_t v) { return (v > 0) - (v < 0); }

// Lowers strict local maxima to the higher neighbour, starting near x, until none is left.
// Returns the columns that moved.
inline std::vector<int> lower_strict_peaks(ZeroRangeState& s, int x) {
  std::vector<int> moved;
  std::vector<int> work{x - 1, x, x + 1};
  while (!work.empty()) {
    const int y = work.back();
    work.pop_back();
    if (y <= s.left || y >= s.right()) continue;
    const auto hl = s.height(y - 1), hr = s.height(y + 1);
    if (s.height(y) > hl && s.height(y) > hr) {
      s.height(y) = std::max(hl, hr);
      moved.push_back(y);
      work.push_back(y - 1);
      work.push_back(y + 1);
    }
  }
  return moved;
}

// Ring of the (x, side) clock: h_x moves one step towards its neighbour on that side.
inline bool zr_apply_clock(ZeroRangeState& s, int x, Side side, Annihilation rule = Annihilation::same_site) {
  if (x <= s.left || x >= s.right()) return false;
  const int nb = side == Side::left ? x - 1 : x + 1;
  const int d = sgn(s.height(nb) - s.height(x));
  if (d == 0) return false;
  s.height(x) += d;
  if (rule == Annihilation::adjacent) lower_strict_peaks(s, x);
  return true;
}

// All A particles lie to the left of all B particles.
inline bool species_ordered(const ZeroRangeState& s) {
  bool seen_b = false;
  for (auto e : s.gradients()) {
    if (e < 0) seen_b = true;
    if (e > 0 && seen_b) return false;
  }
  return true;
}

// Leftmost interior column of maximal height.
inline int leftmost_max_column(const ZeroRangeState& s) {
  if (s.h.size() < 3) throw std::invalid_argument("leftmost_max_column: no interior column");
  int best = s.left + 1;
  for (int x = s.left + 1; x < s.right(); ++x)
    if (s.height(x) > s.height(best)) best = x;
  return best;
}

inline ZeroRangeState remove_column(const ZeroRangeState& s, int x) {
  ZeroRangeState r = s;
  r.h.erase(r.h.begin() + (x - s.left));
  return r;
}

// Continuous-time dynamics of one or several height functions driven by shared clocks:
// every interior site carries a left and a right clock of rate 1/2.
class ZeroRangeEngine {
 public:
  ZeroRangeEngine(std::vector<ZeroRangeState> states, std::uint64_t seed, Annihilation rule = Annihilation::same_site)
      : states_(std::move(states)), rule_(rule), rng_(seed, 3) {
    if (states_.empty()) throw std::invalid_argument("ZeroRangeEngine: no state");
    for (const auto& s : states_)
      if (s.left != states_[0].left || s.h.size() != states_[0].h.size() || s.h.size() < 2)
        throw std::invalid_argument("ZeroRangeEngine: states must share one lattice");
    if (rule_ == Annihilation::adjacent) {
      for (auto& s : states_) {
        if (!species_ordered(s)) throw std::invalid_argument("mixed species ordering");
        for (int x = s.left + 1; x < s.right(); ++x) lower_strict_peaks(s, x);
      }
    }
    active_.resize(2 * states_[0].h.size());
    for (int x = left() + 1; x < right(); ++x) refresh(x);
  }

  ZeroRangeEngine(ZeroRangeState state, std::uint64_t seed, Annihilation rule = Annihilation::same_site)
      : ZeroRangeEngine(std::vector<ZeroRangeState>{std::move(state)}, seed, rule) {}

  double clock() const { return clock_; }
  std::uint64_t events() const { return events_; }
  std::size_t size() const { return states_.size(); }
  const ZeroRangeState& state(std::size_t i = 0) const { return states_.at(i); }
  Annihilation rule() const { return rule_; }

  struct Event {
    double time;
    int x;
    Side side;
  };
  std::optional<Event> last_event() const { return last_; }

  bool next_event(double t_limit) {
    if (active_.empty()) {
      if (t_limit < std::numeric_limits<double>::infinity()) clock_ = std::max(clock_, t_limit);
      return false;
    }
    if (!pending_) {
      next_time_ = clock_ + rng_.exponential(0.5 * static_cast<double>(active_.size()));
      pending_ = true;
    }
    if (next_time_ > t_limit) {
      clock_ = t_limit;
      return false;
    }
    clock_ = next_time_;
    pending_ = false;
    ++events_;
    const std::uint32_t id = active_[rng_.below(active_.size())];
    const int x = left() + static_cast<int>(id / 2);
    const Side side = static_cast<Side>(id % 2);
    last_ = Event{clock_, x, side};
    int lo = x, hi = x;
    for (auto& s : states_) step_one(s, x, side, lo, hi);
    for (int y = std::max(lo - 1, left() + 1); y <= std::min(hi + 1, right() - 1); ++y) refresh(y);
    return true;
  }

  void step_to(double t) {
    while (next_event(t)) {
    }
  }

 private:
  int left() const { return states_[0].left; }
  int right() const { return states_[0].right(); }

  bool step_one(ZeroRangeState& s, int x, Side side, int& lo, int& hi) {
    const int nb = side == Side::left ? x - 1 : x + 1;
    const int d = sgn(s.height(nb) - s.height(x));
    if (d == 0) return false;
    s.height(x) += d;
    if (rule_ == Annihilation::adjacent)
      for (int y : lower_strict_peaks(s, x)) {
        lo = std::min(lo, y);
        hi = std::max(hi, y);
      }
    return true;
  }

  void refresh(int x) {
    bool l = false, r = false;
    for (const auto& s : states_) {
      l = l || s.height(x - 1) != s.height(x);
      r = r || s.height(x + 1) != s.height(x);
    }
    const auto base = static_cast<std::uint32_t>(2 * (x - left()));
    active_.set(base, l);
    active_.set(base + 1, r);
  }

  std::vector<ZeroRangeState> states_;
  Annihilation rule_;
  CounterStream rng_;
  ActiveSet active_;
  double clock_ = 0.0;
  double next_time_ = 0.0;
  bool pending_ = false;
  std::uint64_t events_ = 0;
  std::optional<Event> last_;
};

inline ZeroRangeState zr_run(const ZeroRangeState& s, double t, std::uint64_t seed) {
  ZeroRangeEngine e(s, seed);
  e.step_to(t);
  return e.state();
}

inline ZeroRangeState zr_variant_annihilate_adjacent(const ZeroRangeState& s, double t, std::uint64_t seed) {
  ZeroRangeEngine e(s, seed, Annihilation::adjacent);
  e.step_to(t);
  return e.state();
}

struct CoupledZeroRange {
  std::vector<double> times;
  std::vector<std::vector<ZeroRangeState>> states;  // [state][sample]
  bool ordered = false;  // input was pointwise ordered (h or gradients), so ordering was checked
  int violations = 0;
};

// Shared-clock runs of several states; when the inputs are ordered (by height or by gradient),
// that order is checked at every sample time.
inline CoupledZeroRange zr_couple(std::vector<ZeroRangeState> states, const std::vector<double>& times,
                                  std::uint64_t seed) {
  auto h_ge = [](const ZeroRangeState& a, const ZeroRangeState& b) {
    for (std::size_t i = 0; i < a.h.size(); ++i)
      if (a.h[i] < b.h[i]) return false;
    return true;
  };
  auto eta_ge = [](const ZeroRangeState& a, const ZeroRangeState& b) {
    const auto ea = a.gradients(), eb = b.gradients();
    for (std::size_t i = 0; i < ea.size(); ++i)
      if (ea[i] < eb[i]) return false;
    return true;
  };
  auto chain = [&](auto rel) {
    for (std::size_t i = 0; i + 1 < states.size(); ++i)
      if (!rel(states[i], states[i + 1])) return false;
    return true;
  };
  const bool by_h = chain(h_ge), by_eta = chain(eta_ge);
  ZeroRangeEngine e(states, seed);
  CoupledZeroRange out;
  out.times = times;
  out.ordered = by_h || by_eta;
  out.states.resize(states.size());
  for (double t : times) {
    e.step_to(t);
    for (std::size_t i = 0; i < e.size(); ++i) out.states[i].push_back(e.state(i));
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
      if (by_h && !h_ge(e.state(i), e.state(i + 1))) ++out.violations;
      if (by_eta && !eta_ge(e.state(i), e.state(i + 1))) ++out.violations;
    }
  }
  return out;
}

}  // namespace droplet
