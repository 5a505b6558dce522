#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "droplet/geometry.hpp"

namespace droplet {

// Site (i, j) of the dual lattice sits at (i + 1/2, j + 1/2); its cell is [i, i+1] x [j, j+1].
struct Site {
  int i = 0;
  int j = 0;
  auto operator<=>(const Site&) const = default;
};

inline Point center(Site s) { return {s.i + 0.5, s.j + 0.5}; }

struct Box {
  int x0 = 0;
  int y0 = 0;
  int width = 0;
  int height = 0;

  bool empty() const { return width <= 0 || height <= 0; }
  bool contains(Site s) const { return s.i >= x0 && s.i < x0 + width && s.j >= y0 && s.j < y0 + height; }
  bool contains(const Box& b) const {
    return b.empty() || (b.x0 >= x0 && b.y0 >= y0 && b.x0 + b.width <= x0 + width && b.y0 + b.height <= y0 + height);
  }
  friend bool operator==(const Box&, const Box&) = default;
};

enum class Spin : std::int8_t { minus = -1, plus = 1 };

// The "-" sites inside a bounding box; everything outside the box is "+" for good.
// Storage carries a one-site "+" ring so neighbour lookups never leave the array.
class SpinConfiguration {
 public:
  SpinConfiguration() = default;
  explicit SpinConfiguration(Box box) : box_(box) {
    if (box.empty()) box_ = Box{};
    stride_ = box_.width + 2;
    cells_.assign(static_cast<std::size_t>(stride_) * (box_.height + 2), 0);
    frozen_.assign(cells_.size(), 0);
  }

  static SpinConfiguration from_sites(std::span<const Site> minus) {
    if (minus.empty()) return SpinConfiguration{};
    int xmin = minus[0].i, xmax = xmin, ymin = minus[0].j, ymax = ymin;
    for (Site s : minus) {
      xmin = std::min(xmin, s.i);
      xmax = std::max(xmax, s.i);
      ymin = std::min(ymin, s.j);
      ymax = std::max(ymax, s.j);
    }
    SpinConfiguration c(Box{xmin, ymin, xmax - xmin + 1, ymax - ymin + 1});
    for (Site s : minus) c.set_minus(s, true);
    return c;
  }

  const Box& bbox() const { return box_; }
  std::size_t minus_count() const { return minus_count_; }
  bool empty() const { return minus_count_ == 0; }

  bool is_minus(Site s) const { return box_.contains(s) && cells_[index(s)] != 0; }
  Spin spin(Site s) const { return is_minus(s) ? Spin::minus : Spin::plus; }

  void set_minus(Site s, bool minus) {
    if (!box_.contains(s)) {
      if (!minus) return;
      throw std::out_of_range("set_minus: site outside bounding box");
    }
    set_index(index(s), minus);
  }

  std::vector<Site> minus_sites() const {
    std::vector<Site> out;
    out.reserve(minus_count_);
    for (int j = 0; j < box_.height; ++j)
      for (int i = 0; i < box_.width; ++i)
        if (cells_[raw(i, j)]) out.push_back({box_.x0 + i, box_.y0 + j});
    return out;
  }

  int minus_neighbors(Site s) const {
    return is_minus({s.i + 1, s.j}) + is_minus({s.i - 1, s.j}) + is_minus({s.i, s.j + 1}) + is_minus({s.i, s.j - 1});
  }

  // Frozen sites keep their value and are never updated.
  void freeze(std::span<const Site> sites, Spin value) {
    for (Site s : sites) {
      if (!box_.contains(s)) {
        if (value == Spin::minus) throw std::out_of_range("freeze: '-' site outside bounding box");
        continue;  // outside the box a site is '+' forever already
      }
      const std::size_t k = index(s);
      frozen_[k] = value == Spin::minus ? -1 : 1;
      set_index(k, value == Spin::minus);
    }
  }

  std::optional<Spin> frozen(Site s) const {
    if (!box_.contains(s)) return std::nullopt;
    const auto f = frozen_[index(s)];
    if (f == 0) return std::nullopt;
    return f < 0 ? Spin::minus : Spin::plus;
  }

  bool has_frozen_minus() const {
    return std::any_of(frozen_.begin(), frozen_.end(), [](std::int8_t f) { return f < 0; });
  }

  // Same configuration re-indexed into a larger box.
  SpinConfiguration embedded(Box universe) const {
    if (!universe.contains(box_)) throw std::invalid_argument("embedded: universe does not contain bbox");
    SpinConfiguration c(universe);
    for (int j = 0; j < box_.height; ++j)
      for (int i = 0; i < box_.width; ++i) {
        const std::size_t from = raw(i, j);
        const std::size_t to = c.index({box_.x0 + i, box_.y0 + j});
        c.frozen_[to] = frozen_[from];
        c.set_index(to, cells_[from] != 0);
      }
    return c;
  }

  SpinConfiguration translated(int di, int dj) const {
    SpinConfiguration c = *this;
    c.box_.x0 += di;
    c.box_.y0 += dj;
    return c;
  }

  bool same_minus_set(const SpinConfiguration& o) const {
    if (minus_count_ != o.minus_count_) return false;
    for (Site s : minus_sites())
      if (!o.is_minus(s)) return false;
    return true;
  }

  // Every '-' site of *this is '-' in o.
  bool subset_of(const SpinConfiguration& o) const {
    for (int j = 0; j < box_.height; ++j)
      for (int i = 0; i < box_.width; ++i)
        if (cells_[raw(i, j)] && !o.is_minus({box_.x0 + i, box_.y0 + j})) return false;
    return true;
  }

  // Raw padded-array access for engines.
  int stride() const { return stride_; }
  std::size_t storage_size() const { return cells_.size(); }
  std::size_t index(Site s) const { return raw(s.i - box_.x0, s.j - box_.y0); }
  Site site_of(std::size_t k) const {
    const int r = static_cast<int>(k / stride_), c = static_cast<int>(k % stride_);
    return {box_.x0 + c - 1, box_.y0 + r - 1};
  }
  bool interior(std::size_t k) const {
    const int r = static_cast<int>(k / stride_), c = static_cast<int>(k % stride_);
    return r >= 1 && r <= box_.height && c >= 1 && c <= box_.width;
  }
  bool minus_at(std::size_t k) const { return cells_[k] != 0; }
  std::int8_t frozen_at(std::size_t k) const { return frozen_[k]; }
  void set_index(std::size_t k, bool minus) {
    const bool was = cells_[k] != 0;
    if (was == minus) return;
    cells_[k] = minus ? 1 : 0;
    if (minus)
      ++minus_count_;
    else
      --minus_count_;
  }

 private:
  std::size_t raw(int i, int j) const { return static_cast<std::size_t>(j + 1) * stride_ + (i + 1); }

  Box box_{};
  int stride_ = 2;
  std::vector<std::uint8_t> cells_ = std::vector<std::uint8_t>(4, 0);
  std::vector<std::int8_t> frozen_ = std::vector<std::int8_t>(4, 0);
  std::size_t minus_count_ = 0;
};

}  // namespace droplet
