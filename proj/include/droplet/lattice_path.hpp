#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "droplet/active_set.hpp"
#include "droplet/rng.hpp"

namespace droplet {

// Nearest-neighbour path h_0..h_{M+N} with h_0 = 0, unit steps, M up-steps and N down-steps.
struct LatticePath {
  std::vector<int> h;

  int length() const { return static_cast<int>(h.size()) - 1; }
  int ups() const { return (length() + h.back() - h.front()) / 2; }
  int downs() const { return (length() - h.back() + h.front()) / 2; }
  bool is_corner(int x) const { return x > 0 && x < length() && h[x - 1] == h[x + 1]; }

  bool valid() const {
    if (h.empty() || h.front() != 0) return false;
    for (std::size_t x = 0; x + 1 < h.size(); ++x)
      if (std::abs(h[x + 1] - h[x]) != 1) return false;
    return true;
  }

  friend bool operator==(const LatticePath&, const LatticePath&) = default;
};

inline int floor_int(double v) { return static_cast<int>(std::floor(v + 1e-9 * std::max(1.0, std::abs(v)))); }

// Parity-corrected discretisation of a 1-Lipschitz profile with phi(0) = 0 on [0, 1].
inline LatticePath path_from_profile(const std::function<double(double)>& phi, int L) {
  if (L < 1) throw std::invalid_argument("path_from_profile: L must be >= 1");
  LatticePath p;
  p.h.resize(L + 1);
  for (int x = 0; x <= L; ++x) {
    const double v = L * phi(static_cast<double>(x) / L);
    p.h[x] = x % 2 == 0 ? 2 * floor_int(v / 2.0) : 2 * floor_int((v - 1.0) / 2.0) + 1;
  }
  if (!p.valid()) throw std::invalid_argument("path_from_profile: profile is not 1-Lipschitz on the grid");
  return p;
}

// Particle at x iff h_{x+1} - h_x = +1.
inline std::vector<std::uint8_t> ssep_view(const LatticePath& p) {
  std::vector<std::uint8_t> eta(p.length());
  for (int x = 0; x < p.length(); ++x) eta[x] = p.h[x + 1] - p.h[x] == 1 ? 1 : 0;
  return eta;
}

inline LatticePath path_from_occupancy(const std::vector<std::uint8_t>& eta) {
  LatticePath p;
  p.h.resize(eta.size() + 1, 0);
  for (std::size_t x = 0; x < eta.size(); ++x) p.h[x + 1] = p.h[x] + (eta[x] ? 1 : -1);
  return p;
}

// Corner-flip dynamics: every corner flips at rate 1/2.
class CornerFlipEngine {
 public:
  CornerFlipEngine(LatticePath path, std::uint64_t seed) : path_(std::move(path)), rng_(seed, 1) {
    if (!path_.valid()) throw std::invalid_argument("CornerFlipEngine: invalid path");
    corners_.resize(path_.h.size());
    for (int x = 1; x < path_.length(); ++x) corners_.set(x, path_.is_corner(x));
  }

  const LatticePath& path() const { return path_; }
  double clock() const { return clock_; }
  std::uint64_t events() const { return events_; }

  bool next_event(double t_limit) {
    if (corners_.empty()) {
      if (t_limit < std::numeric_limits<double>::infinity()) clock_ = std::max(clock_, t_limit);
      return false;
    }
    if (!pending_) {
      next_time_ = clock_ + rng_.exponential(0.5 * static_cast<double>(corners_.size()));
      pending_ = true;
    }
    if (next_time_ > t_limit) {
      clock_ = t_limit;
      return false;
    }
    clock_ = next_time_;
    pending_ = false;
    ++events_;
    const int x = static_cast<int>(corners_[rng_.below(corners_.size())]);
    path_.h[x] = 2 * path_.h[x - 1] - path_.h[x];
    for (int y = x - 1; y <= x + 1; ++y)
      if (y > 0 && y < path_.length()) corners_.set(y, path_.is_corner(y));
    return true;
  }

  void step_to(double t) {
    while (next_event(t)) {
    }
  }

 private:
  LatticePath path_;
  CounterStream rng_;
  ActiveSet corners_;
  double clock_ = 0.0;
  double next_time_ = 0.0;
  bool pending_ = false;
  std::uint64_t events_ = 0;
};

inline LatticePath corner_flip_run(const LatticePath& path, double t, std::uint64_t seed) {
  CornerFlipEngine e(path, seed);
  e.step_to(t);
  return e.path();
}

// F_k(h) = sum_x sin(pi k x / L) [h_x - (h_L - h_0) x / L]; an eigenfunction of the generator
// with eigenvalue -lambda_k / 2, lambda_k = 2 - 2 cos(pi k / L).
inline double spectral_coefficient(const std::vector<double>& h, int k) {
  const int L = static_cast<int>(h.size()) - 1;
  const double slope = (h[L] - h[0]) / L;
  double s = 0.0;
  for (int x = 0; x <= L; ++x) s += std::sin(std::numbers::pi * k * x / L) * (h[x] - slope * x);
  return s;
}

inline double spectral_coefficient(const LatticePath& p, int k) {
  return spectral_coefficient(std::vector<double>(p.h.begin(), p.h.end()), k);
}

inline double corner_flip_eigenvalue(int k, int L) { return 2.0 - 2.0 * std::cos(std::numbers::pi * k / L); }

// H^k = sum_x [h_x - Phi_x] sin(k pi x / L) for a path and a reference profile on the same grid.
inline double mode_deviation(const LatticePath& p, const std::vector<double>& phi, int k) {
  const int L = p.length();
  double s = 0.0;
  for (int x = 0; x <= L; ++x) s += (p.h[x] - phi[x]) * std::sin(k * std::numbers::pi * x / L);
  return s;
}

}  // namespace droplet
