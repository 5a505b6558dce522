#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/numeric/odeint.hpp>

namespace droplet {

inline double sigma(double u) { return u / (1.0 + std::abs(u)); }
inline double sigma_prime(double u) { return 1.0 / ((1.0 + std::abs(u)) * (1.0 + std::abs(u))); }

// Real values on the integer lattice {left, ..., left + n}; the two end entries are Dirichlet data.
struct Grid1D {
  int left = 0;
  std::vector<double> values;

  int right() const { return left + static_cast<int>(values.size()) - 1; }
  int intervals() const { return static_cast<int>(values.size()) - 1; }
  double at(int x) const { return values[x - left]; }
  double& at(int x) { return values[x - left]; }
  double left_value() const { return values.front(); }
  double right_value() const { return values.back(); }

  // q_x = Phi(x+1) - Phi(x).
  std::vector<double> gradient() const {
    std::vector<double> q(values.size() - 1);
    for (std::size_t i = 0; i + 1 < values.size(); ++i) q[i] = values[i + 1] - values[i];
    return q;
  }
};

enum class GridMapping {
  // x -> x / L on {-L, ..., L+1}, with the value at L+1 set to zero.
  lattice,
  // x -> (x - 1/2) / (L + 1/2) on {-L, ..., L+1}, so both ends land on -1 and 1.
  centered,
};

// Phi_0(x) = L phi(u(x)) for a profile phi on [-1, 1] with phi(+-1) = 0.
inline Grid1D profile_grid(const std::function<double(double)>& phi, int L, GridMapping mapping = GridMapping::lattice) {
  Grid1D g{-L, std::vector<double>(2 * L + 2, 0.0)};
  for (int x = -L; x <= L + 1; ++x) {
    if (mapping == GridMapping::lattice)
      g.at(x) = (x == L + 1) ? 0.0 : L * phi(static_cast<double>(x) / L);
    else
      g.at(x) = L * phi((x - 0.5) / (L + 0.5));
  }
  g.at(-L) = 0.0;
  g.at(L + 1) = 0.0;
  return g;
}

namespace detail {
// sin(pi m / n) for m = 0 .. 2n-1.
inline std::vector<double> sine_table(int n) {
  std::vector<double> t(2 * n);
  for (int m = 0; m < 2 * n; ++m) t[m] = std::sin(std::numbers::pi * m / n);
  return t;
}
}  // namespace detail

// Type-I sine transform: c_k = sum_{j=1}^{n-1} g_j sin(pi k j / n), k = 1 .. n-1. Inputs and
// outputs are indexed 0 .. n-2 for j, k = 1 .. n-1.
inline std::vector<double> sine_transform(const std::vector<double>& g) {
  const int n = static_cast<int>(g.size()) + 1;
  const auto tab = detail::sine_table(n);
  std::vector<double> c(g.size(), 0.0);
  for (int k = 1; k < n; ++k) {
    double s = 0.0;
    for (int j = 1; j < n; ++j) s += g[j - 1] * tab[(static_cast<long>(k) * j) % (2 * n)];
    c[k - 1] = s;
  }
  return c;
}

inline std::vector<double> inverse_sine_transform(const std::vector<double>& c) {
  const int n = static_cast<int>(c.size()) + 1;
  auto g = sine_transform(c);
  for (double& v : g) v *= 2.0 / n;
  return g;
}

// Eigenvalue of minus the discrete Dirichlet Laplacian on n intervals.
inline double laplacian_eigenvalue(int k, int n) { return 2.0 - 2.0 * std::cos(std::numbers::pi * k / n); }

// d/dt Phi = D * (Phi(x+1) + Phi(x-1) - 2 Phi(x)) with fixed ends, solved exactly in the sine basis.
inline Grid1D heat_solve_discrete(const Grid1D& phi0, double t, double diffusivity = 0.5) {
  const int n = phi0.intervals();
  Grid1D out = phi0;
  if (n < 2) return out;
  const double a = phi0.left_value(), b = phi0.right_value();
  std::vector<double> g(n - 1);
  for (int j = 1; j < n; ++j) g[j - 1] = phi0.values[j] - (a + (b - a) * j / n);
  auto c = sine_transform(g);
  for (int k = 1; k < n; ++k) c[k - 1] *= std::exp(-diffusivity * laplacian_eigenvalue(k, n) * t);
  const auto r = inverse_sine_transform(c);
  for (int j = 1; j < n; ++j) out.values[j] = a + (b - a) * j / n + r[j - 1];
  return out;
}

// Fourier sine series of d/dt phi = D phi'' on [a, b] with fixed boundary values.
class HeatSeries {
 public:
  HeatSeries(const std::function<double(double)>& phi0, double a, double b, double left, double right, int terms = 4096,
             double diffusivity = 0.5)
      : a_(a), b_(b), left_(left), right_(right), D_(diffusivity) {
    const double tol = 1e-9 * (1.0 + std::max(std::abs(left), std::abs(right)));
    if (std::abs(phi0(a) - left) > tol || std::abs(phi0(b) - right) > tol)
      throw std::invalid_argument("incompatible boundary");
    const double ell = b - a;
    // Sine coefficients of the piecewise-linear interpolant on grids of nq and 2 nq cells, combined
    // by Richardson extrapolation: exact for kinks on grid nodes, O(dx^4) for smooth data.
    auto interpolant_coefficients = [&](int nq) {
      const double dx = ell / nq;
      std::vector<double> g(nq - 1);
      for (int j = 1; j < nq; ++j) {
        const double x = a + j * dx;
        g[j - 1] = phi0(x) - linear(x);
        sup_ = std::max(sup_, std::abs(g[j - 1]));
      }
      const auto tab = detail::sine_table(nq);
      std::vector<double> c(terms);
      for (int k = 1; k <= terms; ++k) {
        double s = 0.0;
        for (int j = 1; j < nq; ++j) s += g[j - 1] * tab[(static_cast<long>(k) * j) % (2 * nq)];
        const double w = k * std::numbers::pi / ell;
        const double hat = 2.0 * (1.0 - std::cos(w * dx)) / (w * w * dx);
        c[k - 1] = 2.0 / ell * hat * s;
      }
      return c;
    };
    sup_ = 0.0;
    const auto coarse = interpolant_coefficients(4 * terms);
    coef_ = interpolant_coefficients(8 * terms);
    for (int k = 0; k < terms; ++k) coef_[k] = (4.0 * coef_[k] - coarse[k]) / 3.0;
  }

  int terms() const { return static_cast<int>(coef_.size()); }
  double coefficient(int k) const { return coef_.at(k - 1); }

  double operator()(double x, double t) const {
    const double ell = b_ - a_;
    const double theta = std::numbers::pi * (x - a_) / ell;
    const double c2 = 2.0 * std::cos(theta);
    double s_prev = 0.0, s = std::sin(theta), sum = 0.0;
    const double decay = D_ * (std::numbers::pi / ell) * (std::numbers::pi / ell) * t;
    for (int k = 1; k <= terms(); ++k) {
      const double e = std::exp(-decay * k * k);
      if (e == 0.0) break;
      sum += coef_[k - 1] * e * s;
      const double nx = c2 * s - s_prev;
      s_prev = s;
      s = nx;
    }
    return linear(x) + sum;
  }

  std::vector<double> sample(const std::vector<double>& xs, double t) const {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = (*this)(xs[i], t);
    return out;
  }

  // Bound on the dropped tail sum_{k > K} |b_k| e^{-D (k pi / ell)^2 t}, using |b_k| <= 2 sup|g|.
  double truncation_bound(double t) const {
    if (t <= 0.0) return std::numeric_limits<double>::infinity();
    const double ell = b_ - a_;
    const double c = D_ * (std::numbers::pi / ell) * (std::numbers::pi / ell) * t;
    const double K = terms();
    const double first = std::exp(-c * (K + 1) * (K + 1));
    const double ratio = std::exp(-c * (2 * K + 3));
    return 2.0 * sup_ * first / (1.0 - ratio);
  }

 private:
  double linear(double x) const { return left_ + (right_ - left_) * (x - a_) / (b_ - a_); }

  double a_, b_, left_, right_, D_;
  double sup_ = 0.0;
  std::vector<double> coef_;
};

namespace detail {
struct NonlinearRhs {
  double left, right;
  void operator()(const std::vector<double>& u, std::vector<double>& du, double) const {
    const std::size_t m = u.size();
    auto val = [&](std::ptrdiff_t i) { return i < 0 ? left : (i >= static_cast<std::ptrdiff_t>(m) ? right : u[i]); };
    double s_prev = sigma(val(0) - left);
    for (std::size_t i = 0; i < m; ++i) {
      const double s_next = sigma(val(static_cast<std::ptrdiff_t>(i) + 1) - u[i]);
      du[i] = 0.5 * (s_next - s_prev);
      s_prev = s_next;
    }
  }
};
}  // namespace detail

struct SolverOptions {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
};

// d/dt Phi(x) = (sigma(q_x) - sigma(q_{x-1})) / 2 with fixed ends, sampled at increasing times.
inline std::vector<Grid1D> nonlinear_trajectory(const Grid1D& phi0, const std::vector<double>& times,
                                                SolverOptions opt = {}) {
  using State = std::vector<double>;
  namespace ode = boost::numeric::odeint;
  std::vector<Grid1D> out;
  const int n = phi0.intervals();
  if (n < 2) {
    out.assign(times.size(), phi0);
    return out;
  }
  State u(phi0.values.begin() + 1, phi0.values.end() - 1);
  detail::NonlinearRhs rhs{phi0.left_value(), phi0.right_value()};
  auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<State>>(opt.abs_tol, opt.rel_tol);
  double t = 0.0;
  for (double target : times) {
    if (target < t) throw std::invalid_argument("nonlinear_trajectory: times must be non-decreasing");
    if (target > t) ode::integrate_adaptive(stepper, rhs, u, t, target, std::min(0.1, target - t));
    t = target;
    Grid1D g = phi0;
    std::copy(u.begin(), u.end(), g.values.begin() + 1);
    out.push_back(std::move(g));
  }
  return out;
}

inline Grid1D nonlinear_solve(const Grid1D& phi0, double t, SolverOptions opt = {}) {
  return nonlinear_trajectory(phi0, {t}, opt).front();
}

struct LaplacianBounds {
  Grid1D lower;  // heat flow with diffusivity 1/2
  Grid1D upper;  // heat flow with diffusivity sigma'(eta) / 2
  double eta = 0.0;
  bool concave = true;  // bounds are only guaranteed for concave data
};

// eta defaults to the largest grid gradient of phi0.
inline LaplacianBounds laplacian_bounds(const Grid1D& phi0, double t, double eta = -1.0) {
  LaplacianBounds b;
  if (eta < 0.0) {
    eta = 0.0;
    for (double q : phi0.gradient()) eta = std::max(eta, std::abs(q));
  }
  b.eta = eta;
  for (std::size_t i = 1; i + 1 < phi0.values.size(); ++i) {
    const double d2 = phi0.values[i + 1] + phi0.values[i - 1] - 2.0 * phi0.values[i];
    if (d2 > 1e-12 * (1.0 + std::abs(phi0.values[i]))) b.concave = false;
  }
  b.lower = heat_solve_discrete(phi0, t, 0.5);
  b.upper = heat_solve_discrete(phi0, t, 0.5 * sigma_prime(eta));
  return b;
}

struct GradientMonitorReport {
  std::vector<double> times;
  std::vector<double> max_abs_q;       // max_x |q_x|
  std::vector<double> max_abs_dsigma;  // max_x |sigma(q_{x+1}) - sigma(q_x)|
  std::vector<double> max_abs_dq;      // max_x |q_{x+1} - q_x|
  int q_violations = 0;
  int dsigma_violations = 0;
  double worst_increase = 0.0;
  double empirical_constant = 0.0;  // max over samples of (number of intervals) * max |q_{x+1} - q_x|
};

inline GradientMonitorReport gradient_monitors(const std::vector<Grid1D>& traj, const std::vector<double>& times,
                                               double tolerance = 1e-7) {
  GradientMonitorReport r;
  r.times = times;
  for (const auto& g : traj) {
    const auto q = g.gradient();
    double mq = 0.0, ms = 0.0, md = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) mq = std::max(mq, std::abs(q[i]));
    for (std::size_t i = 0; i + 1 < q.size(); ++i) {
      ms = std::max(ms, std::abs(sigma(q[i + 1]) - sigma(q[i])));
      md = std::max(md, std::abs(q[i + 1] - q[i]));
    }
    r.max_abs_q.push_back(mq);
    r.max_abs_dsigma.push_back(ms);
    r.max_abs_dq.push_back(md);
    r.empirical_constant = std::max(r.empirical_constant, md * g.intervals());
  }
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double iq = r.max_abs_q[i] - r.max_abs_q[i - 1];
    const double is = r.max_abs_dsigma[i] - r.max_abs_dsigma[i - 1];
    r.worst_increase = std::max({r.worst_increase, iq, is});
    if (iq > tolerance) ++r.q_violations;
    if (is > tolerance) ++r.dsigma_violations;
  }
  return r;
}

}  // namespace droplet
