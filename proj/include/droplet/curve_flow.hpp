#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "droplet/anisotropy.hpp"
#include "droplet/support_function.hpp"

namespace droplet {

struct FlowDiagnostics {
  double area = 0.0;
  double length = 0.0;
  double k_max = 0.0;
  double k_min = 0.0;
  double lip_ak = 0.0;   // max |d/dtheta (a k)|
  double entropy = 0.0;  // int a log(a k)
  double u_min = 0.0;    // min (g g'' + g^2) / a with g = a k
  double diameter = 0.0;
};

struct FlowState {
  double t = 0.0;
  SupportFunction h;
  std::vector<double> k;
  FlowDiagnostics diag;
};

inline FlowDiagnostics diagnose(const SupportFunction& h, const std::vector<double>& k, const std::vector<double>& a) {
  FlowDiagnostics d;
  const int n = h.size();
  const double dt = h.step();
  d.area = support_area(h);
  d.length = support_length(h);
  d.diameter = support_diameter(h);
  d.k_max = *std::max_element(k.begin(), k.end());
  d.k_min = *std::min_element(k.begin(), k.end());
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = a[i] * k[i];
  d.u_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double gp = g[(i + 1) % n], gm = g[(i + n - 1) % n];
    d.lip_ak = std::max(d.lip_ak, std::abs(gp - g[i]) / dt);
    d.entropy += a[i] * std::log(g[i]) * dt;
    const double g2 = (gp + gm - 2.0 * g[i]) / (dt * dt);
    d.u_min = std::min(d.u_min, (g[i] * g2 + g[i] * g[i]) / a[i]);
  }
  return d;
}

// k^2 (a k)'' + a k^3, the rate of change of curvature along the flow.
inline std::vector<double> curvature_rate(const std::vector<double>& k, const std::vector<double>& a) {
  const int n = static_cast<int>(k.size());
  const double c = std::cos(2.0 * std::numbers::pi / n), inv = 1.0 / (2.0 * (1.0 - c));
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) {
    const double gp = a[(i + 1) % n] * k[(i + 1) % n], gm = a[(i + n - 1) % n] * k[(i + n - 1) % n];
    const double g = a[i] * k[i];
    r[i] = k[i] * k[i] * (gp + gm - 2.0 * c * g) * inv;
  }
  return r;
}

struct FlowOptions {
  double cfl = 0.4;                     // dt <= cfl dtheta^2 / (a_max k_max^2)
  double stop_diameter_factor = 10.0;   // stop when diameter < factor * dtheta * h_max(0)
  double blowup_guard = 0.98;           // losing convexity before this fraction of t_f is an error
};

enum class FlowStop { reached_end, small_diameter, near_extinction };

inline const char* to_string(FlowStop s) {
  switch (s) {
    case FlowStop::reached_end: return "reached_end";
    case FlowStop::small_diameter: return "small_diameter";
    case FlowStop::near_extinction: return "near_extinction";
  }
  return "";
}

struct FlowTrajectory {
  std::vector<FlowState> samples;  // one per requested sample time that was reached
  FlowState final;
  double tf_estimate = 0.0;  // t + Area / int a at the last state
  FlowStop stop = FlowStop::reached_end;
  long steps = 0;
};

class FlowError : public std::runtime_error {
 public:
  FlowError(const std::string& what, FlowState state) : std::runtime_error(what), state_(std::move(state)) {}
  const FlowState& state() const { return state_; }

 private:
  FlowState state_;
};

// Explicit evolution of dh/dt = -a k with k = 1 / (h'' + h) recomputed from h at every step.
inline FlowTrajectory flow_run(const SupportFunction& initial, const AnisotropyTable& a, double t_end,
                               std::vector<double> sample_times = {}, FlowOptions opt = {}) {
  const int n = initial.size();
  if (static_cast<int>(a.a.size()) != n) throw std::invalid_argument("flow_run: anisotropy grid mismatch");
  std::sort(sample_times.begin(), sample_times.end());
  const double dth = initial.step();
  const double a_max = a.max();
  const double a_int = a.integral();
  const double stop_diam = opt.stop_diameter_factor * dth * initial.max();

  FlowState st;
  st.h = initial;
  st.k = curvature_from_support(initial);
  FlowTrajectory out;

  auto finish_state = [&](FlowState& s) { s.diag = diagnose(s.h, s.k, a.a); };
  std::size_t next_sample = 0;
  auto emit_samples = [&]() {
    while (next_sample < sample_times.size() && sample_times[next_sample] <= st.t) {
      FlowState s = st;
      finish_state(s);
      out.samples.push_back(std::move(s));
      ++next_sample;
    }
  };
  emit_samples();

  std::vector<double> rho(n);
  SupportFunction stage = initial;
  const double cd = std::cos(dth), inv = 1.0 / (2.0 * (1.0 - cd));
  // Radii of curvature of g into rho (same stencil as radius_of_curvature); false if any is not positive.
  auto radii = [&](const std::vector<double>& g) {
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      rho[i] = (g[(i + 1) % n] + g[(i + n - 1) % n] - 2.0 * cd * g[i]) * inv;
      if (!(rho[i] > 0.0)) ok = false;
    }
    return ok;
  };
  while (st.t < t_end) {
    double kmax = 0.0;
    for (double v : st.k) kmax = std::max(kmax, v);
    const double target = next_sample < sample_times.size() ? std::min(t_end, sample_times[next_sample]) : t_end;
    double dt = opt.cfl * dth * dth / (a_max * kmax * kmax);
    bool hit = false;
    if (st.t + dt >= target) {
      dt = target - st.t;
      hit = true;
    }
    // Heun step on dh/dt = -a k.
    bool convex = true;
    for (int i = 0; i < n; ++i) stage.h[i] = st.h.h[i] - dt * a.a[i] * st.k[i];
    if (radii(stage.h)) {
      for (int i = 0; i < n; ++i) stage.h[i] = 0.5 * (st.h.h[i] + stage.h[i] - dt * a.a[i] / rho[i]);
      convex = radii(stage.h);
    } else {
      convex = false;
    }
    st.h.h.swap(stage.h);
    st.t = hit ? target : st.t + dt;
    ++out.steps;
    if (!convex) {
      const double area = support_area(st.h);
      const double tf = st.t + std::max(0.0, area) / a_int;
      if (st.t < opt.blowup_guard * tf) {
        finish_state(st);
        throw FlowError("curvature blow-up before the final-time guard", st);
      }
      out.stop = FlowStop::near_extinction;
      out.tf_estimate = tf;
      out.final = st;
      return out;
    }
    for (int i = 0; i < n; ++i) st.k[i] = 1.0 / rho[i];
    emit_samples();
    if (support_diameter(st.h) < stop_diam) {
      out.stop = FlowStop::small_diameter;
      break;
    }
  }
  finish_state(st);
  out.tf_estimate = st.t + st.diag.area / a_int;
  out.final = st;
  return out;
}

struct FlowLimit {
  SupportFunction limit;
  std::vector<double> w;
  std::vector<SupportFunction> per_w;
  std::vector<double> successive_differences;  // sup |h^(w_i) - h^(w_{i+1})|
  double monotonicity_defect = 0.0;             // max (h^(w') - h^(w))^+ over w' < w
};

// Flows at a decreasing sequence of w, checks that the solutions decrease with w and extrapolates
// linearly in w to w = 0 from the two smallest values. One flow per w serves all times.
inline std::vector<FlowLimit> flow_limit(const SupportFunction& initial, const std::vector<double>& times,
                                         const std::vector<double>& ws, FlowOptions opt = {},
                                         double monotone_tolerance = 1e-6) {
  if (ws.empty()) throw std::invalid_argument("flow_limit: empty w sequence");
  for (std::size_t i = 0; i + 1 < ws.size(); ++i)
    if (!(ws[i + 1] < ws[i])) throw std::invalid_argument("flow_limit: w sequence must decrease");
  for (std::size_t i = 0; i < times.size(); ++i)
    if (times[i] < 0.0 || (i > 0 && times[i] < times[i - 1]))
      throw std::invalid_argument("flow_limit: times must be non-negative and sorted");
  std::vector<FlowLimit> out(times.size());
  for (auto& f : out) f.w = ws;
  if (times.empty()) return out;
  for (double w : ws) {
    const auto table = AnisotropyTable::regularized(initial.size(), w);
    auto traj = flow_run(initial, table, times.back(), times, opt);
    if (traj.samples.size() < times.size())
      throw std::runtime_error("flow_limit: flow stopped before the requested time");
    for (std::size_t j = 0; j < times.size(); ++j) out[j].per_w.push_back(traj.samples[j].h);
  }
  for (auto& f : out) {
    for (std::size_t i = 0; i + 1 < ws.size(); ++i) {
      double diff = 0.0;
      for (int j = 0; j < initial.size(); ++j) {
        const double d = f.per_w[i + 1].h[j] - f.per_w[i].h[j];
        diff = std::max(diff, std::abs(d));
        f.monotonicity_defect = std::max(f.monotonicity_defect, d);
      }
      f.successive_differences.push_back(diff);
    }
    if (f.monotonicity_defect > monotone_tolerance)
      throw std::runtime_error("flow_limit: solutions not monotone in w (discretisation too coarse)");
    const std::size_t m = ws.size();
    f.limit = f.per_w[m - 1];
    if (m > 1) {
      const double w1 = ws[m - 2], w0 = ws[m - 1];
      for (int j = 0; j < initial.size(); ++j)
        f.limit.h[j] += (f.per_w[m - 1].h[j] - f.per_w[m - 2].h[j]) * w0 / (w1 - w0);
    }
  }
  return out;
}

inline FlowLimit flow_limit(const SupportFunction& initial, double t, const std::vector<double>& ws,
                            FlowOptions opt = {}, double monotone_tolerance = 1e-6) {
  return flow_limit(initial, std::vector<double>{t}, ws, opt, monotone_tolerance).front();
}

struct FlowDiagnosticsReport {
  std::vector<double> times;
  std::vector<FlowDiagnostics> diag;
  double a_min = 0.0, a_max = 0.0;
  bool kmin_bound_holds = true;      // k_min(t) >= (a_min / a_max) k_min(0)
  bool u_bound_holds = true;         // u >= -1/(2t)
  double kmax_ratio = 0.0;           // max_t k_max(t) / k_max(0)
  double lip_early_max = 0.0;        // max of the a k Lipschitz seminorm over the first 5% of samples
  double lip_max = 0.0;
  bool area_linear = true;
  double area_slope_error = 0.0;     // max |Area(t) - Area(0) + t int a|
};

inline FlowDiagnosticsReport flow_diagnostics(const std::vector<FlowState>& samples, const AnisotropyTable& a,
                                              double area_tolerance = 1e-3) {
  FlowDiagnosticsReport r;
  if (samples.empty()) return r;
  r.a_min = a.min();
  r.a_max = a.max();
  const double a_int = a.integral();
  const auto& d0 = samples.front().diag;
  const double t0 = samples.front().t;
  const double t_last = samples.back().t;
  for (const auto& s : samples) {
    r.times.push_back(s.t);
    r.diag.push_back(s.diag);
    if (s.diag.k_min < (r.a_min / r.a_max) * d0.k_min * (1.0 - 1e-9)) r.kmin_bound_holds = false;
    if (s.t > 0.0 && s.diag.u_min < -1.0 / (2.0 * s.t) - 1e-9) r.u_bound_holds = false;
    r.kmax_ratio = std::max(r.kmax_ratio, s.diag.k_max / d0.k_max);
    r.lip_max = std::max(r.lip_max, s.diag.lip_ak);
    if (s.t - t0 <= 0.05 * (t_last - t0)) r.lip_early_max = std::max(r.lip_early_max, s.diag.lip_ak);
    const double err = std::abs(s.diag.area - (d0.area - (s.t - t0) * a_int));
    r.area_slope_error = std::max(r.area_slope_error, err);
  }
  r.area_linear = r.area_slope_error <= area_tolerance;
  return r;
}

}  // namespace droplet
