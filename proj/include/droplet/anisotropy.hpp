#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace droplet {

// Shift constant in a^(w) = a * g_w - C w; large enough that a^(w) is non-increasing as w decreases.
inline constexpr double kAnisotropyShift = 0.27;

// a(theta) = 1 / (2 (|cos theta| + |sin theta|)^2).
inline double anisotropy(double theta) {
  const double s = std::abs(std::cos(theta)) + std::abs(std::sin(theta));
  return 1.0 / (2.0 * s * s);
}

namespace detail {
inline double wrapped_gaussian(double d, double w) {
  const double two_pi = 2.0 * std::numbers::pi;
  d = std::remainder(d, two_pi);
  double s = 0.0;
  for (int m = -1; m <= 1; ++m) {
    const double e = (d + m * two_pi) / w;
    s += std::exp(-0.5 * e * e);
  }
  return s / (std::sqrt(two_pi) * w);
}
}  // namespace detail

// Regularised anisotropy at a point: circular convolution with a Gaussian of standard deviation w,
// minus C w. The convolution is integrated piecewise between the kinks at multiples of pi/2.
inline double anisotropy(double theta, double w, double shift = kAnisotropyShift) {
  if (w < 0.0) throw std::invalid_argument("anisotropy: w must be >= 0");
  if (w == 0.0) return anisotropy(theta);
  using boost::math::quadrature::gauss_kronrod;
  const double half_pi = 0.5 * std::numbers::pi;
  const double reach = std::min(std::numbers::pi, 10.0 * w);
  // Integrate a(theta - s) g(s) over s in [-reach, reach]; kinks where theta - s = j pi/2.
  std::vector<double> cuts{-reach};
  for (int j = static_cast<int>(std::floor((theta - reach) / half_pi)) - 1;
       j <= static_cast<int>(std::ceil((theta + reach) / half_pi)) + 1; ++j) {
    const double s = theta - j * half_pi;
    if (s > -reach && s < reach) cuts.push_back(s);
  }
  cuts.push_back(reach);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0, mass = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += gauss_kronrod<double, 31>::integrate(
        [&](double s) { return anisotropy(theta - s) * detail::wrapped_gaussian(s, w); }, cuts[i], cuts[i + 1], 12,
        1e-14);
    mass += gauss_kronrod<double, 31>::integrate([&](double s) { return detail::wrapped_gaussian(s, w); }, cuts[i],
                                                 cuts[i + 1], 12, 1e-14);
  }
  return total / mass - shift * w;
}

// Integral of a over [0, 2 pi], by quadrature on each smooth quarter.
inline double anisotropy_integral() {
  using boost::math::quadrature::gauss_kronrod;
  double s = 0.0;
  for (int q = 0; q < 4; ++q)
    s += gauss_kronrod<double, 61>::integrate([](double t) { return anisotropy(t); }, q * 0.5 * std::numbers::pi,
                                              (q + 1) * 0.5 * std::numbers::pi, 15, 1e-15);
  return s;
}

// Values of a^(w) on the uniform grid theta_i = 2 pi i / n.
struct AnisotropyTable {
  double w = 0.0;
  double shift = kAnisotropyShift;
  std::vector<double> a;

  double min() const { return *std::min_element(a.begin(), a.end()); }
  double max() const { return *std::max_element(a.begin(), a.end()); }
  double integral() const {
    double s = 0.0;
    for (double v : a) s += v;
    return s * 2.0 * std::numbers::pi / static_cast<double>(a.size());
  }

  static AnisotropyTable constant(int n, double value) { return {0.0, 0.0, std::vector<double>(n, value)}; }

  // Convolution by direct periodic quadrature on the grid with the kernel normalised to unit mass.
  static AnisotropyTable regularized(int n, double w, double shift = kAnisotropyShift) {
    AnisotropyTable t{w, shift, std::vector<double>(n)};
    const double d = 2.0 * std::numbers::pi / n;
    std::vector<double> base(n);
    for (int i = 0; i < n; ++i) base[i] = anisotropy(i * d);
    if (w == 0.0) {
      t.a = base;
      return t;
    }
    std::vector<double> kernel(n);
    double mass = 0.0;
    for (int j = 0; j < n; ++j) {
      kernel[j] = detail::wrapped_gaussian(j * d, w);
      mass += kernel[j];
    }
    for (double& k : kernel) k /= mass;
    const int reach = std::min(n / 2, static_cast<int>(std::ceil(10.0 * w / d)));
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = -reach; j <= reach; ++j) {
        if (2 * reach == n && j == reach) continue;  // do not count the antipode twice
        s += base[((i - j) % n + n) % n] * kernel[(j % n + n) % n];
      }
      t.a[i] = s - shift * w;
    }
    return t;
  }
};

}  // namespace droplet
