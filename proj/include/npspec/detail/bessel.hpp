#pragma once

#include <cmath>
#include <complex>

#include "npspec/errors.hpp"

// Complex-argument Bessel/Hankel functions of order 0 and 1, computed from
// the ascending series. Intended for the quasi-static regime where
// |z| = |k||x-y| stays small; accuracy degrades past |z| ~ 12 and the
// functions refuse beyond that.

namespace npspec::detail {

inline constexpr double euler_gamma = 0.57721566490153286060651209;

inline void require_series_range(std::complex<double> z) {
  if (std::abs(z) > 12.0)
    throw precision_error(
        "bessel series evaluated outside its validity range |z| <= 12");
}

inline std::complex<double> bessel_j0(std::complex<double> z) {
  require_series_range(z);
  const std::complex<double> q = 0.25 * z * z;
  std::complex<double> term(1.0, 0.0), sum(1.0, 0.0);
  for (int m = 1; m <= 60; ++m) {
    term *= -q / double(m * m);
    sum += term;
    if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum))) break;
  }
  return sum;
}

inline std::complex<double> bessel_j1(std::complex<double> z) {
  require_series_range(z);
  const std::complex<double> q = 0.25 * z * z;
  std::complex<double> term(1.0, 0.0), sum(1.0, 0.0);
  for (int m = 1; m <= 60; ++m) {
    term *= -q / double(m * (m + 1));
    sum += term;
    if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum))) break;
  }
  return 0.5 * z * sum;
}

inline std::complex<double> bessel_y0(std::complex<double> z) {
  require_series_range(z);
  const std::complex<double> q = 0.25 * z * z;
  std::complex<double> term(1.0, 0.0), sum(0.0, 0.0);
  double harmonic = 0.0;
  for (int m = 1; m <= 60; ++m) {
    term *= -q / double(m * m);
    harmonic += 1.0 / m;
    sum += -harmonic * term;  // (-1)^{m+1} H_m q^m / (m!)^2
    if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum))) break;
  }
  const std::complex<double> log_half_z = std::log(0.5 * z);
  return (2.0 / M_PI) * ((log_half_z + euler_gamma) * bessel_j0(z) + sum);
}

inline std::complex<double> bessel_y1(std::complex<double> z) {
  require_series_range(z);
  const std::complex<double> q = 0.25 * z * z;
  std::complex<double> term(1.0, 0.0);
  double hk = 0.0, hk1 = 1.0;
  std::complex<double> sum = (hk + hk1 - 2.0 * euler_gamma) * term;
  for (int k = 1; k <= 60; ++k) {
    term *= -q / double(k * (k + 1));
    hk += 1.0 / k;
    hk1 += 1.0 / (k + 1);
    sum += (hk + hk1 - 2.0 * euler_gamma) * term;
    if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum))) break;
  }
  const std::complex<double> log_half_z = std::log(0.5 * z);
  return -2.0 / (M_PI * z) + (2.0 / M_PI) * log_half_z * bessel_j1(z) -
         (z / (2.0 * M_PI)) * sum;
}

inline std::complex<double> hankel1_0(std::complex<double> z) {
  return bessel_j0(z) + std::complex<double>(0.0, 1.0) * bessel_y0(z);
}

inline std::complex<double> hankel1_1(std::complex<double> z) {
  return bessel_j1(z) + std::complex<double>(0.0, 1.0) * bessel_y1(z);
}

// Real-argument J_n with negative orders folded via J_{-n} = (-1)^n J_n.
inline double bessel_jn(int n, double x) {
  const int m = n < 0 ? -n : n;
  const double v = std::cyl_bessel_j(double(m), std::abs(x));
  double s = 1.0;
  if (n < 0 && (m % 2)) s = -s;
  if (x < 0 && (m % 2)) s = -s;
  return s * v;
}

inline double bessel_yn(int n, double x) {
  const int m = n < 0 ? -n : n;
  const double v = std::cyl_neumann(double(m), x);
  return (n < 0 && (m % 2)) ? -v : v;
}

}  // namespace npspec::detail
