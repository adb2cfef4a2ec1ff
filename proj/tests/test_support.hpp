#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <vector>

#include "npspec/geometry2d.hpp"

// Test-only oracles, independent of the Nystrom path they check.
namespace oracle {

// High-order 1D reference quadrature on [a, b] (composite Gauss with
// Richardson-style agreement check, from the shared detail rule).
double integrate(const std::function<double(double)>& f, double a, double b);

inline double reference_perimeter(const npspec::geometry::BoundaryCurve2D& c) {
  return integrate([&](double t) { return c.derivative(t).norm(); }, 0.0,
                   2.0 * M_PI);
}

// 1/2 int r(t)^2 dt for star curves centered at their own center.
inline double reference_star_area(
    const npspec::geometry::BoundaryCurve2D& c) {
  return integrate(
      [&](double t) {
        return 0.5 * (c.point(t) - c.center()).squaredNorm();
      },
      0.0, 2.0 * M_PI);
}

// Least-squares slope of log|y| against log|x|.
inline double loglog_slope(const std::vector<double>& x,
                           const std::vector<double>& y) {
  const int n = int(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(std::abs(x[i])), ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
