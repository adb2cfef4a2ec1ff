#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <variant>
#include <vector>

#include "npspec/errors.hpp"

namespace npspec::geometry {

using Eigen::Vector2d;

struct EllipseShape {
  double a = 1.0;       // semi-axis along the (rotated) x1 direction
  double b = 1.0;       // semi-axis along the (rotated) x2 direction
  double rotation = 0;  // radians, counterclockwise
};

// Star-shaped curve r(t) = base_radius + sum_k (cos_coef[k-1] cos(k t)
//                                              + sin_coef[k-1] sin(k t)).
struct FourierStarShape {
  double base_radius = 1.0;
  std::vector<double> cos_coef;
  std::vector<double> sin_coef;
};

// Smooth closed curve, 2*pi-periodic, parametrized counterclockwise with
// outward normal nu = (x2', -x1')/|x'|. Immutable after construction.
class BoundaryCurve2D {
public:
  using Descriptor = std::variant<EllipseShape, FourierStarShape>;

  BoundaryCurve2D(Descriptor shape, Vector2d center);

  Vector2d point(double t) const;
  Vector2d derivative(double t) const;
  Vector2d second_derivative(double t) const;

  const Vector2d& center() const { return center_; }
  const Descriptor& descriptor() const { return shape_; }

private:
  Descriptor shape_;
  Vector2d center_;
};

// Default cap on star-curve harmonics so the default grid resolves them.
inline constexpr int kMaxStarHarmonic = 16;

BoundaryCurve2D make_ellipse(double a, double b, Vector2d center = {0, 0},
                             double rotation = 0.0);
BoundaryCurve2D make_fourier_star(double base_radius,
                                  std::vector<double> cos_coef,
                                  std::vector<double> sin_coef = {},
                                  Vector2d center = {0, 0},
                                  int max_harmonic = kMaxStarHarmonic);

// Periodic-trapezoid Nystrom grid: t_i = 2*pi*i/N, w_i = |x'(t_i)| 2*pi/N.
struct QuadGrid2D {
  std::uint64_t id = 0;
  int n = 0;
  Eigen::VectorXd t;
  Eigen::Matrix2Xd points;
  Eigen::VectorXd weights;
  Eigen::Matrix2Xd normals;
  Eigen::VectorXd curvature;
  Eigen::VectorXd speed;  // |x'(t_i)|
  Vector2d center = Vector2d::Zero();
};

// N must be even (log-kernel rule) and at least 16. Checks |x'| > 0 and
// simplicity at the discretization resolution.
QuadGrid2D discretize(const BoundaryCurve2D& curve, int n);

// |D| = 1/2 sum_i w_i <x_i - z, nu_i> (z only improves conditioning).
double area(const QuadGrid2D& grid);
double perimeter(const QuadGrid2D& grid);

}  // namespace npspec::geometry
