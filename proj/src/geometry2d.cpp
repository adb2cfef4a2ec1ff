#include "npspec/geometry2d.hpp"

#include <atomic>
#include <cmath>
#include <string>

namespace npspec::geometry {
namespace {

std::atomic<std::uint64_t> next_grid_id{1};

struct Radial {
  double r, dr, ddr;
};

Radial star_radius(const FourierStarShape& s, double t) {
  Radial out{s.base_radius, 0.0, 0.0};
  for (std::size_t k = 1; k <= std::max(s.cos_coef.size(), s.sin_coef.size());
       ++k) {
    const double a = k <= s.cos_coef.size() ? s.cos_coef[k - 1] : 0.0;
    const double b = k <= s.sin_coef.size() ? s.sin_coef[k - 1] : 0.0;
    const double c = std::cos(k * t), sn = std::sin(k * t);
    out.r += a * c + b * sn;
    out.dr += k * (-a * sn + b * c);
    out.ddr += -double(k) * k * (a * c + b * sn);
  }
  return out;
}

// Proper segment intersection (shared endpoints excluded by the caller).
bool segments_cross(const Vector2d& p1, const Vector2d& p2, const Vector2d& q1,
                    const Vector2d& q2) {
  auto orient = [](const Vector2d& a, const Vector2d& b, const Vector2d& c) {
    return (b.x() - a.x()) * (c.y() - a.y()) -
           (b.y() - a.y()) * (c.x() - a.x());
  };
  const double o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
  const double o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
  return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0));
}

}  // namespace

BoundaryCurve2D::BoundaryCurve2D(Descriptor shape, Vector2d center)
    : shape_(std::move(shape)), center_(std::move(center)) {}

Vector2d BoundaryCurve2D::point(double t) const {
  if (const auto* e = std::get_if<EllipseShape>(&shape_)) {
    const double c = std::cos(e->rotation), s = std::sin(e->rotation);
    const double u = e->a * std::cos(t), v = e->b * std::sin(t);
    return center_ + Vector2d(c * u - s * v, s * u + c * v);
  }
  const auto& f = std::get<FourierStarShape>(shape_);
  const Radial rad = star_radius(f, t);
  return center_ + rad.r * Vector2d(std::cos(t), std::sin(t));
}

Vector2d BoundaryCurve2D::derivative(double t) const {
  if (const auto* e = std::get_if<EllipseShape>(&shape_)) {
    const double c = std::cos(e->rotation), s = std::sin(e->rotation);
    const double du = -e->a * std::sin(t), dv = e->b * std::cos(t);
    return Vector2d(c * du - s * dv, s * du + c * dv);
  }
  const auto& f = std::get<FourierStarShape>(shape_);
  const Radial rad = star_radius(f, t);
  const Vector2d er(std::cos(t), std::sin(t)), et(-std::sin(t), std::cos(t));
  return rad.dr * er + rad.r * et;
}

Vector2d BoundaryCurve2D::second_derivative(double t) const {
  if (const auto* e = std::get_if<EllipseShape>(&shape_)) {
    const double c = std::cos(e->rotation), s = std::sin(e->rotation);
    const double ddu = -e->a * std::cos(t), ddv = -e->b * std::sin(t);
    return Vector2d(c * ddu - s * ddv, s * ddu + c * ddv);
  }
  const auto& f = std::get<FourierStarShape>(shape_);
  const Radial rad = star_radius(f, t);
  const Vector2d er(std::cos(t), std::sin(t)), et(-std::sin(t), std::cos(t));
  return (rad.ddr - rad.r) * er + 2.0 * rad.dr * et;
}

BoundaryCurve2D make_ellipse(double a, double b, Vector2d center,
                             double rotation) {
  if (!(a > 0.0) || !(b > 0.0))
    throw invalid_geometry_error("ellipse semi-axes must be positive");
  return BoundaryCurve2D(EllipseShape{a, b, rotation}, std::move(center));
}

BoundaryCurve2D make_fourier_star(double base_radius,
                                  std::vector<double> cos_coef,
                                  std::vector<double> sin_coef,
                                  Vector2d center, int max_harmonic) {
  if (!(base_radius > 0.0))
    throw invalid_geometry_error("star base radius must be positive");
  if (int(std::max(cos_coef.size(), sin_coef.size())) > max_harmonic)
    throw invalid_geometry_error(
        "fourier-star harmonic above the configured cap " +
        std::to_string(max_harmonic));
  FourierStarShape shape{base_radius, std::move(cos_coef),
                         std::move(sin_coef)};
  for (int i = 0; i < 1024; ++i) {
    if (star_radius(shape, 2.0 * M_PI * i / 1024.0).r <= 0.0)
      throw invalid_geometry_error("fourier-star radius is not positive");
  }
  return BoundaryCurve2D(std::move(shape), std::move(center));
}

QuadGrid2D discretize(const BoundaryCurve2D& curve, int n) {
  if (n < 16 || n % 2 != 0)
    throw configuration_error("grid size must be even and at least 16");

  QuadGrid2D grid;
  grid.id = next_grid_id.fetch_add(1);
  grid.n = n;
  grid.center = curve.center();
  grid.t.resize(n);
  grid.points.resize(2, n);
  grid.weights.resize(n);
  grid.normals.resize(2, n);
  grid.curvature.resize(n);
  grid.speed.resize(n);

  const double h = 2.0 * M_PI / n;
  for (int i = 0; i < n; ++i) {
    const double t = h * i;
    const Vector2d x = curve.point(t);
    const Vector2d d1 = curve.derivative(t);
    const Vector2d d2 = curve.second_derivative(t);
    const double sp = d1.norm();
    if (!(sp > 1e-14))
      throw invalid_geometry_error("curve has a vanishing tangent (cusp)");
    grid.t(i) = t;
    grid.points.col(i) = x;
    grid.speed(i) = sp;
    grid.weights(i) = sp * h;
    grid.normals.col(i) = Vector2d(d1.y(), -d1.x()) / sp;
    grid.curvature(i) = (d1.x() * d2.y() - d1.y() * d2.x()) / (sp * sp * sp);
  }

  // Simplicity check at this resolution: no two non-adjacent chords cross.
  for (int i = 0; i < n; ++i) {
    const Vector2d p1 = grid.points.col(i), p2 = grid.points.col((i + 1) % n);
    for (int j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_cross(p1, p2, grid.points.col(j),
                         grid.points.col((j + 1) % n)))
        throw invalid_geometry_error("curve self-intersects");
    }
  }

  if (area(grid) <= 0.0)
    throw invalid_geometry_error("curve is not counterclockwise");
  return grid;
}

double area(const QuadGrid2D& grid) {
  double sum = 0.0;
  for (int i = 0; i < grid.n; ++i)
    sum += grid.weights(i) *
           (grid.points.col(i) - grid.center).dot(grid.normals.col(i));
  return 0.5 * sum;
}

double perimeter(const QuadGrid2D& grid) { return grid.weights.sum(); }

}  // namespace npspec::geometry
