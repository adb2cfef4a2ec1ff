#include <doctest.h>

#include <cmath>

#include "npspec/detail/quadrature.hpp"
#include "npspec/geometry2d.hpp"
#include "test_support.hpp"

using namespace npspec;
using namespace npspec::geometry;

namespace oracle {
double integrate(const std::function<double(double)>& f, double a, double b) {
  return npspec::detail::integrate_to_tolerance(f, a, b, 1e-14);
}
}  // namespace oracle

TEST_CASE("ellipse construction and areas") {
  const auto disk = make_ellipse(1, 1);
  auto g = discretize(disk, 64);
  CHECK(perimeter(g) == doctest::Approx(2 * M_PI).epsilon(1e-13));
  CHECK(area(g) == doctest::Approx(M_PI).epsilon(1e-13));

  const auto ell = make_ellipse(2, 1);
  g = discretize(ell, 128);
  CHECK(area(g) == doctest::Approx(2 * M_PI).epsilon(1e-11));

  const auto rot = make_ellipse(2, 1, {0, 0}, M_PI / 4);
  CHECK(area(discretize(rot, 128)) == doctest::Approx(2 * M_PI).epsilon(1e-11));

  CHECK_THROWS_AS(make_ellipse(-1, 1), invalid_geometry_error);
  CHECK_THROWS_AS(make_ellipse(2, 0), invalid_geometry_error);
}

TEST_CASE("discretize node data on the unit disk") {
  const auto g = discretize(make_ellipse(1, 1), 64);
  for (int i = 0; i < g.n; ++i) {
    CHECK(g.weights(i) == doctest::Approx(2 * M_PI / 64).epsilon(1e-14));
    CHECK(g.curvature(i) == doctest::Approx(1.0).epsilon(1e-12));
    // outward normal points along the position vector on the unit circle
    CHECK(g.normals.col(i).dot(g.points.col(i)) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("discretize validates N") {
  const auto disk = make_ellipse(1, 1);
  CHECK_THROWS_AS(discretize(disk, 63), configuration_error);
  CHECK_THROWS_AS(discretize(disk, 8), configuration_error);
}

TEST_CASE("closed-surface identities") {
  for (const auto& curve :
       {make_ellipse(2, 1, {0.3, -0.2}, 0.7),
        make_fourier_star(1.0, {0, 0, 0.2})}) {
    const auto g = discretize(curve, 128);
    Eigen::Vector2d flux = Eigen::Vector2d::Zero();
    for (int i = 0; i < g.n; ++i) flux += g.weights(i) * g.normals.col(i);
    CHECK(flux.norm() < 1e-12);
  }
}

TEST_CASE("perimeter matches the reference quadrature") {
  const auto ell = make_ellipse(2, 1);
  const double ref = oracle::reference_perimeter(ell);
  CHECK(std::abs(perimeter(discretize(ell, 128)) - ref) < 1e-10);
}

TEST_CASE("fourier-star area matches the radial oracle") {
  const auto star = make_fourier_star(1.0, {0, 0, 0.2});
  const double ref = oracle::reference_star_area(star);
  CHECK(ref == doctest::Approx(M_PI * 1.02).epsilon(1e-12));
  CHECK(std::abs(area(discretize(star, 256)) - ref) < 1e-12);
}

TEST_CASE("spectral convergence of perimeter and area") {
  const auto star = make_fourier_star(1.0, {0.1, 0, 0.2, 0, 0.05});
  const double ref_p = oracle::reference_perimeter(star);
  const double ref_a = oracle::reference_star_area(star);
  const double e16 = std::abs(perimeter(discretize(star, 16)) - ref_p);
  const double e32 = std::abs(perimeter(discretize(star, 32)) - ref_p);
  const double a16 = std::abs(area(discretize(star, 16)) - ref_a);
  const double a32 = std::abs(area(discretize(star, 32)) - ref_a);
  // faster than any fixed power: doubling N must beat a factor 2^6
  CHECK(e32 < std::max(e16 / 64.0, 1e-14));
  CHECK(a32 < std::max(a16 / 64.0, 1e-14));
}

TEST_CASE("star curve validation") {
  CHECK_THROWS_AS(make_fourier_star(1.0, {1.5}), invalid_geometry_error);
  std::vector<double> too_high(17, 0.0);
  too_high.back() = 0.01;
  CHECK_THROWS_AS(make_fourier_star(1.0, too_high), invalid_geometry_error);
}
