#include <doctest.h>

#include <cmath>
#include <complex>

#include "npspec/polarization.hpp"
#include "test_support.hpp"

using namespace npspec;
using namespace npspec::geometry;
using namespace npspec::polarization;
using std::complex;

namespace {

// Closed-form ellipse tensor: M = diag(|D|/(lambda -+ lambda_1)) with
// lambda_1 = (a-b)/(2(a+b)).
Eigen::Matrix2cd ellipse_closed_form(double a, double b,
                                     complex<double> lambda) {
  const double area = M_PI * a * b;
  const double l1 = 0.5 * (a - b) / (a + b);
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = area / (lambda - l1);
  m(1, 1) = area / (lambda + l1);
  return m;
}

}  // namespace

TEST_CASE("direct polarization tensor matches the ellipse closed form") {
  const auto w = spectral::build_workspace(make_ellipse(2, 1), 256);
  for (const complex<double> lambda :
       {complex<double>(0.3, 0.0), complex<double>(1.0 / 6 + 1e-2, 1e-2),
        complex<double>(-0.2, 0.05)}) {
    const auto m = polarization_direct(w.grid, w.Kstar, lambda, &w.data);
    const auto ref = ellipse_closed_form(2, 1, lambda);
    CHECK((m.m - ref).norm() / ref.norm() < 1e-8);
    CHECK(std::abs(m.m(0, 1)) < 1e-8);
    CHECK((m.m - m.m.transpose()).norm() < 1e-8 * m.m.norm());
  }

  // near-pole evaluation keeps 1e-6 relative accuracy
  const complex<double> near(1.0 / 6.0 + 1e-5, 1e-3);
  const auto m = polarization_direct(w.grid, w.Kstar, near, &w.data);
  const auto ref = ellipse_closed_form(2, 1, near);
  CHECK(std::abs(m.m(0, 0) - ref(0, 0)) < 1e-6 * std::abs(ref(0, 0)));
  CHECK(std::abs(m.m(0, 0)) > 1e3);
}

TEST_CASE("disk polarization tensor") {
  const auto w = spectral::build_workspace(make_ellipse(1, 1), 64);
  const auto m = polarization_direct(w.grid, w.Kstar, 0.25, &w.data);
  CHECK((m.m - (M_PI / 0.25) * Eigen::Matrix2cd::Identity()).norm() < 1e-10);
  // real lambda outside [-1/2, 1/2] keeps M real
  const auto far = polarization_direct(w.grid, w.Kstar, 0.75, &w.data);
  CHECK(far.m.imag().norm() < 1e-12);
}

TEST_CASE("resolvent at a discrete eigenvalue is refused") {
  const auto w = spectral::build_workspace(make_ellipse(2, 1), 96);
  CHECK_THROWS_AS(polarization_direct(w.grid, w.Kstar,
                                      complex<double>(w.data.eigenvalues(0), 0),
                                      &w.data),
                  near_singular_error);
}

TEST_CASE("spectral weights of the ellipse concentrate on the first pair") {
  const auto w = spectral::build_workspace(make_ellipse(2, 1), 256);
  const auto weights = spectral_weights(w.data, w.grid);
  const double area = 2 * M_PI;

  // the lambda0 = 1/2 mode carries no weight: (nu_m, phi0)_{H*} = 0
  for (int l = 0; l < 2; ++l) {
    Eigen::VectorXd nu(w.grid.n);
    for (int i = 0; i < w.grid.n; ++i) nu(i) = w.grid.normals(l, i);
    CHECK(std::abs(nu.dot(w.data.gram * w.data.phi0)) < 1e-10);
  }

  double on_peak_11 = 0.0, off_peak_11 = 0.0;
  for (int j = 0; j < int(weights.alpha.size()); ++j) {
    CHECK(weights.alpha[j](0, 0) > -1e-10);
    CHECK(weights.alpha[j](1, 1) > -1e-10);
    if (std::abs(weights.lambdas(j) - 1.0 / 6.0) < 1e-6)
      on_peak_11 += weights.alpha[j](0, 0);
    else
      off_peak_11 = std::max(off_peak_11, std::abs(weights.alpha[j](0, 0)));
  }
  CHECK(on_peak_11 == doctest::Approx(area).epsilon(1e-8));
  CHECK(off_peak_11 < 1e-8);
}

TEST_CASE("spectral sum agrees with the direct solve") {
  const auto w = spectral::build_workspace(make_ellipse(2, 1), 256);
  const auto weights = spectral_weights(w.data, w.grid);
  const complex<double> lambda(0.3, 0.0);

  const auto direct = polarization_direct(w.grid, w.Kstar, lambda, &w.data);
  const auto series = polarization_spectral(weights, lambda);
  CHECK((series.m - direct.m).norm() < 1e-8 * direct.m.norm());

  // the single dominant mode reproduces the closed-form M11 entry
  int dominant = 0;
  for (int j = 0; j < int(weights.alpha.size()); ++j)
    if (std::abs(weights.lambdas(j) - 1.0 / 6.0) < 1e-6) dominant = j + 1;
  const auto one_mode = polarization_spectral(weights, lambda,
                                              std::vector<int>{dominant});
  CHECK(std::abs(one_mode.m(0, 0) - 2 * M_PI / (lambda - 1.0 / 6.0)) < 1e-7);

  CHECK(polarization_spectral(weights, lambda, std::vector<int>{}).m.norm() ==
        0.0);
}

TEST_CASE("sum rules") {
  struct Case {
    BoundaryCurve2D curve;
    double area;
  };
  const Case cases[] = {{make_ellipse(1, 1), M_PI},
                        {make_ellipse(2, 1), 2 * M_PI},
                        {make_fourier_star(1.0, {0, 0, 0.2}), 1.02 * M_PI}};
  for (const auto& c : cases) {
    const auto w = spectral::build_workspace(c.curve, 256);
    const auto weights = spectral_weights(w.data, w.grid);
    const auto r = sum_rules(weights, w.grid, w.S, w.Kstar);
    CHECK(r.r1 / c.area < 1e-6);
    CHECK(r.r2 < 1e-6);
    CHECK(r.r3 < 1e-6);
    CHECK(std::abs(r.r3 - r.r3_stepwise) < 1e-10);
  }

  // disk: both sides of the third rule vanish separately,
  // energy = |D|/2 from S[nu_l] = -x_l/2.
  const auto disk = spectral::build_workspace(make_ellipse(1, 1), 128);
  const auto weights = spectral_weights(disk.data, disk.grid);
  const auto r = sum_rules(weights, disk.grid, disk.S, disk.Kstar);
  CHECK(r.dirichlet_energy == doctest::Approx(M_PI / 2).epsilon(1e-10));
}

TEST_CASE("depolarization factors") {
  const auto sphere = s_factors(1, 1, 1);
  for (double s : sphere) CHECK(s == doctest::Approx(-1.0 / 3).epsilon(1e-12));

  const auto s = s_factors(1.3, 0.6, 2.1);
  CHECK(s[0] + s[1] + s[2] == doctest::Approx(-1.0).epsilon(1e-12));

  const auto p = s_factors(0.6, 2.1, 1.3);
  CHECK(p[0] == doctest::Approx(s[1]).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(s[2]).epsilon(1e-12));
  CHECK(p[2] == doctest::Approx(s[0]).epsilon(1e-12));
}

TEST_CASE("ellipsoid polarization tensor") {
  const complex<double> lambda(0.3, 0.01);
  const auto sphere = ellipsoid_polarization(1, 1, 1, lambda);
  const complex<double> expected = (4 * M_PI / 3) / (lambda - 1.0 / 6.0);
  for (int l = 0; l < 3; ++l)
    CHECK(std::abs(sphere.m(l, l) - expected) < 1e-12 * std::abs(expected));

  // decay like |D|/lambda at infinity
  const auto far = ellipsoid_polarization(1, 1, 1, 1e8);
  CHECK(std::abs(far.m(0, 0) - (4 * M_PI / 3) / 1e8) < 1e-12);

  // prolate: the long axis has the smaller |s| and the larger pole
  const auto s = s_factors(2, 1, 1);
  CHECK(s[0] > s[1]);
  CHECK(s[1] == doctest::Approx(s[2]).epsilon(1e-12));
  CHECK(0.5 + s[0] > 0.5 + s[1]);

  CHECK_THROWS_AS(ellipsoid_polarization(1, 1, 1, 1.0 / 6.0),
                  near_singular_error);
}

TEST_CASE("contracted tensors") {
  const auto disk = spectral::build_workspace(make_ellipse(1, 1), 64);
  const complex<double> lambda(0.35, 0.0);
  const auto m = polarization_direct(disk.grid, disk.Kstar, lambda);
  const auto n = contracted_N(m);
  CHECK(std::abs(n.npp) < 1e-10);
  CHECK(std::abs(n.nmm) < 1e-10);
  CHECK(std::abs(n.npm - 2.0 * M_PI / lambda) < 1e-10);
  CHECK(std::abs(n.nmp - n.npm) < 1e-14);

  const auto ell = spectral::build_workspace(make_ellipse(2, 1), 256);
  const complex<double> l2(0.3, 0.0);
  const auto m2 = polarization_direct(ell.grid, ell.Kstar, l2);
  const auto n2 = contracted_N(m2);
  const auto ref = ellipse_closed_form(2, 1, l2);
  CHECK(std::abs(n2.npp - (ref(0, 0) - ref(1, 1))) < 1e-7);
  CHECK(std::abs(n2.npp.imag()) < 1e-10);

  // direct definition with e^{+-i theta_nu} densities
  const auto nd = contracted_N_direct(ell.grid, ell.Kstar, l2);
  CHECK(std::abs(nd.npp - n2.npp) < 1e-8 * std::abs(n2.npp));
  CHECK(std::abs(nd.npm - n2.npm) < 1e-8 * std::abs(n2.npm));
  CHECK(std::abs(nd.nmm - n2.nmm) < 1e-8 * std::abs(n2.nmm));
}

TEST_CASE("tensor invariances") {
  const auto w = spectral::build_workspace(make_ellipse(2, 1), 192);
  const complex<double> lambda(0.28, 0.02);

  // conjugation symmetry of the resolvent
  const auto m = polarization_direct(w.grid, w.Kstar, lambda);
  const auto mc = polarization_direct(w.grid, w.Kstar, std::conj(lambda));
  CHECK((mc.m - m.m.conjugate()).norm() < 1e-10 * m.m.norm());

  // scaling law M(lambda, sD) = s^2 M(lambda, D) at s = 1/2
  const auto half = spectral::build_workspace(make_ellipse(1, 0.5), 192);
  const auto mh = polarization_direct(half.grid, half.Kstar, lambda);
  CHECK((mh.m - 0.25 * m.m).norm() < 1e-8 * m.m.norm());

  // rotation covariance M(lambda, R D) = R M R^T
  const double th = M_PI / 4;
  const auto rot = spectral::build_workspace(make_ellipse(2, 1, {0, 0}, th),
                                             192);
  const auto mr = polarization_direct(rot.grid, rot.Kstar, lambda);
  Eigen::Matrix2d r;
  r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  const Eigen::Matrix2cd expected =
      r.cast<complex<double>>() * m.m * r.transpose().cast<complex<double>>();
  CHECK((mr.m - expected).norm() < 1e-8 * m.m.norm());

  // blow-up like 1/eps approaching the first eigenvalue
  std::vector<double> eps = {1e-2, 1e-3, 1e-4}, mags;
  for (double e : eps) {
    const auto near = polarization_direct(
        w.grid, w.Kstar, complex<double>(w.data.eigenvalues(0), e));
    mags.push_back(std::abs(near.m(0, 0)));
  }
  CHECK(oracle::loglog_slope(eps, mags) == doctest::Approx(-1.0).epsilon(0.02));
}
