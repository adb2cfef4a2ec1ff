#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "npspec/crosssec.hpp"
#include "test_support.hpp"

using namespace npspec;
using namespace npspec::crosssec;
using namespace npspec::polarization;
using std::complex;

namespace {

PolarizationTensor tensor3(const Eigen::Matrix3cd& m,
                           complex<double> lambda = {0.2, 0.01}) {
  return {3, m, lambda};
}

Eigen::Matrix3cd random_symmetric(std::mt19937& rng) {
  std::normal_distribution<double> gauss;
  Eigen::Matrix3cd m;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      m(i, j) = complex<double>(gauss(rng), gauss(rng));
      m(j, i) = m(i, j);
    }
  return m;
}

}  // namespace

TEST_CASE("far-field amplitude") {
  const double k = 0.3;
  const auto iso = tensor3(2.5 * Eigen::Matrix3cd::Identity());
  Eigen::VectorXd d(3), x(3);
  d << 1, 0, 0;
  x << 0, 1, 0;
  CHECK(std::abs(far_field_amplitude(iso, k, d, x)) < 1e-15);
  CHECK(std::abs(far_field_amplitude(iso, k, d, d) - (-k * k * 2.5)) < 1e-15);

  std::mt19937 rng(3);
  const auto m1 = tensor3(random_symmetric(rng));
  const auto m2 = tensor3(random_symmetric(rng));
  auto sum = m1;
  sum.m += m2.m;
  Eigen::VectorXd xh(3);
  xh << 0.36, -0.48, 0.8;
  CHECK(std::abs(far_field_amplitude(sum, k, d, xh) -
                 far_field_amplitude(m1, k, d, xh) -
                 far_field_amplitude(m2, k, d, xh)) < 1e-13);

  // 2D tensors use the same contraction
  PolarizationTensor disk{2, (M_PI / 0.25) * Eigen::Matrix2cd::Identity(),
                          0.25};
  Eigen::VectorXd d2(2);
  d2 << 1, 0;
  CHECK(std::abs(far_field_amplitude(disk, k, d2, d2) -
                 (-k * k * M_PI / 0.25)) < 1e-12);

  // non-unit directions are normalized (with a stderr warning)
  Eigen::VectorXd long_d(3), long_x(3);
  long_d << 2, 0, 0;
  long_x << 0, 0, -3;
  CHECK(std::abs(far_field_amplitude(m1, k, long_d, long_x) -
                 far_field_amplitude(m1, k, long_d / 2, long_x / 3)) <
        1e-13);
}

TEST_CASE("averaged cross-sections") {
  const double k = 0.01;
  const double eps = 1e-2;
  const auto m = ellipsoid_polarization(1, 1, 1, {1.0 / 6.0, eps});
  const auto q = averaged_cross_sections(m, k);
  // Tr M = 3 (4pi/3)/(i eps), so the averaged extinction is 4 pi k/(3 eps)
  CHECK(q.q_ext ==
        doctest::Approx(4 * M_PI * k / (3 * eps)).epsilon(1e-12));
  CHECK(q.q_ext == doctest::Approx(q.q_s + q.q_a).epsilon(1e-12));
  CHECK(q.q_ext > 0.0);
  CHECK_FALSE(q.q_a_negative);

  // real lambda away from the spectrum: no extinction at this order
  const auto real_m = ellipsoid_polarization(1, 1, 1, 0.4);
  CHECK(averaged_cross_sections(real_m, k).q_ext == 0.0);

  // scaling in k: Q_s by 16, Q_ext by 2
  const auto q2 = averaged_cross_sections(m, 2 * k);
  CHECK(q2.q_s == doctest::Approx(16 * q.q_s).epsilon(1e-13));
  CHECK(q2.q_ext == doctest::Approx(2 * q.q_ext).epsilon(1e-13));

  PolarizationTensor flat{2, Eigen::Matrix2cd::Identity(), 0.3};
  CHECK_THROWS_AS(averaged_cross_sections(flat, k), configuration_error);
}

TEST_CASE("optical theorem residual vanishes on quadratic integrands") {
  const double k = 0.45;
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = tensor3(random_symmetric(rng));
    CHECK(optical_theorem_check(m, k) < 1e-10 * (1.0 + m.m.norm()));
  }
  // diagonal real tensor: both sides vanish
  Eigen::Matrix3cd diag = Eigen::Matrix3cd::Zero();
  diag.diagonal() << 1.0, 2.0, 3.0;
  CHECK(optical_theorem_check(tensor3(diag), k) < 1e-15);
  // isotropic imaginary tensor: exact agreement
  CHECK(optical_theorem_check(
            tensor3(complex<double>(0, 1) * Eigen::Matrix3cd::Identity()),
            k) < 1e-15);
}

TEST_CASE("bound formulas") {
  const double vol = 2.0;
  // d = 2 has no linear term: the bound is even in lambda'
  CHECK(bound_general({0.3, 0.01}, vol, 2) ==
        doctest::Approx(bound_general({-0.3, 0.01}, vol, 2)).epsilon(1e-14));

  // lambda' = 0 closed forms
  const double lpp = 0.02;
  CHECK(bound_general({0.0, lpp}, vol, 3) ==
        doctest::Approx(3 * vol * 0.25 / (lpp * lpp * lpp) +
                        3 * vol / lpp).epsilon(1e-13));
  CHECK(bound_ellipse({0.0, lpp}, vol) ==
        doctest::Approx(2 * vol / lpp).epsilon(1e-14));

  CHECK(bound_general({0.3, 0.0}, vol, 2) ==
        std::numeric_limits<double>::infinity());

  // sphere: s.s = 1/3
  const auto s = s_factors(1, 1, 1);
  CHECK(s[0] * s[0] + s[1] * s[1] + s[2] * s[2] ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("ellipse bound against the closed-form trace") {
  const double area = 2 * M_PI;
  const double l1 = 1.0 / 6.0;
  auto imtr = [&](complex<double> lambda) {
    const complex<double> m11 = area / (lambda - l1);
    const complex<double> m22 = area / (lambda + l1);
    return std::abs((m11 + m22).imag());
  };

  // dominated on the sweep with 5% slack
  for (double lp = -0.45; lp <= 0.451; lp += 0.05)
    for (double lpp : {0.005, 0.01, 0.02})
      CHECK(imtr({lp, lpp}) <= bound_ellipse({lp, lpp}, area) * 1.05);

  // tight at lambda' = lambda_1 as lambda'' -> 0
  double previous = 1e9;
  for (double lpp : {1e-2, 1e-3, 1e-4}) {
    const double ratio = bound_ellipse({l1, lpp}, area) / imtr({l1, lpp});
    CHECK(ratio >= 1.0 - 1e-9);
    CHECK(ratio <= previous + 1e-12);
    previous = ratio;
  }
  CHECK(previous < 1.0 + 1e-6);
}

TEST_CASE("ellipsoid bounds dominate the closed-form extinction") {
  for (const auto& axes :
       {std::array<double, 3>{1, 1, 1}, std::array<double, 3>{2, 1, 1}}) {
    const auto s = s_factors(axes[0], axes[1], axes[2]);
    const double vol = 4 * M_PI / 3 * axes[0] * axes[1] * axes[2];
    for (double lp = -0.45; lp <= 0.451; lp += 0.05) {
      for (double lpp : {0.005, 0.01, 0.02}) {
        const complex<double> lambda(lp, lpp);
        const auto m =
            ellipsoid_polarization(axes[0], axes[1], axes[2], lambda);
        const double imtr = std::abs(m.m.trace().imag());
        CHECK(imtr <= bound_ellipsoid(lambda, vol, s) * 1.05);
        if (axes[0] == 1.0)  // sphere: s.s = 1/3 < 3/4 + extra terms
          CHECK(bound_ellipsoid(lambda, vol, s) <=
                bound_general(lambda, vol, 3) * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("enhancement sweep peaks at the quasi-static resonance") {
  using namespace npspec::resonance;
  const DrudeModel model{1.0, 0.8, 0.1, 1e4};
  const auto mat = make_material(1.0, 1.0, {1.0, 0.0}, model);

  std::vector<double> omegas(161);
  for (int i = 0; i < 161; ++i) omegas[i] = 0.12 + (0.3 - 0.12) * i / 160.0;
  const auto rows = enhancement_sweep_ellipsoid(1, 1, 1, mat, omegas);

  int peak = 0;
  for (int i = 0; i < int(rows.size()); ++i)
    if (rows[i].value > rows[peak].value) peak = i;
  const auto reports = find_resonances(mat, {1.0 / 6.0}, 0.12, 0.3, 0.01);
  REQUIRE(reports.size() == 1);
  const double step = omegas[1] - omegas[0];
  CHECK(std::abs(rows[peak].omega - reports[0].omega_quasi_static) <=
        step + 1e-12);

  // off-window: far above the resonance mu_c approaches mu0(1-F) > 0 and
  // lambda sits outside the spectrum
  std::vector<double> low(41);
  for (int i = 0; i < 41; ++i) low[i] = 0.5 + 0.0125 * i;
  const auto quiet = enhancement_sweep_ellipsoid(1, 1, 1, mat, low);
  double base = quiet.front().value, top = base;
  for (const auto& row : quiet) {
    base = std::min(base, row.value);
    top = std::max(top, row.value);
  }
  CHECK(top < 10 * std::max(base, 1e-12));

  // bounds hold along the resonant sweep as well
  for (const auto& row : rows)
    CHECK(row.value <= row.bound_shape_v * 1.05);
}

TEST_CASE("2D enhancement sweep compares against the ellipse bound") {
  using namespace npspec::resonance;
  const auto w = spectral::build_workspace(geometry::make_ellipse(2, 1), 128);
  const DrudeModel model{1.0, 0.8, 0.1, 1e4};
  const auto mat = make_material(1.0, 1.0, {1.0, 0.0}, model);
  std::vector<double> omegas(41);
  for (int i = 0; i < 41; ++i) omegas[i] = 0.12 + 0.004 * i;
  const auto rows = enhancement_sweep_2d(w, mat, omegas);
  for (const auto& row : rows) {
    CHECK(row.value <= row.bound_shape_v * 1.05);
    CHECK(row.value <= row.bound_general_v * 1.05);
  }
}
