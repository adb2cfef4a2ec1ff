#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>

#include "npspec/detail/bessel.hpp"
#include "npspec/operators2d.hpp"
#include "npspec/spectral.hpp"
#include "test_support.hpp"

using namespace npspec;
using namespace npspec::geometry;
using namespace npspec::operators2d;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using std::complex;

TEST_CASE("complex bessel series against the standard library on the real "
          "axis") {
  for (double x : {0.05, 0.3, 1.0, 2.5, 6.0}) {
    CHECK(detail::bessel_j0({x, 0}).real() ==
          doctest::Approx(std::cyl_bessel_j(0.0, x)).epsilon(1e-13));
    CHECK(detail::bessel_j1({x, 0}).real() ==
          doctest::Approx(std::cyl_bessel_j(1.0, x)).epsilon(1e-13));
    CHECK(detail::bessel_y0({x, 0}).real() ==
          doctest::Approx(std::cyl_neumann(0.0, x)).epsilon(1e-12));
    CHECK(detail::bessel_y1({x, 0}).real() ==
          doctest::Approx(std::cyl_neumann(1.0, x)).epsilon(1e-12));
  }
  // Wronskian J1 Y0 - J0 Y1 = 2/(pi z) off the real axis.
  for (complex<double> z : {complex<double>(0.4, 0.2),
                            complex<double>(1.5, 0.8),
                            complex<double>(-0.6, 0.9)}) {
    const complex<double> w = detail::bessel_j1(z) * detail::bessel_y0(z) -
                              detail::bessel_j0(z) * detail::bessel_y1(z);
    CHECK(std::abs(w - 2.0 / (M_PI * z)) < 1e-13);
  }
}

TEST_CASE("single layer on circles") {
  // Unit disk: log-capacity one, so S[chi] = 0 on the boundary.
  auto g = discretize(make_ellipse(1, 1), 64);
  auto s = assemble_S(g);
  CHECK((s.matrix * VectorXd::Ones(g.n)).cwiseAbs().maxCoeff() < 1e-13);

  // Radius 1/2: S[chi] = (1/2) log(1/2) chi.
  g = discretize(make_ellipse(0.5, 0.5), 64);
  s = assemble_S(g);
  const VectorXd v = s.matrix * VectorXd::Ones(g.n);
  for (int i = 0; i < g.n; ++i)
    CHECK(v(i) == doctest::Approx(0.5 * std::log(0.5)).epsilon(1e-13));
}

TEST_CASE("single layer is self-adjoint under the quadrature weights") {
  const auto g = discretize(make_ellipse(2, 1, {0, 0}, 0.3), 96);
  const auto s = assemble_S(g);
  const MatrixXd ws = g.weights.asDiagonal() * s.matrix;
  CHECK((ws - ws.transpose()).norm() / ws.norm() < 1e-10);
}

TEST_CASE("Neumann-Poincare operator on the unit disk") {
  const auto g = discretize(make_ellipse(1, 1), 64);
  const auto k = assemble_Kstar(g);
  // kernel is the constant 1/(4 pi)
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      CHECK(k.matrix(i, j) ==
            doctest::Approx(g.weights(j) / (4 * M_PI)).epsilon(1e-12));
  // K*[chi] = (1/2) chi and K*[mean-zero] = 0 on the disk
  const VectorXd ones = k.matrix * VectorXd::Ones(g.n);
  for (int i = 0; i < g.n; ++i)
    CHECK(ones(i) == doctest::Approx(0.5).epsilon(1e-13));
  VectorXd mean_zero(g.n);
  for (int i = 0; i < g.n; ++i) mean_zero(i) = std::cos(g.t(i));
  CHECK((k.matrix * mean_zero).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("double layer maps constants to 1/2 on any curve") {
  // The Gauss identity K[chi] = chi/2 holds for every closed curve; for K*
  // the same row action is 1/2 only on circles (constant kernel). The
  // discrete adjoint structure ties the two: K = W^{-1} (K*)^T W.
  for (const auto& curve :
       {make_ellipse(1, 1), make_ellipse(2, 1),
        make_fourier_star(1.0, {0, 0, 0.2})}) {
    const auto g = discretize(curve, 128);
    const auto k = assemble_K(g);
    const VectorXd row = k.matrix * VectorXd::Ones(g.n);
    for (int i = 0; i < g.n; ++i)
      CHECK(row(i) == doctest::Approx(0.5).epsilon(1e-10));

    const auto kstar = assemble_Kstar(g);
    const MatrixXd adj = g.weights.asDiagonal().inverse() *
                         kstar.matrix.transpose() * g.weights.asDiagonal();
    CHECK((adj - k.matrix).norm() < 1e-12 * k.matrix.norm());
  }
}

TEST_CASE("substitute single layer") {
  const auto g = discretize(make_ellipse(0.5, 0.5), 64);
  const auto kstar = assemble_Kstar(g);
  const VectorXd phi0 = spectral::bootstrap_phi0(kstar, g);
  const auto st = assemble_Stilde(g, phi0);
  const auto s = assemble_S(g);

  // S~[phi0] = -chi
  const VectorXd image = st.matrix * phi0;
  for (int i = 0; i < g.n; ++i)
    CHECK(image(i) == doctest::Approx(-1.0).epsilon(1e-12));

  // S~ = S on mean-zero densities
  VectorXd psi(g.n);
  for (int i = 0; i < g.n; ++i) psi(i) = std::sin(2 * g.t(i));
  psi -= VectorXd::Constant(g.n, g.weights.dot(psi) / g.weights.sum());
  CHECK((st.matrix * psi - s.matrix * psi).cwiseAbs().maxCoeff() < 1e-12);

  // -S~ SPD: smallest Rayleigh quotient of the weighted form is positive
  MatrixXd b = -(g.weights.asDiagonal() * st.matrix);
  b = 0.5 * (b + b.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(b);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("frequency-correction kernels") {
  const auto g = discretize(make_ellipse(1, 1), 64);
  const auto [s1, k1] = assemble_freq_correction(g);

  // K1[chi] on the unit disk: oracle -(1/4pi) int (1 - cos(t-s)) ds = -1/2.
  const double oracle_value =
      -oracle::integrate([](double s) { return 1.0 - std::cos(s); }, 0.0,
                         2.0 * M_PI) /
      (4.0 * M_PI);
  CHECK(oracle_value == doctest::Approx(-0.5).epsilon(1e-13));
  const VectorXd k1_chi = k1.matrix * VectorXd::Ones(g.n);
  for (int i = 0; i < g.n; ++i)
    CHECK(k1_chi(i) == doctest::Approx(oracle_value).epsilon(1e-12));

  // S1 weighted-symmetric (kernel depends on |x-y| only)
  const MatrixXd ws = g.weights.asDiagonal() * s1.matrix;
  CHECK((ws - ws.transpose()).norm() < 1e-12 * ws.norm());
}

TEST_CASE("frequency-correction kernels scale like s^3") {
  const auto big = discretize(make_ellipse(2, 1), 64);
  const auto small = discretize(make_ellipse(1, 0.5), 64);
  const auto [s1_big, k1_big] = assemble_freq_correction(big);
  const auto [s1_small, k1_small] = assemble_freq_correction(small);
  CHECK((s1_small.matrix - 0.125 * s1_big.matrix).norm() <
        1e-14 * s1_big.matrix.norm());
}

TEST_CASE("helmholtz operators approach the static ones") {
  const auto g = discretize(make_ellipse(1, 1), 96);
  const auto s = assemble_S(g);
  const auto kstar = assemble_Kstar(g);

  CHECK_THROWS_AS(assemble_helmholtz(g, 0.0), configuration_error);

  std::vector<double> ks = {1e-2, 1e-3}, errs;
  for (double k : ks) {
    const auto [sk, kk] = assemble_helmholtz(g, k);
    Eigen::MatrixXcd expected = s.matrix.cast<complex<double>>();
    const complex<double> tk = tau_k(k);
    for (int i = 0; i < g.n; ++i)
      expected.row(i) += tk * g.weights.transpose().cast<complex<double>>();
    errs.push_back((sk.matrix - expected).norm());

    if (k == 1e-3)
      CHECK((kk.matrix - kstar.matrix.cast<complex<double>>()).norm() < 1e-5);
  }
  CHECK(oracle::loglog_slope(ks, errs) >= 1.8);
}

TEST_CASE("helmholtz single layer is weighted-symmetric") {
  const auto g = discretize(make_ellipse(2, 1), 64);
  const auto [sk, kk] = assemble_helmholtz(g, complex<double>(0.4, 0.1));
  const Eigen::MatrixXcd ws = g.weights.asDiagonal() * sk.matrix;
  CHECK((ws - ws.transpose()).norm() / ws.norm() < 1e-10);
}

TEST_CASE("Calderon identity and the phi0 annihilation") {
  for (const auto& curve :
       {make_ellipse(2, 1), make_fourier_star(1.0, {0, 0, 0.2})}) {
    const auto g = discretize(curve, 256);
    const auto kstar = assemble_Kstar(g);
    const auto kd = assemble_K(g);
    const VectorXd phi0 = spectral::bootstrap_phi0(kstar, g);
    const auto st = assemble_Stilde(g, phi0);

    const MatrixXd lhs = kd.matrix * st.matrix;
    const MatrixXd rhs = st.matrix * kstar.matrix;
    CHECK((lhs - rhs).norm() / st.matrix.norm() < 1e-8);

    // (-1/2 Id + K*) S~^{-1}[chi] = 0, and with the opposite sign of the
    // half identity as well.
    const VectorXd inv_chi =
        st.matrix.partialPivLu().solve(VectorXd::Ones(g.n));
    const VectorXd r1 = kstar.matrix * inv_chi - 0.5 * inv_chi;
    const VectorXd r2 = 0.5 * inv_chi - kstar.matrix * inv_chi;
    CHECK(r1.norm() < 1e-8 * inv_chi.norm());
    CHECK(r2.norm() < 1e-8 * inv_chi.norm());
  }
}

TEST_CASE("trace formula by off-boundary extrapolation") {
  const auto ell = make_ellipse(2, 1);
  const auto g = discretize(ell, 512);
  const auto kstar = assemble_Kstar(g);

  VectorXd psi(g.n);
  for (int i = 0; i < g.n; ++i) psi(i) = std::cos(2 * g.t(i));
  const VectorXd trace = kstar.matrix * psi - 0.5 * psi;

  // nu . grad of the single-layer potential at interior points x - eps nu,
  // by quadrature of the differentiated kernel, extrapolated to eps -> 0.
  auto normal_derivative = [&](const Eigen::Vector2d& x,
                               const Eigen::Vector2d& nu) {
    double sum = 0.0;
    for (int j = 0; j < g.n; ++j) {
      const Eigen::Vector2d d = x - Eigen::Vector2d(g.points.col(j));
      sum += g.weights(j) / (2 * M_PI) * d.dot(nu) / d.squaredNorm() * psi(j);
    }
    return sum;
  };
  double worst = 0.0;
  for (int i = 0; i < g.n; i += 32) {
    const Eigen::Vector2d x = g.points.col(i), nu = g.normals.col(i);
    const double v1 = normal_derivative(x - 0.05 * nu, nu);
    const double v2 = normal_derivative(x - 0.10 * nu, nu);
    const double v3 = normal_derivative(x - 0.15 * nu, nu);
    const double extrapolated = 3 * v1 - 3 * v2 + v3;
    worst = std::max(worst, std::abs(extrapolated - trace(i)));
  }
  CHECK(worst < 5e-3);
}
