#include "npspec/scatcoef.hpp"

#include <Eigen/LU>
#include <cmath>

#include "npspec/detail/bessel.hpp"

namespace npspec::scatcoef {

using Eigen::MatrixXcd;
using Eigen::Vector2d;
using Eigen::VectorXcd;

namespace {

constexpr complex<double> kImag{0.0, 1.0};

// Hager-style 1-norm condition estimate.
double condest(const Eigen::PartialPivLU<MatrixXcd>& lu, const MatrixXcd& a) {
  const int n = int(a.rows());
  VectorXcd x = VectorXcd::Constant(n, 1.0 / n);
  double est = 0.0;
  int last = -1;
  for (int iter = 0; iter < 5; ++iter) {
    const VectorXcd y = lu.solve(x);
    est = y.cwiseAbs().sum();
    VectorXcd xi(n);
    for (int i = 0; i < n; ++i) {
      const double m = std::abs(y(i));
      xi(i) = m > 0 ? y(i) / m : complex<double>(1.0, 0.0);
    }
    const VectorXcd z = lu.adjoint().solve(xi);
    int j = 0;
    z.cwiseAbs().maxCoeff(&j);
    if (j == last || std::abs(z(j)) <= std::abs(z.dot(x))) break;
    x = VectorXcd::Zero(n);
    x(j) = 1.0;
    last = j;
  }
  return est * a.cwiseAbs().colwise().sum().maxCoeff();
}

// J_m(k r) e^{i m theta} and its normal derivative at a boundary node.
struct CylindricalWave {
  complex<double> value;
  complex<double> normal_derivative;
};

CylindricalWave cylindrical_wave(int m, double k, const Vector2d& x,
                                 const Vector2d& nu) {
  const double r = x.norm();
  if (r < 1e-14)
    throw configuration_error("boundary touches the origin of the source");
  const double theta = std::atan2(x.y(), x.x());
  const complex<double> phase = std::exp(kImag * double(m) * theta);
  const double jm = detail::bessel_jn(m, k * r);
  const double jp = 0.5 * (detail::bessel_jn(m - 1, k * r) -
                           detail::bessel_jn(m + 1, k * r));
  const Vector2d er = x / r;
  const Vector2d et(-er.y(), er.x());
  const complex<double> grad_r = k * jp * phase;
  const complex<double> grad_t = kImag * double(m) / r * jm * phase;
  return {jm * phase, grad_r * er.dot(nu) + grad_t * et.dot(nu)};
}

}  // namespace

DensityPair solve_psi_m(const QuadGrid2D& grid, const Material& mat,
                        double omega, int m) {
  const complex<double> mu_c = resonance::mu_c_at(mat, omega);
  const double k_m = omega * std::sqrt(mat.eps_m * mat.mu_m);
  const complex<double> k_c = omega * std::sqrt(mat.eps_c * mu_c);
  const auto [sm, km] = operators2d::assemble_helmholtz(grid, k_m);
  const auto [sc, kc] = operators2d::assemble_helmholtz(grid, k_c);

  const int n = grid.n;
  MatrixXcd sys(2 * n, 2 * n);
  const MatrixXcd id = MatrixXcd::Identity(n, n);
  sys.topLeftCorner(n, n) = sm.matrix;
  sys.topRightCorner(n, n) = -sc.matrix;
  sys.bottomLeftCorner(n, n) = (0.5 * id + km.matrix) / mat.mu_m;
  sys.bottomRightCorner(n, n) = (0.5 * id - kc.matrix) / mu_c;

  VectorXcd rhs(2 * n);
  for (int i = 0; i < n; ++i) {
    const CylindricalWave wave = cylindrical_wave(
        m, k_m, grid.points.col(i), grid.normals.col(i));
    rhs(i) = -wave.value;
    rhs(n + i) = -wave.normal_derivative / mat.mu_m;
  }

  Eigen::PartialPivLU<MatrixXcd> lu(sys);
  DensityPair out;
  out.condition_estimate = condest(lu, sys);
  if (out.condition_estimate > 1e12)
    throw numerical_error(
        "transmission system is ill-conditioned (estimate " +
        std::to_string(out.condition_estimate) +
        "); reduce omega or increase N");
  const VectorXcd sol = lu.solve(rhs);
  out.psi = sol.head(n);
  out.phi = sol.tail(n);
  return out;
}

complex<double> scattering_coefficient(const QuadGrid2D& grid,
                                       const VectorXcd& psi_m, int n,
                                       double k_m) {
  complex<double> sum = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    const Vector2d x = grid.points.col(i);
    const double r = x.norm();
    const double theta = std::atan2(x.y(), x.x());
    sum += grid.weights(i) * detail::bessel_jn(n, k_m * r) *
           std::exp(-kImag * double(n) * theta) * psi_m(i);
  }
  return sum;
}

ScatteringCoefficients compute_all(const QuadGrid2D& grid, const Material& mat,
                                   double omega, int n_max) {
  if (n_max < 1) throw configuration_error("n_max must be at least 1");
  ScatteringCoefficients sc;
  sc.n_max = n_max;
  sc.omega = omega;
  sc.k_m = omega * std::sqrt(mat.eps_m * mat.mu_m);
  sc.w.resize(2 * n_max + 1, 2 * n_max + 1);
  for (int m = -n_max; m <= n_max; ++m) {
    const DensityPair densities = solve_psi_m(grid, mat, omega, m);
    for (int n = -n_max; n <= n_max; ++n)
      sc.w(n + n_max, m + n_max) =
          scattering_coefficient(grid, densities.psi, n, sc.k_m);
  }
  return sc;
}

Eigen::Matrix2cd W1_matrix(const ScatteringCoefficients& sc) {
  const complex<double> wpp = sc.at(1, 1), wmp = sc.at(-1, 1),
                        wpm = sc.at(1, -1);
  Eigen::Matrix2cd w1;
  w1(0, 0) = wmp + wpm - 2.0 * wpp;
  w1(0, 1) = kImag * (wpm - wmp);
  w1(1, 0) = kImag * (wpm - wmp);
  w1(1, 1) = -wmp - wpm - 2.0 * wpp;
  return w1;
}

complex<double> evaluate_scattered_field(const QuadGrid2D& grid,
                                         const VectorXcd& psi, double k_m,
                                         Vector2d x) {
  complex<double> sum = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    const double r = (x - Vector2d(grid.points.col(i))).norm();
    sum += grid.weights(i) * (-0.25 * kImag) *
           (detail::bessel_jn(0, k_m * r) +
            kImag * detail::bessel_yn(0, k_m * r)) *
           psi(i);
  }
  return sum;
}

complex<double> synthesize_scattered_field(const ScatteringCoefficients& sc,
                                           double theta_d, Vector2d x) {
  const double r = x.norm();
  const double theta = std::atan2(x.y(), x.x());
  complex<double> sum = 0.0;
  for (int n = -sc.n_max; n <= sc.n_max; ++n) {
    const complex<double> hn = detail::bessel_jn(n, sc.k_m * r) +
                               kImag * detail::bessel_yn(n, sc.k_m * r);
    complex<double> inner = 0.0;
    for (int m = -sc.n_max; m <= sc.n_max; ++m)
      inner += sc.at(n, m) *
               std::exp(kImag * double(m) * (0.5 * M_PI - theta_d));
    sum += hn * std::exp(kImag * double(n) * theta) * inner;
  }
  return -0.25 * kImag * sum;
}

Eigen::VectorXcd reduced_rhs(const QuadGrid2D& grid, const Material& mat,
                             double omega, int m) {
  const complex<double> mu_c = resonance::mu_c_at(mat, omega);
  const double k_m = omega * std::sqrt(mat.eps_m * mat.mu_m);
  const complex<double> k_c = omega * std::sqrt(mat.eps_c * mu_c);
  const auto [sc_op, kc_op] = operators2d::assemble_helmholtz(grid, k_c);

  const int n = grid.n;
  VectorXcd f1(n), f2(n);
  for (int i = 0; i < n; ++i) {
    const CylindricalWave wave = cylindrical_wave(
        m, k_m, grid.points.col(i), grid.normals.col(i));
    f1(i) = -wave.value;
    f2(i) = -wave.normal_derivative / mat.mu_m;
  }
  Eigen::PartialPivLU<MatrixXcd> lu(sc_op.matrix);
  const VectorXcd inv_f1 = lu.solve(f1);
  return f2 + (0.5 * inv_f1 - kc_op.matrix * inv_f1) / mu_c;
}

}  // namespace npspec::scatcoef
