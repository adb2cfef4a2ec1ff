#include "npspec/operators2d.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "npspec/detail/bessel.hpp"

namespace npspec::operators2d {
namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using std::complex;

// Weights R(d) of the exact rule for int_0^{2pi} f(s) log(4 sin^2((t-s)/2)) ds
// at equidistant nodes; d = (i - j) mod N.
VectorXd log_rule_weights(int n) {
  VectorXd r(n);
  for (int d = 0; d < n; ++d) {
    double sum = 0.0;
    for (int m = 1; m < n / 2; ++m)
      sum += std::cos(2.0 * M_PI * m * d / n) / m;
    r(d) = -(4.0 * M_PI / n) * sum - (4.0 * M_PI / (n * n)) * ((d % 2) ? -1.0 : 1.0);
  }
  return r;
}

double dist(const QuadGrid2D& g, int i, int j) {
  return (g.points.col(i) - g.points.col(j)).norm();
}

}  // namespace

std::complex<double> tau_k(std::complex<double> k) {
  return (std::log(k) + detail::euler_gamma - std::log(2.0)) / (2.0 * M_PI) -
         complex<double>(0.0, 0.25);
}

RealOperator assemble_S(const QuadGrid2D& g) {
  const int n = g.n;
  const double h = 2.0 * M_PI / n;
  const VectorXd r = log_rule_weights(n);
  MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      // log|x-y| = (1/2) log(4 sin^2((t-s)/2)) + smooth, smooth(t,t) = log|x'|
      const double m1 = 0.5 / (2.0 * M_PI);
      double m2;
      if (i == j) {
        m2 = std::log(g.speed(i)) / (2.0 * M_PI);
      } else {
        const double sin_half = std::abs(std::sin(0.5 * (g.t(i) - g.t(j))));
        m2 = std::log(dist(g, i, j) / (2.0 * sin_half)) / (2.0 * M_PI);
      }
      a(i, j) = (r((i - j + n) % n) * m1 + h * m2) * g.speed(j);
    }
  }
  return {std::move(a), g.id, g.id, "laplace_single_layer"};
}

RealOperator assemble_Kstar(const QuadGrid2D& g) {
  const int n = g.n;
  MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        a(i, i) = g.curvature(i) / (4.0 * M_PI) * g.weights(i);
      } else {
        const Eigen::Vector2d d = g.points.col(i) - g.points.col(j);
        a(i, j) = d.dot(g.normals.col(i)) / (2.0 * M_PI * d.squaredNorm()) *
                  g.weights(j);
      }
    }
  }
  return {std::move(a), g.id, g.id, "neumann_poincare"};
}

RealOperator assemble_K(const QuadGrid2D& g) {
  const int n = g.n;
  MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        a(i, i) = g.curvature(i) / (4.0 * M_PI) * g.weights(i);
      } else {
        const Eigen::Vector2d d = g.points.col(j) - g.points.col(i);
        a(i, j) = d.dot(g.normals.col(j)) / (2.0 * M_PI * d.squaredNorm()) *
                  g.weights(j);
      }
    }
  }
  return {std::move(a), g.id, g.id, "double_layer"};
}

RealOperator assemble_Stilde(const QuadGrid2D& g, const VectorXd& phi0) {
  const RealOperator s = assemble_S(g);
  const int n = g.n;
  const double mass = g.weights.dot(phi0);
  if (std::abs(mass - 1.0) > 1e-8)
    throw numerical_error("phi0 must satisfy (phi0, chi) = 1");

  // S~ = S (I - phi0 w^T) - 1 w^T, so S~[phi0] = -chi and S~ = S on the
  // mean-zero subspace.
  MatrixXd a = s.matrix;
  const VectorXd s_phi0 = s.matrix * phi0;
  for (int i = 0; i < n; ++i)
    a.row(i) -= (s_phi0(i) + 1.0) * g.weights.transpose();

  // -S~ must define an SPD form under the quadrature weights. A failure here
  // means the grid is unresolved (or phi0 is wrong); rescaling the curve and
  // mapping back via the scale laws is the recovery path.
  MatrixXd b = -(g.weights.asDiagonal() * a);
  b = 0.5 * (b + b.transpose()).eval();
  Eigen::LLT<MatrixXd> llt(b);
  if (llt.info() != Eigen::Success)
    throw geometry_scale_error(
        "-S~ is not positive definite on this grid; rescale the curve below "
        "unit diameter or refine the grid");

  return {std::move(a), g.id, g.id, "substitute_single_layer"};
}

std::pair<RealOperator, RealOperator> assemble_freq_correction(
    const QuadGrid2D& g) {
  const int n = g.n;
  MatrixXd s1(n, n), k1(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Eigen::Vector2d d = g.points.col(i) - g.points.col(j);
      s1(i, j) = -d.squaredNorm() / (8.0 * M_PI) * g.weights(j);
      k1(i, j) = -d.dot(g.normals.col(i)) / (4.0 * M_PI) * g.weights(j);
    }
  }
  return {RealOperator{std::move(s1), g.id, g.id, "freq_correction_S1"},
          RealOperator{std::move(k1), g.id, g.id, "freq_correction_K1"}};
}

std::pair<ComplexOperator, ComplexOperator> assemble_helmholtz(
    const QuadGrid2D& g, complex<double> k) {
  if (k == complex<double>(0.0, 0.0))
    throw configuration_error(
        "assemble_helmholtz requires k != 0; use the Laplace assemblers");
  const int n = g.n;
  const double h = 2.0 * M_PI / n;
  const VectorXd r = log_rule_weights(n);
  const complex<double> i_unit(0.0, 1.0);

  MatrixXcd s(n, n), kst(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double rw = r((i - j + n) % n);
      if (i == j) {
        // Diagonal limits of the smooth parts.
        const complex<double> s_diag =
            tau_k(k) + std::log(g.speed(i)) / (2.0 * M_PI);
        s(i, i) = (rw * (1.0 / (4.0 * M_PI)) + h * s_diag) * g.speed(i);
        kst(i, i) = h * g.curvature(i) / (4.0 * M_PI) * g.speed(i);
        continue;
      }
      const Eigen::Vector2d d = g.points.col(i) - g.points.col(j);
      const double rij = d.norm();
      const complex<double> z = k * rij;
      const double log4sin2 =
          std::log(4.0 * std::pow(std::sin(0.5 * (g.t(i) - g.t(j))), 2));

      // S^k: M1 = (1/4pi) J0(k r) multiplies the log factor.
      const complex<double> m_full = -0.25 * i_unit * detail::hankel1_0(z);
      const complex<double> m1 = detail::bessel_j0(z) / (4.0 * M_PI);
      s(i, j) = (rw * m1 + h * (m_full - m1 * log4sin2)) * g.speed(j);

      // (K^k)*: L1 = -(k/4pi) J1(k r) q with q = <x-y,nu(x)>/r.
      const double q = d.dot(g.normals.col(i)) / rij;
      const complex<double> l_full =
          0.25 * i_unit * k * detail::hankel1_1(z) * q;
      const complex<double> l1 = -k * detail::bessel_j1(z) * q / (4.0 * M_PI);
      kst(i, j) = (rw * l1 + h * (l_full - l1 * log4sin2)) * g.speed(j);
    }
  }
  return {ComplexOperator{std::move(s), g.id, g.id, "helmholtz_single_layer"},
          ComplexOperator{std::move(kst), g.id, g.id, "helmholtz_np"}};
}

}  // namespace npspec::operators2d
