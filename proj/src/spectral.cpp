#include "npspec/spectral.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace npspec::spectral {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Eigen::VectorXd bootstrap_phi0(const RealOperator& kstar,
                               const QuadGrid2D& grid) {
  Eigen::EigenSolver<MatrixXd> solver(kstar.matrix);
  const auto values = solver.eigenvalues();
  int best = 0;
  double best_dist = std::abs(values(0) - 0.5);
  for (int i = 1; i < values.size(); ++i) {
    const double d = std::abs(values(i) - 0.5);
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  if (best_dist > 1e-6)
    throw under_resolution_error(
        "no eigenvalue of K* near 1/2; grid too coarse");
  VectorXd phi0 = solver.eigenvectors().col(best).real();
  const double mass = grid.weights.dot(phi0);
  if (std::abs(mass) < 1e-12)
    throw numerical_error("phi0 has vanishing mean; cannot normalize");
  return phi0 / mass;
}

Eigen::MatrixXd h_star_gram(const RealOperator& stilde,
                            const QuadGrid2D& grid) {
  MatrixXd b = -(grid.weights.asDiagonal() * stilde.matrix);
  b = 0.5 * (b + b.transpose()).eval();
  Eigen::LLT<MatrixXd> llt(b);
  if (llt.info() != Eigen::Success)
    throw geometry_scale_error("H* Gram matrix is not positive definite");
  return b;
}

double hstar_inner(const Eigen::MatrixXd& b, const VectorXd& u,
                   const VectorXd& v) {
  return u.dot(b * v);
}

SpectralData eigensystem(const RealOperator& kstar, const MatrixXd& b,
                         const QuadGrid2D& grid, const VectorXd& phi0) {
  const int n = grid.n;
  const MatrixXd bk = b * kstar.matrix;
  const double selfadj =
      (bk - bk.transpose()).norm() / std::max(bk.norm(), 1e-300);
  if (selfadj > 1e-8)
    throw under_resolution_error(
        "K* is not self-adjoint in H* at this resolution (residual " +
        std::to_string(selfadj) + "); increase N");

  Eigen::LLT<MatrixXd> llt(b);
  if (llt.info() != Eigen::Success)
    throw geometry_scale_error("H* Gram matrix is not positive definite");
  const MatrixXd l = llt.matrixL();

  // C = L^{-1} (B K) L^{-T} is symmetric up to the residual above.
  MatrixXd c = l.triangularView<Eigen::Lower>().solve(bk);
  c = l.triangularView<Eigen::Lower>()
          .solve(c.transpose().eval())
          .transpose()
          .eval();
  c = 0.5 * (c + c.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(c);
  VectorXd values = solver.eigenvalues();
  MatrixXd vectors =
      l.transpose().triangularView<Eigen::Upper>().solve(solver.eigenvectors());

  for (int j = 0; j < n; ++j) {
    if (values(j) < -0.5 - 1e-8 || values(j) > 0.5 + 1e-8)
      throw under_resolution_error(
          "computed eigenvalue outside (-1/2, 1/2]: " +
          std::to_string(values(j)));
  }

  // Drop the lambda0 = 1/2 mode (stored separately as phi0), sort the rest
  // by |lambda| descending with positive values first on ties.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  int i0 = 0;
  for (int j = 1; j < n; ++j)
    if (std::abs(values(j) - 0.5) < std::abs(values(i0) - 0.5)) i0 = j;
  order.erase(std::find(order.begin(), order.end(), i0));
  std::stable_sort(order.begin(), order.end(), [&](int a, int bb) {
    return std::abs(values(a)) > std::abs(values(bb));
  });
  // 2D spectra pair up as +-lambda; within a near-tie put the positive
  // member first so regression data is deterministic.
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const double ma = std::abs(values(order[i]));
    const double mb = std::abs(values(order[i + 1]));
    if (ma - mb <= 1e-7 * std::max(ma, 1e-3) &&
        values(order[i]) < values(order[i + 1]))
      std::swap(order[i], order[i + 1]);
  }

  SpectralData data;
  data.grid_id = grid.id;
  data.lambda0 = values(i0);
  data.phi0 = phi0;
  data.gram = b;
  data.eigenvalues.resize(n - 1);
  data.eigenfunctions.resize(n, n - 1);
  for (int j = 0; j < n - 1; ++j) {
    data.eigenvalues(j) = values(order[j]);
    VectorXd v = vectors.col(order[j]);
    const double peak = v.cwiseAbs().maxCoeff();
    for (int i = 0; i < n; ++i) {
      if (std::abs(v(i)) > 0.1 * peak) {
        if (v(i) < 0) v = -v;
        break;
      }
    }
    data.eigenfunctions.col(j) = v;
  }
  return data;
}

Eigen::VectorXd project(const SpectralData& data, const std::vector<int>& J,
                        const VectorXd& psi) {
  VectorXd out = VectorXd::Zero(psi.size());
  const VectorXd bpsi = data.gram * psi;
  for (int j : J) {
    if (j == 0)
      throw configuration_error(
          "index 0 (the lambda = 1/2 mode) is excluded from resonance index "
          "sets");
    if (j < 1 || j > data.count())
      throw configuration_error("mode index out of range");
    const auto phi = data.eigenfunctions.col(j - 1);
    out += phi.dot(bpsi) * phi;
  }
  return out;
}

Workspace build_workspace(const geometry::BoundaryCurve2D& curve, int n) {
  Workspace w{geometry::discretize(curve, n), {}, {}, {}, {}, {}, {}, {}};
  w.S = operators2d::assemble_S(w.grid);
  w.K = operators2d::assemble_K(w.grid);
  w.Kstar = operators2d::assemble_Kstar(w.grid);
  const VectorXd phi0 = bootstrap_phi0(w.Kstar, w.grid);
  w.Stilde = operators2d::assemble_Stilde(w.grid, phi0);
  auto corr = operators2d::assemble_freq_correction(w.grid);
  w.S1 = std::move(corr.first);
  w.K1 = std::move(corr.second);
  const MatrixXd b = h_star_gram(w.Stilde, w.grid);
  w.data = eigensystem(w.Kstar, b, w.grid, phi0);
  return w;
}

}  // namespace npspec::spectral
