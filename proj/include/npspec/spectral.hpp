#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "npspec/operators2d.hpp"

namespace npspec::spectral {

using geometry::QuadGrid2D;
using operators2d::RealOperator;

// H*-orthonormal eigensystem of K*_D. eigenvalues are sorted by |lambda|
// descending (ties: positive first); lambda0 = 1/2 and phi0 are stored
// separately. Columns of eigenfunctions are B-orthonormal with the sign of
// the first significant component positive.
struct SpectralData {
  std::uint64_t grid_id = 0;
  double lambda0 = 0.5;
  Eigen::VectorXd phi0;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenfunctions;
  Eigen::MatrixXd gram;  // B, the H* inner product matrix

  int count() const { return int(eigenvalues.size()); }
};

// Eigendensity of K* nearest eigenvalue 1/2, from the plain (unsymmetrized)
// eigenproblem, normalized so (phi0, chi) = sum w_i phi0_i = 1. Needed
// before the H* inner product exists.
Eigen::VectorXd bootstrap_phi0(const RealOperator& kstar,
                               const QuadGrid2D& grid);

// B = -W S~ symmetrized; SPD by construction of S~.
Eigen::MatrixXd h_star_gram(const RealOperator& stilde,
                            const QuadGrid2D& grid);

// Generalized eigensolve of the B-self-adjoint matrix K via Cholesky
// reduction: B = L L^T, symmetric solve of L^T K L^{-T}, mapped back.
// Asserts the self-adjointness residual ||BK - K^T B|| / ||BK|| first.
SpectralData eigensystem(const RealOperator& kstar, const Eigen::MatrixXd& b,
                         const QuadGrid2D& grid, const Eigen::VectorXd& phi0);

// Spectral projection P_J psi = sum_{j in J} (psi, phi_j)_{H*} phi_j.
// Indices are 1-based over the sorted eigenvalues; 0 is rejected.
Eigen::VectorXd project(const SpectralData& data, const std::vector<int>& J,
                        const Eigen::VectorXd& psi);

// (u, v)_{H*} through the Gram matrix.
double hstar_inner(const Eigen::MatrixXd& b, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& v);

// Everything the downstream modules need from one grid.
struct Workspace {
  QuadGrid2D grid;
  RealOperator S;
  RealOperator K;
  RealOperator Kstar;
  RealOperator Stilde;
  RealOperator S1;
  RealOperator K1;
  SpectralData data;
};

Workspace build_workspace(const geometry::BoundaryCurve2D& curve, int n);

}  // namespace npspec::spectral
