#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>

#include "npspec/geometry2d.hpp"

namespace npspec::operators2d {

using geometry::QuadGrid2D;

// Dense matrix acting on nodal density samples: (A psi)_i approximates
// \int kernel(x_i, y) psi(y) dsigma(y) with the quadrature weights folded in.
template <typename Scalar>
struct NodalOperator {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> matrix;
  std::uint64_t source_grid = 0;
  std::uint64_t target_grid = 0;
  std::string kernel;
};

using RealOperator = NodalOperator<double>;
using ComplexOperator = NodalOperator<std::complex<double>>;

// Laplace single layer, kernel (1/2pi) log|x-y|, log-splitting quadrature:
// the periodic log factor log(4 sin^2((t-s)/2)) integrated by the exact
// trigonometric rule, the analytic remainder by the plain trapezoid rule.
RealOperator assemble_S(const QuadGrid2D& grid);

// Neumann-Poincare operator, kernel <x-y, nu(x)> / (2pi |x-y|^2),
// diagonal set to the curvature limit kappa_i/(4pi).
RealOperator assemble_Kstar(const QuadGrid2D& grid);

// Double layer K_D, kernel <y-x, nu(y)> / (2pi |x-y|^2); the L^2(w)-adjoint
// of K*_D at the discrete level.
RealOperator assemble_K(const QuadGrid2D& grid);

// Invertible substitute for S_D: S~[psi] = S[psi - a phi0] - a chi with
// a = (psi, chi). The sign on the chi branch is fixed so that -S~ is
// positive definite; the bilinear form is verified by factorization.
// phi0 must be the K* eigendensity at 1/2 with (phi0, chi) = 1.
RealOperator assemble_Stilde(const QuadGrid2D& grid,
                             const Eigen::VectorXd& phi0);

// Leading frequency-correction kernels of the k-expansion:
//   S1: -|x-y|^2 / (8 pi),   K1: -<x-y, nu(x)> / (4 pi).
std::pair<RealOperator, RealOperator> assemble_freq_correction(
    const QuadGrid2D& grid);

// Helmholtz single layer -(i/4) H0^(1)(k|x-y|) and its nu(x)-derivative
// (i k/4) H1^(1)(k|x-y|) <x-y,nu(x)>/|x-y|, both with log-splitting
// quadrature. Principal log branch; requires k != 0 (use the Laplace
// assemblers for the static kernels).
std::pair<ComplexOperator, ComplexOperator> assemble_helmholtz(
    const QuadGrid2D& grid, std::complex<double> k);

// tau_k = (1/2pi)(log k + gamma - log 2) - i/4, the constant term that
// separates S^k from S at small k.
std::complex<double> tau_k(std::complex<double> k);

}  // namespace npspec::operators2d
