#pragma once

#include <Eigen/Dense>
#include <complex>

#include "npspec/resonance.hpp"
#include "npspec/spectral.hpp"

namespace npspec::scatcoef {

using geometry::QuadGrid2D;
using resonance::Material;
using std::complex;

// W_{nm} for |n|, |m| <= n_max at a fixed frequency.
struct ScatteringCoefficients {
  int n_max = 3;
  double omega = 0.0;
  double k_m = 0.0;
  Eigen::MatrixXcd w;  // (2 n_max + 1)^2, row n + n_max, column m + n_max

  complex<double> at(int n, int m) const {
    return w(n + n_max, m + n_max);
  }
};

// Interior/exterior densities of the two-density transmission system driven
// by the cylindrical source of order m.
struct DensityPair {
  Eigen::VectorXcd psi;  // exterior density (radiates u^s)
  Eigen::VectorXcd phi;  // interior density
  double condition_estimate = 0.0;
};

// Solves the full 2N x 2N system
//   S^{k_m} psi - S^{k_c} phi = F1^(m)
//   (1/mu_m)(I/2 + (K^{k_m})*) psi + (1/mu_c)(I/2 - (K^{k_c})*) phi = F2^(m)
// with F1^(m) = -J_m(k_m |x|) e^{i m theta}, F2^(m) its scaled normal
// derivative. The origin must lie inside the curve. A 1-norm condition
// estimate above 1e12 raises a condition-number error.
DensityPair solve_psi_m(const QuadGrid2D& grid, const Material& mat,
                        double omega, int m);

// W_{nm} = int J_n(k_m |y|) e^{-i n theta_y} psi_m(y) dsigma(y).
complex<double> scattering_coefficient(const QuadGrid2D& grid,
                                       const Eigen::VectorXcd& psi_m, int n,
                                       double k_m);

ScatteringCoefficients compute_all(const QuadGrid2D& grid, const Material& mat,
                                   double omega, int n_max = 3);

// Leading-order far-field matrix assembled from the order-one coefficients:
//   [[W_{-11}+W_{1-1}-2W_{11}, i(W_{1-1}-W_{-11})],
//    [i(W_{1-1}-W_{-11}),     -W_{-11}-W_{1-1}-2W_{11}]].
Eigen::Matrix2cd W1_matrix(const ScatteringCoefficients& sc);

// u^s(x) = S^{k_m}[psi](x) for x off the boundary, by plain quadrature.
complex<double> evaluate_scattered_field(const QuadGrid2D& grid,
                                         const Eigen::VectorXcd& psi,
                                         double k_m, Eigen::Vector2d x);

// Cylindrical-harmonic synthesis of u^s for a plane wave from direction
// theta_d: -(i/4) sum_n H_n(k|x|) e^{i n theta_x} sum_m W_{nm}
//          e^{i m (pi/2 - theta_d)}.
complex<double> synthesize_scattered_field(const ScatteringCoefficients& sc,
                                           double theta_d, Eigen::Vector2d x);

// Right-hand side f^(m) of the reduced single-density equation; used to
// cross-check the two-density solve against A(w) psi = f^(m).
Eigen::VectorXcd reduced_rhs(const QuadGrid2D& grid, const Material& mat,
                             double omega, int m);

}  // namespace npspec::scatcoef
