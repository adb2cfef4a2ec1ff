#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "npspec/errors.hpp"

namespace npspec::multiparticle {

using Eigen::Matrix3Xd;
using Eigen::MatrixXcd;
using Eigen::Vector3d;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using std::complex;

// L identical spheres D_l = z_l + delta * (unit sphere).
struct ParticleArray {
  std::vector<Vector3d> centers;
  double delta = 0.0;
  double separation_floor = 5.0;  // in units of delta

  int count() const { return int(centers.size()); }
};

ParticleArray make_particle_array(std::vector<Vector3d> centers, double delta,
                                  double separation_floor = 5.0);

// Product Gauss-Legendre (polar) x uniform (azimuth) quadrature on the
// radius-delta sphere, with the H*-normalized dipole eigendensities
// phi^(a) = nu_a * 3 / (2 sqrt(pi) delta^{3/2}) sampled at the nodes.
// The dipole Gram is exact for this rule; it is still checked to 1e-8.
struct SphereQuad {
  double delta = 1.0;
  Matrix3Xd points;
  VectorXd weights;
  Matrix3Xd normals;
  Eigen::Matrix<double, Eigen::Dynamic, 3> dipole;  // columns phi^(1..3)

  int count() const { return int(weights.size()); }
};

SphereQuad make_sphere_quad(double delta, int n_polar = 24,
                            int n_azimuth = 48);

// Dipole moments c^(a) = int_{dD0} x phi^(a) dsigma, by quadrature.
Eigen::Matrix3d dipole_moments(const SphereQuad& quad);

// Free-space Helmholtz kernel G(x, y, k) = -e^{ik|x-y|} / (4 pi |x-y|).
complex<double> green_kernel(const Vector3d& x, const Vector3d& y,
                             complex<double> k);

// Coupling matrix R_j for the dipole mode a (lambda_j = 1/6), assembled by
// surface quadrature of the two-kernel pair formula; R is complex symmetric
// with zero diagonal and entries O(delta^3).
MatrixXcd coupling_matrix(const ParticleArray& array, const SphereQuad& quad,
                          int mode_axis, complex<double> mu_c, double mu_m);

// Splitting of tau_j by the eigenvalues of R_j, with bi-orthogonal left and
// right eigenvector families (X, X~), normalized so conj(X_p)^T X~_q = d_pq.
struct HybridizationResult {
  MatrixXcd r;
  VectorXcd tau_split;   // eigenvalues tau_{j,l} of R_j
  MatrixXcd x;           // right eigenvectors, columns
  MatrixXcd x_adjoint;   // X~, columns
  complex<double> tau_static;  // tau_j of the isolated particle
  VectorXcd tau_total;   // tau_j + tau_{j,l}
};

HybridizationResult hybridize(const MatrixXcd& r, complex<double> tau_static);

// Green function of the medium with the array, at frequency omega and
// contrast lambda = (mu_m + mu_c)/(2(mu_m - mu_c)):
//   Gamma = G(x, x0, k_m) + sum_{a,l} num / (lambda - 1/6 + kappa^{-1} tau_{a,l})
// with kappa = 1/mu_c - 1/mu_m. Emits a domain warning (returned flag) when
// x or x0 leave the intermediate zone delta << |x - z_l| << 1/k.
struct GreenEvaluation {
  complex<double> gamma;
  complex<double> free_term;
  complex<double> scattered_term;
  bool domain_warning = false;
};

class GreenFunction {
public:
  GreenFunction(const ParticleArray& array, const SphereQuad& quad,
                complex<double> mu_c, double mu_m, double k_m);

  GreenEvaluation evaluate(const Vector3d& x, const Vector3d& x0) const;

  // Denominators lambda - lambda_j + kappa^{-1} tau_{a,l} per (axis, l).
  const MatrixXcd& denominators() const { return den_; }
  double validity_ratio(double omega) const;  // omega^2 / delta
  double delta() const { return delta_; }
  double wavenumber() const { return k_m_; }

private:
  ParticleArray array_;
  double k_m_;
  double delta_;
  complex<double> hstar_dipole_norm_;  // (nu_a, phi^(a))_{H*}
  Eigen::Matrix3d moments_;            // c^(a) columns
  std::vector<HybridizationResult> modes_;  // per axis a = 0,1,2
  MatrixXcd den_;
};

// Raster of Im Gamma on a segment through x0 plus peak metrics.
struct FieldMap {
  Matrix3Xd points;
  VectorXd im_gamma;
  VectorXd im_free;      // no-particle reference Im G
  double peak_position = 0.0;   // arclength along the segment
  double peak_value = 0.0;
  double fwhm = 0.0;
  double reference_fwhm = 0.0;
  bool domain_warning = false;
};

FieldMap im_green_map(const GreenFunction& green, const Vector3d& x0,
                      const Vector3d& direction, double half_extent,
                      int samples);

}  // namespace npspec::multiparticle
