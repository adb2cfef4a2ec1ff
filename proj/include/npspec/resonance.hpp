#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "npspec/multiparticle.hpp"
#include "npspec/spectral.hpp"

namespace npspec::resonance {

using std::complex;

// Drude dispersion mu_c(w) = mu0 (1 - F w^2 / (w^2 - w0^2 + i w / tau)).
struct DrudeModel {
  double mu0 = 1.0;
  double filling = 0.0;      // F in [0, 1]
  double omega0 = 0.0;       // localized resonant frequency
  double tau_relax = 1e3;    // bulk electron relaxation time (1/tau damps)
};

struct Material {
  double eps_m = 1.0;
  double mu_m = 1.0;
  complex<double> eps_c{1.0, 0.0};
  std::optional<DrudeModel> drude;
  std::optional<complex<double>> mu_c_fixed;  // non-dispersive alternative
};

Material make_material(double eps_m, double mu_m, complex<double> eps_c,
                       std::optional<DrudeModel> drude,
                       std::optional<complex<double>> mu_c_fixed = {});

complex<double> drude_mu(double omega, const DrudeModel& model);

// True iff (1-F)(w^2-w0^2)^2 - F w0^2 (w^2-w0^2) + w^2/tau^2 < 0, the
// pointwise criterion for Re mu_c < 0.
bool drude_re_negative(double omega, const DrudeModel& model);

// mu_c at omega, honoring the fixed override.
complex<double> mu_c_at(const Material& mat, double omega);

// lambda = (mu_m + mu_c) / (2 (mu_m - mu_c)). mu_c == mu_m is an error;
// mu_c == -mu_m gives lambda = 0, which callers should treat as degenerate
// (contrast_degenerate flags it).
complex<double> lambda_of(complex<double> mu_c, double mu_m);
bool contrast_degenerate(complex<double> mu_c, double mu_m);

// tau_j = 1/(2 mu_m) + 1/(2 mu_c) - (1/mu_c - 1/mu_m) lambda_j. The
// factorization tau_j = (1/mu_c - 1/mu_m)(lambda - lambda_j) is asserted
// to machine precision whenever lambda is finite.
complex<double> tau_mode(complex<double> mu_c, double mu_m, double lambda_j);

// Full 2D boundary operator A(w) = (1/mu_m)(I/2 + (K^{k_m})*)
//                          + (1/mu_c)(I/2 - (K^{k_c})*)(S^{k_c})^{-1} S^{k_m}.
Eigen::MatrixXcd assemble_full_operator(const spectral::Workspace& w,
                                        const Material& mat, double omega);

// R_{jl} = (A1[phi_j], phi_l)_{H*} for the w^2 log w perturbation
//   A1 = K1 (eps_m I - eps_c P0)
//      + (1/mu_c)(I/2 - K*) S~^{-1} S1 (mu_m eps_m I - mu_c eps_c P0),
// with P0 the H*-orthogonal projection onto mean-zero densities.
// Row j, column l; the first n_modes eigenfunctions are used. omega is only
// consulted when mu_c comes from the Drude model.
Eigen::MatrixXcd correction_matrix_2d(const spectral::Workspace& w,
                                      const Material& mat, int n_modes,
                                      double omega = 0.0);

// tau_{j,1} = R_{jj}; refuses when lambda_j is not simple (gap <= 1e-10).
complex<double> correction_2d(int j, const spectral::Workspace& w,
                              const Material& mat, double omega = 0.0);

// tau_{j,2} of the unit-sphere dipole modes by surface quadrature of
//   A2 = (eps_m - eps_c) K2 + ((eps_m mu_m - eps_c mu_c)/mu_c)
//                              (I/2 - K*) S^{-1} S2,
// with K2 = (1/4pi) <x-y,nu(x)>/|x-y| and S2 = -|x-y|/(4pi); S^{-1} acts on
// the dipole subspace through S[nu_l] = -x_l/3.
complex<double> correction_3d_sphere(const Material& mat, double omega,
                                     const multiparticle::SphereQuad& quad);

struct ResonanceSample {
  double omega;
  complex<double> lambda;
  complex<double> tau;
};

struct ResonanceReport {
  int mode = 0;                       // index into the lambda list
  double lambda_j = 0.0;
  double omega_quasi_static = 0.0;
  double omega_corrected = 0.0;
  complex<double> correction_coef{};  // tau_{j,1} or delta^2 tau_{j,2} at w*
  double delta = 0.0;
  double min_tau_over_omega3 = 0.0;   // validity ratio, reported not enforced
  std::vector<ResonanceSample> samples;
};

// Root-finds Re lambda(w) = lambda_j on [omega_lo, omega_hi] by bracketing
// and bisection, then minimizes |tau_j(w) + correction| by a bracketed 1D
// minimizer around each root. An empty result means no crossing (not an
// error). `correction(j, w)` returns the additive correction term; pass
// nullptr for the pure quasi-static resonance.
std::vector<ResonanceReport> find_resonances(
    const Material& mat, const std::vector<double>& lambdas, double omega_lo,
    double omega_hi, double delta,
    const std::function<complex<double>(int, double)>& correction = nullptr,
    int scan_points = 400);

}  // namespace npspec::resonance
