#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <vector>

#include "npspec/polarization.hpp"
#include "npspec/resonance.hpp"

namespace npspec::crosssec {

using polarization::PolarizationTensor;
using std::complex;

// Orientation-averaged cross-sections of a randomly oriented particle.
// Q_ext is the sphere average of the per-direction optical-theorem value
// (1/k) Im A_inf(d), which evaluates to -(k/3) Im Tr M; for passive
// contrasts (Im lambda > 0) this is nonnegative. Q_a = Q_ext - Q_s by
// construction; q_a_negative flags truncation artifacts.
struct CrossSections {
  double q_ext = 0.0;
  double q_s = 0.0;
  double q_a = 0.0;
  double k_m = 0.0;
  bool q_a_negative = false;
};

// A_inf(xhat) = -k^2 xhat . M d, in the tensor's dimension. Non-unit
// directions are normalized (a warning is written to stderr).
complex<double> far_field_amplitude(const PolarizationTensor& m, double k_m,
                                    Eigen::VectorXd d, Eigen::VectorXd xhat);

// 3D tensors only (the averaging identities are specific to S^2);
// a 2D tensor raises configuration_error.
CrossSections averaged_cross_sections(const PolarizationTensor& m, double k_m);

// | average_{S^2} (1/k) Im A_inf(d) - ( -(k/3) Im Tr M ) | with the sphere
// average taken by a 26-point rule exact on quadratics.
double optical_theorem_check(const PolarizationTensor& m, double k_m);

// Geometry-independent bound on |Im Tr M| for a particle of volume |D| in
// dimension d. Infinite when Im lambda = 0 (returned as such).
double bound_general(complex<double> lambda, double volume, int dim);

// Sharper bound for 2D, tight for ellipses at lambda' = +-lambda_1; valid
// for any 2D shape of the same area.
double bound_ellipse(complex<double> lambda, double area);

// Ellipsoid bound with depolarization factors s.
double bound_ellipsoid(complex<double> lambda, double volume,
                       const std::array<double, 3>& s);

struct SweepRow {
  double omega = 0.0;
  complex<double> lambda{};
  double value = 0.0;          // |Im Tr M| in 2D, Q_ext in 3D
  double bound_general_v = 0.0;
  double bound_shape_v = 0.0;  // ellipse bound (2D) or ellipsoid bound (3D)
};

std::vector<SweepRow> enhancement_sweep_2d(
    const spectral::Workspace& w, const resonance::Material& mat,
    const std::vector<double>& omegas);

std::vector<SweepRow> enhancement_sweep_ellipsoid(
    double p1, double p2, double p3, const resonance::Material& mat,
    const std::vector<double>& omegas);

}  // namespace npspec::crosssec
