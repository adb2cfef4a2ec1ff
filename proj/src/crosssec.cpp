#include "npspec/crosssec.hpp"

#include <cmath>
#include <iostream>
#include <limits>

namespace npspec::crosssec {

using Eigen::Vector3d;

namespace {

// 26-point sphere rule (octahedron vertices, edge midpoints, cube corners),
// weights normalized to average; exact for polynomials up to degree 7.
struct SphereRule {
  std::vector<Vector3d> points;
  std::vector<double> weights;
};

const SphereRule& sphere_rule_26() {
  static const SphereRule rule = [] {
    SphereRule r;
    const double w1 = 1.0 / 21.0, w2 = 4.0 / 105.0, w3 = 27.0 / 840.0;
    for (int a = 0; a < 3; ++a)
      for (int s : {-1, 1}) {
        Vector3d p = Vector3d::Zero();
        p(a) = s;
        r.points.push_back(p);
        r.weights.push_back(w1);
      }
    const double q = 1.0 / std::sqrt(2.0);
    for (int a = 0; a < 3; ++a)
      for (int sa : {-1, 1})
        for (int sb : {-1, 1}) {
          Vector3d p = Vector3d::Zero();
          p((a + 1) % 3) = sa * q;
          p((a + 2) % 3) = sb * q;
          r.points.push_back(p);
          r.weights.push_back(w2);
        }
    const double c = 1.0 / std::sqrt(3.0);
    for (int sx : {-1, 1})
      for (int sy : {-1, 1})
        for (int sz : {-1, 1}) {
          r.points.push_back(Vector3d(sx * c, sy * c, sz * c));
          r.weights.push_back(w3);
        }
    return r;
  }();
  return rule;
}

}  // namespace

complex<double> far_field_amplitude(const PolarizationTensor& m, double k_m,
                                    Eigen::VectorXd d, Eigen::VectorXd xhat) {
  if (d.size() != m.dim || xhat.size() != m.dim)
    throw configuration_error(
        "direction dimensions must match the tensor dimension");
  if (std::abs(d.norm() - 1.0) > 1e-12) {
    std::cerr << "npspec: warning: incidence direction normalized\n";
    d.normalize();
  }
  if (std::abs(xhat.norm() - 1.0) > 1e-12) {
    std::cerr << "npspec: warning: observation direction normalized\n";
    xhat.normalize();
  }
  const Eigen::VectorXcd md = m.m * d.cast<complex<double>>();
  return -k_m * k_m * xhat.cast<complex<double>>().dot(md);
}

CrossSections averaged_cross_sections(const PolarizationTensor& m,
                                      double k_m) {
  if (m.dim != 3)
    throw configuration_error(
        "orientation averaging is defined for 3D tensors only");
  CrossSections out;
  out.k_m = k_m;
  const complex<double> trace = m.m.trace();
  out.q_ext = -(k_m / 3.0) * trace.imag();
  out.q_s = std::pow(k_m, 4) * (16.0 * M_PI / 9.0) * std::norm(trace);
  out.q_a = out.q_ext - out.q_s;
  out.q_a_negative = out.q_a < 0.0;
  return out;
}

double optical_theorem_check(const PolarizationTensor& m, double k_m) {
  if (m.dim != 3)
    throw configuration_error("optical theorem check expects a 3D tensor");
  const SphereRule& rule = sphere_rule_26();
  double avg = 0.0;
  for (std::size_t i = 0; i < rule.points.size(); ++i) {
    const Vector3d& d = rule.points[i];
    const complex<double> quad =
        d.cast<complex<double>>().dot(m.m * d.cast<complex<double>>());
    avg += rule.weights[i] * (1.0 / k_m) * std::imag(-k_m * k_m * quad);
  }
  const double trace_side = -(k_m / 3.0) * m.m.trace().imag();
  return std::abs(avg - trace_side);
}

double bound_general(complex<double> lambda, double volume, int dim) {
  const double lp = lambda.real(), lpp = std::abs(lambda.imag());
  if (lpp == 0.0) return std::numeric_limits<double>::infinity();
  const double denom = lpp * lpp + 4.0 * lp * lp;
  return (dim * volume * (lp * lp + 0.25) +
          2.0 * lp * 0.5 * (dim - 2) * volume) /
             (lpp * denom) +
         dim * lpp * volume / denom;
}

double bound_ellipse(complex<double> lambda, double area) {
  const double lp = lambda.real(), lpp = std::abs(lambda.imag());
  if (lpp == 0.0) return std::numeric_limits<double>::infinity();
  const double denom = lpp * lpp + 4.0 * lp * lp;
  return area * 4.0 * lp * lp / (lpp * denom) + 2.0 * lpp * area / denom;
}

double bound_ellipsoid(complex<double> lambda, double volume,
                       const std::array<double, 3>& s) {
  const double lp = lambda.real(), lpp = std::abs(lambda.imag());
  if (lpp == 0.0) return std::numeric_limits<double>::infinity();
  const double s2 = s[0] * s[0] + s[1] * s[1] + s[2] * s[2];
  const double denom = lpp * lpp + 4.0 * lp * lp;
  return volume * (3.0 * lp * lp + lp - 0.25 + s2) / (lpp * denom) +
         3.0 * lpp * volume / denom;
}

std::vector<SweepRow> enhancement_sweep_2d(
    const spectral::Workspace& w, const resonance::Material& mat,
    const std::vector<double>& omegas) {
  std::vector<SweepRow> rows;
  rows.reserve(omegas.size());
  const double area = geometry::area(w.grid);
  for (double omega : omegas) {
    SweepRow row;
    row.omega = omega;
    row.lambda =
        resonance::lambda_of(resonance::mu_c_at(mat, omega), mat.mu_m);
    const auto m =
        polarization::polarization_direct(w.grid, w.Kstar, row.lambda);
    row.value = std::abs(m.m.trace().imag());
    row.bound_general_v = bound_general(row.lambda, area, 2);
    row.bound_shape_v = bound_ellipse(row.lambda, area);
    rows.push_back(row);
  }
  return rows;
}

std::vector<SweepRow> enhancement_sweep_ellipsoid(
    double p1, double p2, double p3, const resonance::Material& mat,
    const std::vector<double>& omegas) {
  std::vector<SweepRow> rows;
  rows.reserve(omegas.size());
  const auto s = polarization::s_factors(p1, p2, p3);
  const double volume = 4.0 * M_PI / 3.0 * p1 * p2 * p3;
  for (double omega : omegas) {
    SweepRow row;
    row.omega = omega;
    row.lambda =
        resonance::lambda_of(resonance::mu_c_at(mat, omega), mat.mu_m);
    const auto m =
        polarization::ellipsoid_polarization(p1, p2, p3, row.lambda);
    const double k_m = omega * std::sqrt(mat.eps_m * mat.mu_m);
    row.value = averaged_cross_sections(m, k_m).q_ext;
    row.bound_general_v = bound_general(row.lambda, volume, 3);
    row.bound_shape_v = bound_ellipsoid(row.lambda, volume, s);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace npspec::crosssec
