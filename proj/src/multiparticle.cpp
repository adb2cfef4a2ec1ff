#include "npspec/multiparticle.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "npspec/detail/quadrature.hpp"

namespace npspec::multiparticle {

namespace {
constexpr double kDipoleEigenvalue = 1.0 / 6.0;
}

ParticleArray make_particle_array(std::vector<Vector3d> centers, double delta,
                                  double separation_floor) {
  if (!(delta > 0.0)) throw invalid_geometry_error("delta must be positive");
  for (std::size_t p = 0; p < centers.size(); ++p)
    for (std::size_t q = p + 1; q < centers.size(); ++q) {
      const double d = (centers[p] - centers[q]).norm();
      if (d < separation_floor * delta)
        throw invalid_geometry_error(
            "particle centers closer than the separation floor");
    }
  return {std::move(centers), delta, separation_floor};
}

SphereQuad make_sphere_quad(double delta, int n_polar, int n_azimuth) {
  if (!(delta > 0.0)) throw invalid_geometry_error("delta must be positive");
  SphereQuad quad;
  quad.delta = delta;
  const int n = n_polar * n_azimuth;
  quad.points.resize(3, n);
  quad.weights.resize(n);
  quad.normals.resize(3, n);
  quad.dipole.resize(n, 3);

  const detail::Rule1D polar = detail::gauss_legendre(n_polar, -1.0, 1.0);
  const double dphi = 2.0 * M_PI / n_azimuth;
  const double density_scale =
      3.0 / (2.0 * std::sqrt(M_PI) * std::pow(delta, 1.5));

  int idx = 0;
  for (int i = 0; i < n_polar; ++i) {
    const double u = polar.nodes[i];
    const double su = std::sqrt(std::max(0.0, 1.0 - u * u));
    for (int j = 0; j < n_azimuth; ++j, ++idx) {
      const double phi = dphi * (j + 0.5);
      const Vector3d nu(su * std::cos(phi), su * std::sin(phi), u);
      quad.normals.col(idx) = nu;
      quad.points.col(idx) = delta * nu;
      quad.weights(idx) = delta * delta * polar.weights[i] * dphi;
      for (int a = 0; a < 3; ++a) quad.dipole(idx, a) = density_scale * nu(a);
    }
  }

  // Dipole Gram under the analytic S action S[nu_a] = -x_a/3.
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      double g = 0.0;
      for (int q = 0; q < n; ++q)
        g += quad.weights(q) * quad.dipole(q, a) * quad.points(b, q) / 3.0 *
             density_scale;
      const double expected = (a == b) ? 1.0 : 0.0;
      if (std::abs(g - expected) > 1e-8)
        throw precision_error("sphere quadrature does not resolve the dipole "
                              "Gram to 1e-8; increase the rule order");
    }
  return quad;
}

Eigen::Matrix3d dipole_moments(const SphereQuad& quad) {
  Eigen::Matrix3d c = Eigen::Matrix3d::Zero();
  for (int a = 0; a < 3; ++a)
    for (int q = 0; q < quad.count(); ++q)
      c.col(a) += quad.weights(q) * quad.dipole(q, a) * quad.points.col(q);
  return c;
}

complex<double> green_kernel(const Vector3d& x, const Vector3d& y,
                             complex<double> k) {
  const double r = (x - y).norm();
  return -std::exp(complex<double>(0, 1) * k * r) / (4.0 * M_PI * r);
}

MatrixXcd coupling_matrix(const ParticleArray& array, const SphereQuad& quad,
                          int mode_axis, complex<double> mu_c, double mu_m) {
  if (mode_axis < 0 || mode_axis > 2)
    throw configuration_error("mode axis must be 0, 1 or 2");
  const int L = array.count();
  MatrixXcd r = MatrixXcd::Zero(L, L);
  const int n = quad.count();

  const complex<double> pref1 =
      3.0 / (4.0 * M_PI * mu_c) * (kDipoleEigenvalue - 0.5);
  const complex<double> pref2 =
      (1.0 / (4.0 * M_PI * mu_c) - 1.0 / (4.0 * M_PI * mu_m)) *
      (kDipoleEigenvalue - 0.5);

  for (int p = 0; p < L; ++p) {
    for (int q = p + 1; q < L; ++q) {
      const Vector3d z = array.centers[p] - array.centers[q];
      const double zn = z.norm();
      double t1 = 0.0, t2 = 0.0;
      for (int i = 0; i < n; ++i) {
        const double fi = quad.weights(i) * quad.dipole(i, mode_axis);
        const double zxi = z.dot(quad.points.col(i));
        for (int j = 0; j < n; ++j) {
          const double fj = quad.weights(j) * quad.dipole(j, mode_axis);
          t1 += fi * fj * zxi * z.dot(quad.points.col(j));
          t2 += fi * fj * quad.points.col(i).dot(quad.points.col(j));
        }
      }
      const complex<double> value =
          pref1 * t1 / std::pow(zn, 5) + pref2 * t2 / std::pow(zn, 3);
      r(p, q) = value;
      r(q, p) = value;
    }
  }
  return r;
}

HybridizationResult hybridize(const MatrixXcd& r, complex<double> tau_static) {
  const int L = int(r.rows());
  if ((r - r.transpose()).norm() > 1e-12 * std::max(1.0, r.norm()))
    throw numerical_error("coupling matrix must be complex symmetric");

  HybridizationResult out;
  out.r = r;
  out.tau_static = tau_static;

  if (L <= 1 || r.norm() == 0.0) {
    out.tau_split = VectorXcd::Zero(L);
    out.x = MatrixXcd::Identity(L, L);
    out.x_adjoint = MatrixXcd::Identity(L, L);
    out.tau_total = VectorXcd::Constant(L, tau_static);
    return out;
  }

  Eigen::ComplexEigenSolver<MatrixXcd> solver(r);
  out.tau_split = solver.eigenvalues();
  out.x = solver.eigenvectors();

  for (int a = 0; a < L; ++a)
    for (int b = a + 1; b < L; ++b)
      if (std::abs(out.tau_split(a) - out.tau_split(b)) < 1e-12)
        throw degeneracy_error(
            "coupling matrix does not have distinct eigenvalues");

  // Adjoint family: conj(R) has eigenvectors conj(X_l); normalize so that
  // conj(X_p)^T X~_q = delta_pq (complex-orthogonality of the symmetric
  // eigenproblem supplies the off-diagonal zeros).
  out.x_adjoint.resize(L, L);
  for (int l = 0; l < L; ++l) {
    const complex<double> self = out.x.col(l).transpose() * out.x.col(l);
    if (std::abs(self) < 1e-12)
      throw degeneracy_error("quasi-defective eigenvector (X^T X ~ 0)");
    out.x_adjoint.col(l) = out.x.col(l).conjugate() / std::conj(self);
  }
  const MatrixXcd biorth = out.x.adjoint() * out.x_adjoint;
  if ((biorth - MatrixXcd::Identity(L, L)).norm() > 1e-10)
    throw degeneracy_error("bi-orthogonality failed beyond 1e-10");

  out.tau_total = out.tau_split;
  out.tau_total.array() += tau_static;
  return out;
}

GreenFunction::GreenFunction(const ParticleArray& array,
                             const SphereQuad& quad, complex<double> mu_c,
                             double mu_m, double k_m)
    : array_(array), k_m_(k_m), delta_(array.delta) {
  if (std::abs(quad.delta - array.delta) > 1e-14 * (1.0 + array.delta))
    throw configuration_error("quadrature radius must equal the array delta");

  // (nu_a, phi^(a))_{H*} by quadrature with the analytic S action.
  const double density_scale =
      3.0 / (2.0 * std::sqrt(M_PI) * std::pow(delta_, 1.5));
  double norm = 0.0;
  for (int q = 0; q < quad.count(); ++q)
    norm += quad.weights(q) * quad.normals(0, q) * quad.points(0, q) / 3.0 *
            density_scale;
  hstar_dipole_norm_ = norm;
  moments_ = dipole_moments(quad);

  const complex<double> lambda =
      (mu_m + mu_c) / (2.0 * (mu_m - mu_c));
  const complex<double> kappa = 1.0 / mu_c - 1.0 / mu_m;
  const complex<double> tau_static = kappa * (lambda - kDipoleEigenvalue);

  const int L = array.count();
  den_.resize(3, L);
  modes_.reserve(3);
  for (int a = 0; a < 3; ++a) {
    const MatrixXcd r = coupling_matrix(array, quad, a, mu_c, mu_m);
    modes_.push_back(hybridize(r, tau_static));
    for (int l = 0; l < L; ++l)
      den_(a, l) =
          lambda - kDipoleEigenvalue + modes_[a].tau_split(l) / kappa;
  }
}

double GreenFunction::validity_ratio(double omega) const {
  return omega * omega / delta_;
}

GreenEvaluation GreenFunction::evaluate(const Vector3d& x,
                                        const Vector3d& x0) const {
  GreenEvaluation out;
  out.free_term = green_kernel(x, x0, k_m_);

  const int L = array_.count();
  for (const Vector3d* pt : {&x, &x0}) {
    for (int l = 0; l < L; ++l) {
      const double d = (*pt - array_.centers[l]).norm();
      if (d < 2.0 * delta_ || k_m_ * d > 1.0) out.domain_warning = true;
    }
  }

  complex<double> scattered = 0.0;
  for (int a = 0; a < 3; ++a) {
    const auto& mode = modes_[a];
    // H_{a,p}(x0) and S_{a,q}(x).
    VectorXcd h(L), s(L);
    for (int p = 0; p < L; ++p) {
      const Vector3d d0 = array_.centers[p] - x0;
      h(p) = -d0(a) * hstar_dipole_norm_ / (4.0 * M_PI * std::pow(d0.norm(), 3));
      const Vector3d dx = x - array_.centers[p];
      s(p) = green_kernel(x, array_.centers[p], k_m_) *
             dx.dot(moments_.col(a)) / dx.squaredNorm();
    }
    for (int l = 0; l < L; ++l) {
      if (std::abs(den_(a, l)) < 1e-14)
        throw near_singular_error("resonance denominator vanishes",
                                  std::abs(den_(a, l)));
      const complex<double> excite = mode.x_adjoint.col(l).transpose() * h;
      const complex<double> radiate = mode.x.col(l).transpose() * s;
      scattered += excite * radiate / den_(a, l);
    }
  }
  out.scattered_term = scattered;
  out.gamma = out.free_term + scattered;
  return out;
}

namespace {

struct PeakMetrics {
  double position = 0.0;
  double value = 0.0;
  double fwhm = 0.0;
};

// Peak of |v| nearest s = 0 and its full width at half maximum, with linear
// interpolation of the half-level crossings.
PeakMetrics measure_peak(const VectorXd& s, const VectorXd& v) {
  const int n = int(s.size());
  int best = -1;
  for (int i = 1; i + 1 < n; ++i) {
    if (std::abs(v(i)) >= std::abs(v(i - 1)) &&
        std::abs(v(i)) >= std::abs(v(i + 1))) {
      if (best < 0 || std::abs(s(i)) < std::abs(s(best))) best = i;
    }
  }
  if (best < 0) best = 0;
  PeakMetrics out;
  out.position = s(best);
  out.value = v(best);
  const double half = 0.5 * std::abs(v(best));
  double left = s(0), right = s(n - 1);
  for (int i = best; i > 0; --i) {
    if (std::abs(v(i - 1)) < half) {
      const double f =
          (std::abs(v(i)) - half) / (std::abs(v(i)) - std::abs(v(i - 1)));
      left = s(i) - f * (s(i) - s(i - 1));
      break;
    }
  }
  for (int i = best; i + 1 < n; ++i) {
    if (std::abs(v(i + 1)) < half) {
      const double f =
          (std::abs(v(i)) - half) / (std::abs(v(i)) - std::abs(v(i + 1)));
      right = s(i) + f * (s(i + 1) - s(i));
      break;
    }
  }
  out.fwhm = right - left;
  return out;
}

}  // namespace

FieldMap im_green_map(const GreenFunction& green, const Vector3d& x0,
                      const Vector3d& direction, double half_extent,
                      int samples) {
  if (samples < 16) throw configuration_error("raster needs at least 16 samples");
  const double step = 2.0 * half_extent / (samples - 1);
  if (step > green.delta())
    throw precision_error(
        "raster spacing exceeds the particle scale delta; increase samples");
  const Vector3d dir = direction.normalized();
  FieldMap map;
  map.points.resize(3, samples);
  map.im_gamma.resize(samples);
  map.im_free.resize(samples);

  VectorXd s(samples);
  for (int i = 0; i < samples; ++i) {
    s(i) = -half_extent + step * i;
    const bool at_source = std::abs(s(i)) < 1e-12 * half_extent;
    const Vector3d x = x0 + (at_source ? 1e-6 * green.delta() : s(i)) * dir;
    map.points.col(i) = x0 + s(i) * dir;
    const GreenEvaluation ev = green.evaluate(x, x0);
    double im_g = std::imag(ev.free_term);
    // Im G is finite at coincidence: -k/(4pi).
    if (at_source) im_g = -green.wavenumber() / (4.0 * M_PI);
    map.im_free(i) = im_g;
    map.im_gamma(i) = im_g + std::imag(ev.scattered_term);
    map.domain_warning = map.domain_warning || ev.domain_warning;
  }

  const PeakMetrics peak = measure_peak(s, map.im_gamma);
  map.peak_position = peak.position;
  map.peak_value = peak.value;
  map.fwhm = peak.fwhm;
  map.reference_fwhm = measure_peak(s, map.im_free).fwhm;
  return map;
}

}  // namespace npspec::multiparticle
