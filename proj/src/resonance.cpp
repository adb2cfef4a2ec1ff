#include "npspec/resonance.hpp"

#include <Eigen/LU>
#include <cmath>

#include "npspec/detail/quadrature.hpp"

namespace npspec::resonance {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

Material make_material(double eps_m, double mu_m, complex<double> eps_c,
                       std::optional<DrudeModel> drude,
                       std::optional<complex<double>> mu_c_fixed) {
  if (!(eps_m > 0.0) || !(mu_m > 0.0))
    throw configuration_error("eps_m and mu_m must be positive reals");
  if (drude) {
    if (drude->filling < 0.0 || drude->filling > 1.0)
      throw configuration_error("Drude filling factor must lie in [0, 1]");
    if (drude->omega0 < 0.0)
      throw configuration_error("Drude omega0 must be nonnegative");
    if (!(drude->tau_relax > 0.0))
      throw configuration_error("Drude relaxation time must be positive");
  }
  if (!drude && !mu_c_fixed)
    throw configuration_error("material needs a Drude model or a fixed mu_c");
  return {eps_m, mu_m, eps_c, std::move(drude), mu_c_fixed};
}

complex<double> drude_mu(double omega, const DrudeModel& model) {
  if (!(omega > 0.0)) throw configuration_error("drude_mu requires omega > 0");
  const complex<double> den(omega * omega - model.omega0 * model.omega0,
                            omega / model.tau_relax);
  const complex<double> mu =
      model.mu0 * (1.0 - model.filling * omega * omega / den);
  if (mu.imag() < 0.0)
    throw numerical_error("Drude permeability violated the Im >= 0 sign "
                          "convention");
  return mu;
}

bool drude_re_negative(double omega, const DrudeModel& model) {
  const double d = omega * omega - model.omega0 * model.omega0;
  const double inv_tau = 1.0 / model.tau_relax;
  return (1.0 - model.filling) * d * d -
             model.filling * model.omega0 * model.omega0 * d +
             inv_tau * inv_tau * omega * omega <
         0.0;
}

complex<double> mu_c_at(const Material& mat, double omega) {
  if (mat.mu_c_fixed) return *mat.mu_c_fixed;
  if (!mat.drude) throw configuration_error("material has no mu_c model");
  return drude_mu(omega, *mat.drude);
}

complex<double> lambda_of(complex<double> mu_c, double mu_m) {
  const complex<double> diff = mu_m - mu_c;
  if (std::abs(diff) < 1e-14 * (std::abs(mu_c) + mu_m))
    throw numerical_error("mu_c equals mu_m; lambda is infinite");
  return (mu_m + mu_c) / (2.0 * diff);
}

bool contrast_degenerate(complex<double> mu_c, double mu_m) {
  return std::abs(mu_c + mu_m) < 1e-12 * (std::abs(mu_c) + mu_m);
}

complex<double> tau_mode(complex<double> mu_c, double mu_m, double lambda_j) {
  const complex<double> direct = 0.5 / mu_m + 0.5 / mu_c -
                                 (1.0 / mu_c - 1.0 / mu_m) * lambda_j;
  if (std::abs(mu_m - mu_c) > 1e-12 * (std::abs(mu_c) + mu_m)) {
    const complex<double> factored =
        (1.0 / mu_c - 1.0 / mu_m) * (lambda_of(mu_c, mu_m) - lambda_j);
    // tolerance on the scale of the summands: near resonance tau itself is
    // a cancellation of order-one terms
    const double scale =
        0.5 / mu_m + std::abs(0.5 / mu_c) +
        std::abs((1.0 / mu_c - 1.0 / mu_m) * lambda_j) + 1e-30;
    if (std::abs(direct - factored) > 1e-12 * scale)
      throw numerical_error("tau_j factorization identity failed");
  }
  return direct;
}

Eigen::MatrixXcd assemble_full_operator(const spectral::Workspace& w,
                                        const Material& mat, double omega) {
  const complex<double> mu_c = mu_c_at(mat, omega);
  const complex<double> k_m = omega * std::sqrt(mat.eps_m * mat.mu_m);
  const complex<double> k_c = omega * std::sqrt(mat.eps_c * mu_c);
  const auto [sm, km] = operators2d::assemble_helmholtz(w.grid, k_m);
  const auto [sc, kc] = operators2d::assemble_helmholtz(w.grid, k_c);
  const int n = w.grid.n;
  const MatrixXcd id = MatrixXcd::Identity(n, n);
  Eigen::PartialPivLU<MatrixXcd> lu(sc.matrix);
  return (0.5 * id + km.matrix) / mat.mu_m +
         (0.5 * id - kc.matrix) * lu.solve(sm.matrix) / mu_c;
}

Eigen::MatrixXcd correction_matrix_2d(const spectral::Workspace& w,
                                      const Material& mat, int n_modes,
                                      double omega) {
  if (n_modes < 1 || n_modes > w.data.count())
    throw configuration_error("invalid mode count for the correction matrix");
  const complex<double> mu_c = mu_c_at(mat, omega);
  const int n = w.grid.n;
  const MatrixXd& b = w.data.gram;
  const VectorXd& phi0 = w.data.phi0;

  // P0 = I - phi0 (B phi0)^T, the H*-orthogonal projection onto mean-zero.
  const VectorXd bphi0 = b * phi0;
  MatrixXcd p0 = MatrixXcd::Identity(n, n);
  p0 -= (phi0 * bphi0.transpose()).cast<complex<double>>();

  const MatrixXcd eps_block =
      mat.eps_m * MatrixXcd::Identity(n, n) - mat.eps_c * p0;
  const MatrixXcd eps_mu_block =
      mat.mu_m * mat.eps_m * MatrixXcd::Identity(n, n) - mu_c * mat.eps_c * p0;

  Eigen::PartialPivLU<MatrixXd> stilde_lu(w.Stilde.matrix);
  const MatrixXd half_minus_k =
      0.5 * MatrixXd::Identity(n, n) - w.Kstar.matrix;
  const MatrixXcd a1 =
      w.K1.matrix.cast<complex<double>>() * eps_block +
      (half_minus_k * stilde_lu.solve(w.S1.matrix)).cast<complex<double>>() *
          eps_mu_block / mu_c;

  const MatrixXd phi = w.data.eigenfunctions.leftCols(n_modes);
  const MatrixXcd inner =
      phi.transpose().cast<complex<double>>() *
      (b.cast<complex<double>>() * (a1 * phi.cast<complex<double>>()));
  return inner.transpose();  // R(j, l) = (A1[phi_j], phi_l)_{H*}
}

complex<double> correction_2d(int j, const spectral::Workspace& w,
                              const Material& mat, double omega) {
  if (j < 1 || j > w.data.count())
    throw configuration_error("mode index out of range");
  const double lambda_j = w.data.eigenvalues(j - 1);
  for (int l = 0; l < w.data.count(); ++l) {
    if (l == j - 1) continue;
    if (std::abs(w.data.eigenvalues(l) - lambda_j) < 1e-10)
      throw degeneracy_error(
          "lambda_j is not a simple eigenvalue (gap below 1e-10)");
  }
  return correction_matrix_2d(w, mat, j, omega)(j - 1, j - 1);
}

complex<double> correction_3d_sphere(const Material& mat, double omega,
                                     const multiparticle::SphereQuad& quad) {
  const complex<double> mu_c = mu_c_at(mat, omega);
  const int n = quad.count();
  const double delta = quad.delta;

  // Singularity subtraction for the |x-y| kink: on the radius-delta sphere
  // int |x-y| dsigma = (16 pi/3) delta^3 and int <x-y,nu(x)>/|x-y| dsigma
  // = (8 pi/3) delta^2 in closed form, so the quadratures are applied to
  // phi(y) - phi(x) only.
  const double s2_exact = 16.0 * M_PI / 3.0 * std::pow(delta, 3);
  const double k2_exact = 8.0 * M_PI / 3.0 * delta * delta;

  // All three dipole axes are equivalent; average them to symmetrize the
  // quadrature error.
  complex<double> tau2 = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    VectorXd k2_phi = VectorXd::Zero(n), s2_phi = VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      const double phi_i = quad.dipole(i, axis);
      for (int jq = 0; jq < n; ++jq) {
        if (i == jq) continue;
        const Eigen::Vector3d d = quad.points.col(i) - quad.points.col(jq);
        const double r = d.norm();
        const double f = quad.weights(jq) * (quad.dipole(jq, axis) - phi_i);
        k2_phi(i) += d.dot(quad.normals.col(i)) / (4.0 * M_PI * r) * f;
        s2_phi(i) += -r / (4.0 * M_PI) * f;
      }
      k2_phi(i) += k2_exact * phi_i / (4.0 * M_PI);
      s2_phi(i) += -s2_exact * phi_i / (4.0 * M_PI);
    }
    // (u, phi)_{H*} = -(u, S[phi]) with S[phi^a] = -(x_a/3) * density_scale.
    const double density_scale =
        3.0 / (2.0 * std::sqrt(M_PI) * std::pow(delta, 1.5));
    auto hstar_with_dipole = [&](const VectorXd& u) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i)
        sum += quad.weights(i) * u(i) * quad.points(axis, i);
      return sum * density_scale / 3.0;
    };

    // (I/2 - K*) S^{-1} S2[phi]: project S2[phi] on the boundary dipole x_a,
    // apply S^{-1}[x_a] = -3 nu_a, then (I/2 - K*)[nu_a] = (1/3) nu_a.
    double x_norm2 = 0.0, g_dot_x = 0.0;
    for (int i = 0; i < n; ++i) {
      x_norm2 += quad.weights(i) * quad.points(axis, i) * quad.points(axis, i);
      g_dot_x += quad.weights(i) * s2_phi(i) * quad.points(axis, i);
    }
    const double coeff = g_dot_x / x_norm2;
    VectorXd second(n);
    for (int i = 0; i < n; ++i) second(i) = -coeff * quad.normals(axis, i);

    tau2 += (mat.eps_m - mat.eps_c) * hstar_with_dipole(k2_phi) +
            (mat.eps_m * mat.mu_m - mat.eps_c * mu_c) / mu_c *
                hstar_with_dipole(second);
  }
  return tau2 / 3.0;
}

std::vector<ResonanceReport> find_resonances(
    const Material& mat, const std::vector<double>& lambdas, double omega_lo,
    double omega_hi, double delta,
    const std::function<complex<double>(int, double)>& correction,
    int scan_points) {
  if (!(omega_hi > omega_lo) || !(omega_lo > 0.0))
    throw configuration_error("need 0 < omega_lo < omega_hi");
  if (scan_points < 8) throw configuration_error("scan grid too coarse");

  std::vector<ResonanceReport> reports;
  const double h = (omega_hi - omega_lo) / (scan_points - 1);

  std::vector<ResonanceSample> base(scan_points);
  for (int i = 0; i < scan_points; ++i) {
    const double omega = omega_lo + h * i;
    base[i].omega = omega;
    try {
      base[i].lambda = lambda_of(mu_c_at(mat, omega), mat.mu_m);
    } catch (const numerical_error&) {
      // mu_c passed through mu_m; lambda blows up, no crossing here
      const double nan = std::numeric_limits<double>::quiet_NaN();
      base[i].lambda = {nan, nan};
    }
  }

  for (int j = 0; j < int(lambdas.size()); ++j) {
    const double lambda_j = lambdas[j];
    auto re_gap = [&](double omega) {
      return std::real(lambda_of(mu_c_at(mat, omega), mat.mu_m)) - lambda_j;
    };
    for (int i = 0; i + 1 < scan_points; ++i) {
      const double fa = base[i].lambda.real() - lambda_j;
      const double fb = base[i + 1].lambda.real() - lambda_j;
      if (std::isnan(fa) || std::isnan(fb)) continue;
      if (fa == 0.0 || (fa > 0) == (fb > 0)) continue;

      ResonanceReport rep;
      rep.mode = j;
      rep.lambda_j = lambda_j;
      rep.delta = delta;
      rep.omega_quasi_static = detail::bisect(
          re_gap, base[i].omega, base[i + 1].omega, fa, fb, 1e-15);

      auto objective = [&](double omega) {
        complex<double> t =
            tau_mode(mu_c_at(mat, omega), mat.mu_m, lambda_j);
        if (correction) t += correction(j, omega);
        return std::norm(t);
      };
      const double w0 = rep.omega_quasi_static;
      const double lo = std::max(omega_lo, w0 * 0.9);
      const double hi = std::min(omega_hi, w0 * 1.1);
      rep.omega_corrected = detail::brent_minimize(objective, lo, hi, 1e-14);

      rep.correction_coef =
          correction ? correction(j, rep.omega_quasi_static)
                     : complex<double>(0.0, 0.0);

      // Validity diagnostics and samples along the scan.
      double min_tau = std::numeric_limits<double>::infinity();
      rep.samples.resize(scan_points);
      for (int q = 0; q < scan_points; ++q) {
        rep.samples[q] = base[q];
        rep.samples[q].tau =
            tau_mode(mu_c_at(mat, base[q].omega), mat.mu_m, lambda_j);
        min_tau = std::min(min_tau, std::abs(rep.samples[q].tau));
      }
      rep.min_tau_over_omega3 = min_tau / std::pow(w0, 3);
      reports.push_back(std::move(rep));
    }
  }
  return reports;
}

}  // namespace npspec::resonance
