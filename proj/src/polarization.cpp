#include "npspec/polarization.hpp"

#include <Eigen/LU>
#include <cmath>

#include "npspec/detail/quadrature.hpp"

namespace npspec::polarization {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

PolarizationTensor polarization_direct(const QuadGrid2D& grid,
                                       const RealOperator& kstar,
                                       complex<double> lambda,
                                       const SpectralData* data) {
  if (data) {
    double dist = std::abs(lambda - data->lambda0);
    for (int j = 0; j < data->count(); ++j)
      dist = std::min(dist, std::abs(lambda - data->eigenvalues(j)));
    if (dist < 1e-12)
      throw near_singular_error("lambda coincides with a discrete eigenvalue",
                                dist);
  }
  const int n = grid.n;
  MatrixXcd a = -kstar.matrix.cast<complex<double>>();
  a.diagonal().array() += lambda;
  Eigen::PartialPivLU<MatrixXcd> lu(a);

  PolarizationTensor out{2, Eigen::MatrixXcd::Zero(2, 2), lambda};
  for (int m = 0; m < 2; ++m) {
    VectorXcd rhs(n);
    for (int i = 0; i < n; ++i) rhs(i) = grid.normals(m, i);
    const VectorXcd u = lu.solve(rhs);
    for (int l = 0; l < 2; ++l) {
      complex<double> sum = 0.0;
      for (int i = 0; i < n; ++i)
        sum += grid.weights(i) * (grid.points(l, i) - grid.center(l)) * u(i);
      out.m(l, m) = sum;
    }
  }
  return out;
}

SpectralWeights spectral_weights(const SpectralData& data,
                                 const QuadGrid2D& grid) {
  const int n = grid.n;
  const int modes = data.count();
  SpectralWeights w;
  w.lambdas = data.eigenvalues;
  w.alpha.resize(modes);
  w.beta.resize(modes);
  w.area = geometry::area(grid);

  VectorXd nu[2], x[2];
  for (int l = 0; l < 2; ++l) {
    nu[l].resize(n);
    x[l].resize(n);
    for (int i = 0; i < n; ++i) {
      nu[l](i) = grid.normals(l, i);
      x[l](i) = grid.points(l, i) - grid.center(l);
    }
  }

  double worst = 0.0;
  for (int j = 0; j < modes; ++j) {
    const VectorXd phi = data.eigenfunctions.col(j);
    const VectorXd bphi = data.gram * phi;
    double hstar_nu[2], pair_x[2];
    for (int l = 0; l < 2; ++l) {
      hstar_nu[l] = nu[l].dot(bphi);
      pair_x[l] = (grid.weights.array() * phi.array() * x[l].array()).sum();
      const double via_identity = hstar_nu[l] / (0.5 - data.eigenvalues(j));
      worst = std::max(worst, std::abs(pair_x[l] - via_identity));
    }
    Eigen::Matrix2d a;
    for (int l = 0; l < 2; ++l)
      for (int m = 0; m < 2; ++m) a(l, m) = hstar_nu[m] * pair_x[l];
    w.alpha[j] = a;
    w.beta(j) = a.trace();
  }
  if (worst > 1e-8)
    throw under_resolution_error(
        "duality pairing and H* identity for the spectral weights disagree "
        "(max " +
        std::to_string(worst) + "); increase N");
  return w;
}

PolarizationTensor polarization_spectral(const SpectralWeights& weights,
                                         complex<double> lambda,
                                         std::optional<std::vector<int>> J) {
  PolarizationTensor out{2, Eigen::MatrixXcd::Zero(2, 2), lambda};
  auto add = [&](int j) {
    out.m += weights.alpha[j].cast<complex<double>>() /
             (lambda - weights.lambdas(j));
  };
  if (J) {
    for (int j : *J) {
      if (j < 1 || j > int(weights.alpha.size()))
        throw configuration_error("mode index out of range");
      add(j - 1);
    }
  } else {
    for (int j = 0; j < int(weights.alpha.size()); ++j) add(j);
  }
  return out;
}

SumRuleResiduals sum_rules(const SpectralWeights& weights,
                           const QuadGrid2D& grid, const RealOperator& s,
                           const RealOperator& kstar) {
  const int d = 2;
  const double vol = weights.area;
  SumRuleResiduals out;

  Eigen::Matrix2d moment0 = Eigen::Matrix2d::Zero();
  double moment1 = 0.0, moment2 = 0.0;
  for (int j = 0; j < int(weights.alpha.size()); ++j) {
    moment0 += weights.alpha[j];
    moment1 += weights.lambdas(j) * weights.beta(j);
    moment2 += weights.lambdas(j) * weights.lambdas(j) * weights.beta(j);
  }
  out.r1 = (moment0 - vol * Eigen::Matrix2d::Identity()).norm();
  out.r2 = std::abs(moment1 - 0.5 * (d - 2) * vol);

  // E_l = int_D |grad S[nu_l]|^2 dx = int_{dD} S[nu_l] ((-1/2 + K*)[nu_l]).
  const int n = grid.n;
  double energy = 0.0, i1 = 0.0, i2 = 0.0;
  for (int l = 0; l < d; ++l) {
    VectorXd nu(n), xl(n);
    for (int i = 0; i < n; ++i) {
      nu(i) = grid.normals(l, i);
      xl(i) = grid.points(l, i) - grid.center(l);
    }
    const VectorXd s_nu = s.matrix * nu;
    const VectorXd dn_inner = kstar.matrix * nu - 0.5 * nu;
    energy += (grid.weights.array() * s_nu.array() * dn_inner.array()).sum();
    i1 += 0.5 * (grid.weights.array() * xl.array() * dn_inner.array()).sum();
    // D[y_l]|_- = x_l + S[nu_l] on the boundary (x_l harmonic).
    i2 += (grid.weights.array() * (xl + s_nu).array() * dn_inner.array())
              .sum();
  }
  out.dirichlet_energy = energy;
  out.r3 = std::abs(moment2 - (0.25 * (d - 4) * vol + energy));
  out.r3_stepwise =
      std::abs(moment2 - (0.25 * (d - 2) * vol - i1 + i2));
  return out;
}

std::array<double, 3> s_factors(double p1, double p2, double p3) {
  if (!(p1 > 0) || !(p2 > 0) || !(p3 > 0))
    throw invalid_geometry_error("ellipsoid semi-axes must be positive");
  const double p[3] = {p1, p2, p3};
  std::array<double, 3> out{};
  for (int l = 0; l < 3; ++l) {
    // s = tan^2(theta) maps [0, inf) to [0, pi/2); the integrand becomes
    // 2 sin th cos^2 th / ((p_l^2 c^2 + s^2) sqrt(prod (p_i^2 c^2 + s^2))).
    auto f = [&](double th) {
      const double c2 = std::cos(th) * std::cos(th);
      const double s2 = std::sin(th) * std::sin(th);
      double prod = 1.0;
      for (double pi2 : {p[0] * p[0], p[1] * p[1], p[2] * p[2]})
        prod *= pi2 * c2 + s2;
      return 2.0 * std::sin(th) * c2 /
             ((p[l] * p[l] * c2 + s2) * std::sqrt(prod));
    };
    out[l] = -0.5 * p1 * p2 * p3 *
             detail::integrate_to_tolerance(f, 0.0, 0.5 * M_PI, 1e-13);
  }
  const double total = out[0] + out[1] + out[2];
  if (std::abs(total + 1.0) > 1e-10)
    throw precision_error("depolarization factors do not sum to -1");
  return out;
}

PolarizationTensor ellipsoid_polarization(double p1, double p2, double p3,
                                          complex<double> lambda) {
  const auto s = s_factors(p1, p2, p3);
  const double vol = 4.0 * M_PI / 3.0 * p1 * p2 * p3;
  PolarizationTensor out{3, Eigen::MatrixXcd::Zero(3, 3), lambda};
  for (int l = 0; l < 3; ++l) {
    const complex<double> pole = 0.5 + s[l];
    if (std::abs(lambda - pole) < 1e-12)
      throw near_singular_error("lambda sits on a depolarization pole",
                                std::abs(lambda - pole));
    out.m(l, l) = vol / (lambda - pole);
  }
  return out;
}

ContractedTensors contracted_N(const PolarizationTensor& m) {
  if (m.dim != 2)
    throw configuration_error("contracted tensors are a 2D construction");
  const complex<double> m11 = m.m(0, 0), m22 = m.m(1, 1), m12 = m.m(0, 1);
  const complex<double> i2m12 = complex<double>(0, 2) * m12;
  return {m11 - m22 + i2m12, m11 + m22, m11 + m22, m11 - m22 - i2m12};
}

ContractedTensors contracted_N_direct(const QuadGrid2D& grid,
                                      const RealOperator& kstar,
                                      complex<double> lambda) {
  const int n = grid.n;
  MatrixXcd a = -kstar.matrix.cast<complex<double>>();
  a.diagonal().array() += lambda;
  Eigen::PartialPivLU<MatrixXcd> lu(a);

  auto solve_pair = [&](int sign_nu) {
    VectorXcd rhs(n);
    for (int i = 0; i < n; ++i)
      rhs(i) = complex<double>(grid.normals(0, i),
                               sign_nu * grid.normals(1, i));
    return VectorXcd(lu.solve(rhs));
  };
  auto pair_with = [&](int sign_x, const VectorXcd& u) {
    complex<double> sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const complex<double> xf(grid.points(0, i) - grid.center(0),
                               sign_x * (grid.points(1, i) - grid.center(1)));
      sum += grid.weights(i) * xf * u(i);
    }
    return sum;
  };
  const VectorXcd up = solve_pair(+1), um = solve_pair(-1);
  return {pair_with(+1, up), pair_with(+1, um), pair_with(-1, up),
          pair_with(-1, um)};
}

}  // namespace npspec::polarization
