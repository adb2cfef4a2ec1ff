#include "npspec/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "npspec/crosssec.hpp"
#include "npspec/multiparticle.hpp"
#include "npspec/polarization.hpp"
#include "npspec/resonance.hpp"
#include "npspec/scatcoef.hpp"
#include "npspec/spectral.hpp"

namespace npspec::cli {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// --- strict schema helpers ---------------------------------------------

void require_keys(const json& obj, const std::string& path,
                  const std::set<std::string>& allowed,
                  const std::set<std::string>& required) {
  if (!obj.is_object())
    throw configuration_error(path + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      throw configuration_error(path + "/" + it.key() + ": unknown field");
  }
  for (const auto& key : required) {
    if (!obj.contains(key))
      throw configuration_error(path + "/" + key + ": missing field");
  }
}

double get_num(const json& obj, const std::string& path,
               const std::string& key) {
  if (!obj.at(key).is_number())
    throw configuration_error(path + "/" + key + ": expected a number");
  return obj.at(key).get<double>();
}

std::complex<double> get_complex(const json& v, const std::string& path) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw configuration_error(path + ": expected a number or [re, im]");
}

// --- shapes --------------------------------------------------------------

struct ShapeConfig {
  std::string type;
  // 2D
  geometry::BoundaryCurve2D curve = geometry::make_ellipse(1, 1);
  // 3D
  std::array<double, 3> semi_axes{1, 1, 1};

  bool is_2d() const { return type == "ellipse" || type == "fourier_star"; }
};

ShapeConfig parse_shape(const json& shape, const std::string& path) {
  ShapeConfig out;
  require_keys(shape, path,
               {"type", "a", "b", "rotation", "center", "base_radius", "cos",
                "sin", "semi_axes"},
               {"type"});
  out.type = shape.at("type").get<std::string>();
  auto center = [&]() -> Eigen::Vector2d {
    if (!shape.contains("center")) return {0, 0};
    const auto& c = shape.at("center");
    if (!c.is_array() || c.size() != 2)
      throw configuration_error(path + "/center: expected [x, y]");
    return {c[0].get<double>(), c[1].get<double>()};
  };
  if (out.type == "ellipse") {
    out.curve = geometry::make_ellipse(
        get_num(shape, path, "a"), get_num(shape, path, "b"), center(),
        shape.contains("rotation") ? get_num(shape, path, "rotation") : 0.0);
  } else if (out.type == "fourier_star") {
    std::vector<double> cosc, sinc;
    if (shape.contains("cos")) cosc = shape.at("cos").get<std::vector<double>>();
    if (shape.contains("sin")) sinc = shape.at("sin").get<std::vector<double>>();
    out.curve = geometry::make_fourier_star(
        shape.contains("base_radius") ? get_num(shape, path, "base_radius")
                                      : 1.0,
        cosc, sinc, center());
  } else if (out.type == "ellipsoid" || out.type == "sphere") {
    if (out.type == "sphere") {
      const double r = get_num(shape, path, "a");
      out.semi_axes = {r, r, r};
    } else {
      const auto& p = shape.at("semi_axes");
      if (!p.is_array() || p.size() != 3)
        throw configuration_error(path + "/semi_axes: expected [p1, p2, p3]");
      out.semi_axes = {p[0].get<double>(), p[1].get<double>(),
                       p[2].get<double>()};
    }
  } else {
    throw configuration_error(path + "/type: unknown shape '" + out.type +
                              "'");
  }
  return out;
}

resonance::Material parse_material(const json& m, const std::string& path) {
  require_keys(m, path, {"eps_m", "mu_m", "eps_c", "mu_c", "drude"},
               {"eps_m", "mu_m", "eps_c"});
  std::optional<resonance::DrudeModel> drude;
  if (m.contains("drude")) {
    const auto& d = m.at("drude");
    require_keys(d, path + "/drude", {"mu0", "F", "omega0", "tau"},
                 {"mu0", "F", "omega0", "tau"});
    drude = resonance::DrudeModel{
        get_num(d, path + "/drude", "mu0"), get_num(d, path + "/drude", "F"),
        get_num(d, path + "/drude", "omega0"),
        get_num(d, path + "/drude", "tau")};
  }
  std::optional<std::complex<double>> fixed;
  if (m.contains("mu_c")) fixed = get_complex(m.at("mu_c"), path + "/mu_c");
  return resonance::make_material(get_num(m, path, "eps_m"),
                                  get_num(m, path, "mu_m"),
                                  get_complex(m.at("eps_c"), path + "/eps_c"),
                                  std::move(drude), fixed);
}

std::vector<double> parse_grid(const json& g, const std::string& path) {
  if (g.is_array()) {
    auto v = g.get<std::vector<double>>();
    if (v.empty()) throw configuration_error(path + ": empty grid");
    return v;
  }
  require_keys(g, path, {"min", "max", "count"}, {"min", "max", "count"});
  const double lo = get_num(g, path, "min"), hi = get_num(g, path, "max");
  const int count = int(get_num(g, path, "count"));
  if (count < 1 || !(hi >= lo))
    throw configuration_error(path + ": empty grid");
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i)
    v[i] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
  return v;
}

// --- output --------------------------------------------------------------

class CsvWriter {
public:
  CsvWriter(const std::string& out_path, std::ostream& fallback)
      : fallback_(fallback) {
    if (!out_path.empty()) {
      file_.open(out_path);
      if (!file_)
        throw configuration_error("cannot open output file " + out_path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : fallback_; }

private:
  std::ofstream file_;
  std::ostream& fallback_;
};

void write_header(std::ostream& os, const std::string& command,
                  const json& config,
                  const std::vector<std::string>& formulas,
                  const std::string& effective = "") {
  os << "# npspec " << command << "\n";
  os << "# units: dimensionless (angles in radians)\n";
  for (const auto& f : formulas) os << "# formula: " << f << "\n";
  if (!effective.empty()) os << "# effective: " << effective << "\n";
  os << "# config: " << config.dump() << "\n";
}

// --- subcommands ----------------------------------------------------------

int cmd_spectrum(const json& cfg, std::ostream& out) {
  const auto shape = parse_shape(cfg.at("shape"), "/shape");
  if (!shape.is_2d())
    throw configuration_error("/shape: spectrum needs a 2D curve");
  const auto& num = cfg.at("numeric");
  require_keys(num, "/numeric", {"n", "modes"}, {"n"});
  const int n = int(get_num(num, "/numeric", "n"));
  const int modes =
      num.contains("modes") ? int(get_num(num, "/numeric", "modes")) : 16;

  const auto w = spectral::build_workspace(shape.curve, n);
  CsvWriter csv(cfg.value("output", json::object()).value("csv", ""), out);
  write_header(csv.stream(), "spectrum", cfg,
               {"lambda_j: eigenvalues of K* in the H* inner product, "
                "|lambda| descending"},
               "n=" + std::to_string(n) + " modes=" + std::to_string(modes));
  csv.stream() << "j,lambda\n";
  for (int j = 0; j < std::min(modes, w.data.count()); ++j)
    csv.stream() << (j + 1) << "," << fmt(w.data.eigenvalues(j)) << "\n";
  return 0;
}

int cmd_polarization(const json& cfg, std::ostream& out) {
  const auto shape = parse_shape(cfg.at("shape"), "/shape");
  const auto& num = cfg.at("numeric");
  require_keys(num, "/numeric", {"n", "lambda"}, {"lambda"});

  std::vector<std::complex<double>> lambdas;
  for (const auto& v : num.at("lambda"))
    lambdas.push_back(get_complex(v, "/numeric/lambda"));
  if (lambdas.empty())
    throw configuration_error("/numeric/lambda: empty list");

  CsvWriter csv(cfg.value("output", json::object()).value("csv", ""), out);
  write_header(csv.stream(), "polarization", cfg,
               {"M(lambda) = int x (lambda I - K*)^{-1}[nu] dsigma"});
  if (shape.is_2d()) {
    const int n = int(get_num(num, "/numeric", "n"));
    const auto w = spectral::build_workspace(shape.curve, n);
    csv.stream() << "lambda_re,lambda_im,m11_re,m11_im,m12_re,m12_im,"
                    "m22_re,m22_im\n";
    for (const auto lambda : lambdas) {
      const auto m =
          polarization::polarization_direct(w.grid, w.Kstar, lambda, &w.data);
      csv.stream() << fmt(lambda.real()) << "," << fmt(lambda.imag()) << ","
                   << fmt(m.m(0, 0).real()) << "," << fmt(m.m(0, 0).imag())
                   << "," << fmt(m.m(0, 1).real()) << ","
                   << fmt(m.m(0, 1).imag()) << "," << fmt(m.m(1, 1).real())
                   << "," << fmt(m.m(1, 1).imag()) << "\n";
    }
  } else {
    csv.stream() << "lambda_re,lambda_im,m11_re,m11_im,m22_re,m22_im,"
                    "m33_re,m33_im\n";
    for (const auto lambda : lambdas) {
      const auto m = polarization::ellipsoid_polarization(
          shape.semi_axes[0], shape.semi_axes[1], shape.semi_axes[2], lambda);
      csv.stream() << fmt(lambda.real()) << "," << fmt(lambda.imag()) << ","
                   << fmt(m.m(0, 0).real()) << "," << fmt(m.m(0, 0).imag())
                   << "," << fmt(m.m(1, 1).real()) << ","
                   << fmt(m.m(1, 1).imag()) << "," << fmt(m.m(2, 2).real())
                   << "," << fmt(m.m(2, 2).imag()) << "\n";
    }
  }
  return 0;
}

int cmd_resonance(const json& cfg, std::ostream& out) {
  const auto shape = parse_shape(cfg.at("shape"), "/shape");
  const auto mat = parse_material(cfg.at("material"), "/material");
  const auto& num = cfg.at("numeric");
  require_keys(num, "/numeric",
               {"n", "omega", "delta", "modes", "correction", "quad_order"},
               {"omega", "delta"});
  const auto omegas = parse_grid(num.at("omega"), "/numeric/omega");
  const double delta = get_num(num, "/numeric", "delta");
  const std::string correction =
      num.contains("correction") ? num.at("correction").get<std::string>()
                                 : "none";

  std::vector<double> lambdas;
  std::function<std::complex<double>(int, double)> corr_fn;
  std::optional<spectral::Workspace> w;
  std::optional<multiparticle::SphereQuad> quad;

  if (shape.is_2d()) {
    const int n = num.contains("n") ? int(get_num(num, "/numeric", "n")) : 128;
    w.emplace(spectral::build_workspace(shape.curve, n));
    const int modes =
        num.contains("modes") ? int(get_num(num, "/numeric", "modes")) : 2;
    for (int j = 0; j < std::min(modes, w->data.count()); ++j)
      lambdas.push_back(w->data.eigenvalues(j));
    if (correction == "2d") {
      corr_fn = [&w, &mat](int j, double omega) {
        return omega * omega * std::log(omega) *
               resonance::correction_2d(j + 1, *w, mat, omega);
      };
    } else if (correction != "none") {
      throw configuration_error("/numeric/correction: must be none or 2d");
    }
  } else {
    lambdas.push_back(1.0 / 6.0);  // sphere dipole
    if (correction == "sphere") {
      const int order = num.contains("quad_order")
                            ? int(get_num(num, "/numeric", "quad_order"))
                            : 24;
      quad.emplace(multiparticle::make_sphere_quad(1.0, order, 2 * order));
      corr_fn = [&quad, &mat, delta](int, double omega) {
        return omega * omega * delta * delta *
               resonance::correction_3d_sphere(mat, omega, *quad);
      };
    } else if (correction != "none") {
      throw configuration_error(
          "/numeric/correction: must be none or sphere for 3D shapes");
    }
  }

  const auto reports = resonance::find_resonances(
      mat, lambdas, omegas.front(), omegas.back(), delta, corr_fn,
      int(omegas.size()));

  CsvWriter csv(cfg.value("output", json::object()).value("csv", ""), out);
  std::string effective = "delta=" + fmt(delta) + " correction=" + correction;
  if (w) effective += " n=" + std::to_string(w->grid.n);
  effective += " modes=" + std::to_string(int(lambdas.size()));
  write_header(
      csv.stream(), "resonance", cfg,
      {"lambda(w) = (mu_m + mu_c(w)) / (2 (mu_m - mu_c(w)))",
       "tau_j(w) = 1/(2 mu_m) + 1/(2 mu_c) - (1/mu_c - 1/mu_m) lambda_j"},
      effective);
  for (const auto& rep : reports) {
    csv.stream() << "# mode " << rep.mode << ": lambda_j=" << fmt(rep.lambda_j)
                 << " omega_qs=" << fmt(rep.omega_quasi_static)
                 << " omega_corrected=" << fmt(rep.omega_corrected)
                 << " min_tau_over_omega3=" << fmt(rep.min_tau_over_omega3)
                 << "\n";
  }
  csv.stream() << "omega,lambda_re,lambda_im,abs_tau_min,resonance\n";
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    const double omega = omegas[i];
    const auto mu = resonance::mu_c_at(mat, omega);
    const auto lambda = resonance::lambda_of(mu, mat.mu_m);
    double tau_min = std::numeric_limits<double>::infinity();
    for (const double lj : lambdas)
      tau_min = std::min(tau_min,
                         std::abs(resonance::tau_mode(mu, mat.mu_m, lj)));
    bool marked = false;
    for (const auto& rep : reports)
      if (i + 1 < omegas.size() && rep.omega_quasi_static >= omega &&
          rep.omega_quasi_static < omegas[i + 1])
        marked = true;
    csv.stream() << fmt(omega) << "," << fmt(lambda.real()) << ","
                 << fmt(lambda.imag()) << "," << fmt(tau_min) << ","
                 << (marked ? 1 : 0) << "\n";
  }
  return 0;
}

int cmd_cross_sections(const json& cfg, std::ostream& out) {
  const auto shape = parse_shape(cfg.at("shape"), "/shape");
  if (shape.is_2d())
    throw configuration_error(
        "/shape: cross-sections require a 3D shape (orientation averaging "
        "is spherical)");
  const auto mat = parse_material(cfg.at("material"), "/material");
  const auto& num = cfg.at("numeric");
  require_keys(num, "/numeric", {"omega"}, {"omega"});
  const auto omegas = parse_grid(num.at("omega"), "/numeric/omega");

  CsvWriter csv(cfg.value("output", json::object()).value("csv", ""), out);
  write_header(csv.stream(), "cross-sections", cfg,
               {"Q_ext = -(k/3) Im Tr M (sphere-averaged optical theorem)",
                "Q_s = k^4 (16 pi / 9) |Tr M|^2", "Q_a = Q_ext - Q_s",
                "q_a_negative flags truncation artifacts outside the "
                "quasi-static regime"});
  csv.stream() << "omega,lambda_re,lambda_im,q_ext,q_s,q_a,q_a_negative\n";
  for (const double omega : omegas) {
    const auto lambda =
        resonance::lambda_of(resonance::mu_c_at(mat, omega), mat.mu_m);
    const auto m = polarization::ellipsoid_polarization(
        shape.semi_axes[0], shape.semi_axes[1], shape.semi_axes[2], lambda);
    const double k_m = omega * std::sqrt(mat.eps_m * mat.mu_m);
    const auto q = crosssec::averaged_cross_sections(m, k_m);
    csv.stream() << fmt(omega) << "," << fmt(lambda.real()) << ","
                 << fmt(lambda.imag()) << "," << fmt(q.q_ext) << ","
                 << fmt(q.q_s) << "," << fmt(q.q_a) << ","
                 << (q.q_a_negative ? 1 : 0) << "\n";
  }
  return 0;
}

int cmd_bounds(const json& cfg, std::ostream& out) {
  const auto shape = parse_shape(cfg.at("shape"), "/shape");
  if (!shape.is_2d())
    throw configuration_error("/shape: bounds sweep expects a 2D curve");
  const auto& num = cfg.at("numeric");
  require_keys(num, "/numeric", {"n", "lambda_re", "lambda_im", "ellipsoid"},
               {"n", "lambda_re", "lambda_im"});
  const int n = int(get_num(num, "/numeric", "n"));
  const auto re = parse_grid(num.at("lambda_re"), "/numeric/lambda_re");
  const auto im = parse_grid(num.at("lambda_im"), "/numeric/lambda_im");
  std::optional<std::array<double, 3>> ellipsoid;
  if (num.contains("ellipsoid")) {
    const auto& p = num.at("ellipsoid");
    if (!p.is_array() || p.size() != 3)
      throw configuration_error("/numeric/ellipsoid: expected [p1, p2, p3]");
    ellipsoid = {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
  }

  const auto w = spectral::build_workspace(shape.curve, n);
  const double area = geometry::area(w.grid);

  CsvWriter csv(cfg.value("output", json::object()).value("csv", ""), out);
  write_header(
      csv.stream(), "bounds", cfg,
      {"abs_im_tr_m: |Im Tr M(lambda)| from the dense resolvent solve",
       "bound_general: volume bound d|D|(lambda'^2 + 1/4)/...",
       "bound_ellipse: 4|D|lambda'^2/(|l''|(l''^2+4l'^2)) + 2|l''||D|/(...)",
       "bound_ellipsoid: |D|(3l'^2 + l' - 1/4 + s.s)/(...) + 3|l''||D|/(...)"});
  csv.stream() << "lambda_re,lambda_im,abs_im_tr_m,bound_general,"
                  "bound_ellipse,bound_ellipsoid\n";
  for (const double li : im) {
    for (const double lr : re) {
      const std::complex<double> lambda(lr, li);
      const auto m =
          polarization::polarization_direct(w.grid, w.Kstar, lambda, &w.data);
      const double imtr = std::abs(m.m.trace().imag());
      double b3 = std::numeric_limits<double>::quiet_NaN();
      if (ellipsoid) {
        const auto s = polarization::s_factors((*ellipsoid)[0],
                                               (*ellipsoid)[1], (*ellipsoid)[2]);
        const double vol = 4.0 * M_PI / 3.0 * (*ellipsoid)[0] *
                           (*ellipsoid)[1] * (*ellipsoid)[2];
        b3 = crosssec::bound_ellipsoid(lambda, vol, s);
      }
      csv.stream() << fmt(lr) << "," << fmt(li) << "," << fmt(imtr) << ","
                   << fmt(crosssec::bound_general(lambda, area, 2)) << ","
                   << fmt(crosssec::bound_ellipse(lambda, area)) << ","
                   << fmt(b3) << "\n";
    }
  }
  return 0;
}

int cmd_scatcoef(const json& cfg, std::ostream& out) {
  const auto shape = parse_shape(cfg.at("shape"), "/shape");
  if (!shape.is_2d())
    throw configuration_error("/shape: scattering coefficients are 2D");
  const auto mat = parse_material(cfg.at("material"), "/material");
  const auto& num = cfg.at("numeric");
  require_keys(num, "/numeric", {"n", "omega", "n_max"}, {"n", "omega"});
  const int n = int(get_num(num, "/numeric", "n"));
  const int n_max =
      num.contains("n_max") ? int(get_num(num, "/numeric", "n_max")) : 3;
  const auto omegas = parse_grid(num.at("omega"), "/numeric/omega");

  const auto grid = geometry::discretize(shape.curve, n);
  CsvWriter csv(cfg.value("output", json::object()).value("csv", ""), out);
  write_header(csv.stream(), "scatcoef", cfg,
               {"W_nm = int J_n(k_m |y|) e^{-i n theta} psi_m dsigma"},
               "n=" + std::to_string(n) + " n_max=" + std::to_string(n_max));
  csv.stream() << "omega,n,m,w_re,w_im\n";
  for (const double omega : omegas) {
    const auto sc = scatcoef::compute_all(grid, mat, omega, n_max);
    for (int nn = -n_max; nn <= n_max; ++nn)
      for (int mm = -n_max; mm <= n_max; ++mm)
        csv.stream() << fmt(omega) << "," << nn << "," << mm << ","
                     << fmt(sc.at(nn, mm).real()) << ","
                     << fmt(sc.at(nn, mm).imag()) << "\n";
  }
  return 0;
}

json complex_to_json(std::complex<double> z) {
  return json::array({z.real(), z.imag()});
}

int cmd_hybridize(const json& cfg, std::ostream& out) {
  const auto mat = parse_material(cfg.at("material"), "/material");
  const auto& num = cfg.at("numeric");
  require_keys(num, "/numeric", {"centers", "delta", "omega", "quad_order"},
               {"centers", "delta", "omega"});
  std::vector<Eigen::Vector3d> centers;
  for (const auto& c : num.at("centers")) {
    if (!c.is_array() || c.size() != 3)
      throw configuration_error("/numeric/centers: expected [x, y, z] rows");
    centers.emplace_back(c[0].get<double>(), c[1].get<double>(),
                         c[2].get<double>());
  }
  const double delta = get_num(num, "/numeric", "delta");
  const double omega = get_num(num, "/numeric", "omega");
  const int order = num.contains("quad_order")
                        ? int(get_num(num, "/numeric", "quad_order"))
                        : 16;

  const auto array = multiparticle::make_particle_array(centers, delta);
  const auto quad = multiparticle::make_sphere_quad(delta, order, 2 * order);
  const auto mu_c = resonance::mu_c_at(mat, omega);
  const auto tau =
      resonance::tau_mode(mu_c, mat.mu_m, 1.0 / 6.0);

  json result;
  result["omega"] = omega;
  result["quad_order"] = order;
  result["validity_omega2_over_delta"] = omega * omega / delta;
  result["tau_static"] = complex_to_json(tau);
  const char* names[3] = {"x", "y", "z"};
  for (int axis = 0; axis < 3; ++axis) {
    const auto r = multiparticle::coupling_matrix(array, quad, axis, mu_c,
                                                  mat.mu_m);
    const auto hyb = multiparticle::hybridize(r, tau);
    json mode;
    for (int p = 0; p < r.rows(); ++p) {
      json row = json::array();
      for (int q = 0; q < r.cols(); ++q) row.push_back(complex_to_json(r(p, q)));
      mode["R"].push_back(row);
    }
    for (int l = 0; l < hyb.tau_split.size(); ++l) {
      mode["tau_split"].push_back(complex_to_json(hyb.tau_split(l)));
      mode["tau_total"].push_back(complex_to_json(hyb.tau_total(l)));
      json xcol = json::array(), xtcol = json::array();
      for (int p = 0; p < hyb.x.rows(); ++p) {
        xcol.push_back(complex_to_json(hyb.x(p, l)));
        xtcol.push_back(complex_to_json(hyb.x_adjoint(p, l)));
      }
      mode["X"].push_back(xcol);
      mode["X_adjoint"].push_back(xtcol);
    }
    result["modes"][names[axis]] = std::move(mode);
  }

  const std::string path =
      cfg.value("output", json::object()).value("json", "");
  if (path.empty()) {
    out << result.dump(2) << "\n";
  } else {
    std::ofstream f(path);
    if (!f) throw configuration_error("cannot open output file " + path);
    f << result.dump(2) << "\n";
  }
  return 0;
}

int cmd_greenmap(const json& cfg, std::ostream& out) {
  const auto mat = parse_material(cfg.at("material"), "/material");
  const auto& num = cfg.at("numeric");
  require_keys(num, "/numeric",
               {"centers", "delta", "omega", "x0", "direction", "half_extent",
                "samples", "quad_order"},
               {"centers", "delta", "omega", "x0", "direction", "half_extent",
                "samples"});
  std::vector<Eigen::Vector3d> centers;
  for (const auto& c : num.at("centers"))
    centers.emplace_back(c[0].get<double>(), c[1].get<double>(),
                         c[2].get<double>());
  auto vec3 = [&](const char* key) {
    const auto& v = num.at(key);
    if (!v.is_array() || v.size() != 3)
      throw configuration_error(std::string("/numeric/") + key +
                                ": expected [x, y, z]");
    return Eigen::Vector3d(v[0].get<double>(), v[1].get<double>(),
                           v[2].get<double>());
  };
  const double delta = get_num(num, "/numeric", "delta");
  const double omega = get_num(num, "/numeric", "omega");
  const int order = num.contains("quad_order")
                        ? int(get_num(num, "/numeric", "quad_order"))
                        : 16;

  const auto array = multiparticle::make_particle_array(centers, delta);
  const auto quad = multiparticle::make_sphere_quad(delta, order, 2 * order);
  const double k_m = omega * std::sqrt(mat.eps_m * mat.mu_m);
  const multiparticle::GreenFunction green(
      array, quad, resonance::mu_c_at(mat, omega), mat.mu_m, k_m);
  const auto map = multiparticle::im_green_map(
      green, vec3("x0"), vec3("direction"),
      get_num(num, "/numeric", "half_extent"),
      int(get_num(num, "/numeric", "samples")));

  CsvWriter csv(cfg.value("output", json::object()).value("csv", ""), out);
  write_header(csv.stream(), "greenmap", cfg,
               {"Im Gamma(x, x0): free Green function plus resonant dipole "
                "expansion"});
  csv.stream() << "x,y,z,im_gamma,im_g_free\n";
  for (int i = 0; i < map.im_gamma.size(); ++i)
    csv.stream() << fmt(map.points(0, i)) << "," << fmt(map.points(1, i))
                 << "," << fmt(map.points(2, i)) << "," << fmt(map.im_gamma(i))
                 << "," << fmt(map.im_free(i)) << "\n";

  json metrics;
  metrics["quad_order"] = order;
  metrics["peak_position"] = map.peak_position;
  metrics["peak_value"] = map.peak_value;
  metrics["fwhm"] = map.fwhm;
  metrics["reference_fwhm"] = map.reference_fwhm;
  metrics["wavelength"] = 2.0 * M_PI / k_m;
  metrics["validity_omega2_over_delta"] = green.validity_ratio(omega);
  metrics["domain_warning"] = map.domain_warning;
  const std::string path =
      cfg.value("output", json::object()).value("json", "");
  if (path.empty()) {
    out << metrics.dump(2) << "\n";
  } else {
    std::ofstream f(path);
    if (!f) throw configuration_error("cannot open output file " + path);
    f << metrics.dump(2) << "\n";
  }
  return 0;
}

int dispatch(const std::string& command, const json& cfg, std::ostream& out) {
  if (command == "spectrum") return cmd_spectrum(cfg, out);
  if (command == "polarization") return cmd_polarization(cfg, out);
  if (command == "resonance") return cmd_resonance(cfg, out);
  if (command == "cross-sections") return cmd_cross_sections(cfg, out);
  if (command == "bounds") return cmd_bounds(cfg, out);
  if (command == "scatcoef") return cmd_scatcoef(cfg, out);
  if (command == "hybridize") return cmd_hybridize(cfg, out);
  if (command == "greenmap") return cmd_greenmap(cfg, out);
  throw configuration_error("unknown command '" + command + "'");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  try {
    if (args.size() != 2) {
      err << "usage: npspec <command> <config.json>\n"
             "commands: spectrum polarization resonance cross-sections "
             "bounds scatcoef hybridize greenmap\n";
      return 2;
    }
    const std::string& command = args[0];
    std::ifstream f(args[1]);
    if (!f) {
      err << "npspec: cannot read config " << args[1] << "\n";
      return 2;
    }
    json cfg;
    try {
      cfg = json::parse(f);
    } catch (const json::parse_error& e) {
      err << "npspec: config parse error: " << e.what() << "\n";
      return 2;
    }
    require_keys(cfg, "",
                 {"version", "command", "shape", "material", "numeric",
                  "output"},
                 {"version", "command", "numeric"});
    if (cfg.at("version").get<int>() != 1) {
      err << "npspec: /version: unsupported config version\n";
      return 2;
    }
    if (cfg.at("command").get<std::string>() != command) {
      err << "npspec: /command: config is for '"
          << cfg.at("command").get<std::string>() << "', invoked as '"
          << command << "'\n";
      return 2;
    }
    if (cfg.contains("output"))
      require_keys(cfg.at("output"), "/output", {"csv", "json"}, {});
    return dispatch(command, cfg, out);
  } catch (const configuration_error& e) {
    err << "npspec: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    err << "npspec: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const error& e) {
    err << "npspec: numerical error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace npspec::cli
