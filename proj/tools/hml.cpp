// hml: command-line front end for the centrally-harmonic toolkit.
//
//   hml curvature      --manifest m.json [--out dir] [--directions n]
//   hml check-harmonic --manifest m.json [--out dir] [--tol x] [--directions n] [--radii r1,r2,...]
//   hml expand         --manifest m.json [--out dir] [--directions n]
//   hml deform         --manifest m.json [--out dir] [--directions n] [--radii r1,r2,...]
//
// Exit codes: 0 ok / harmonic, 1 not harmonic, 2 inconclusive, 3 usage or manifest error,
// 4 runtime or domain error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hml/catalog.hpp"
#include "hml/conformal.hpp"
#include "hml/curvature.hpp"
#include "hml/errors.hpp"
#include "hml/expansion.hpp"
#include "hml/geodesic.hpp"
#include "hml/sampling.hpp"
#include "hml/series.hpp"

using json = nlohmann::ordered_json;
using namespace hml;

namespace {

enum Exit { kOk = 0, kNotHarmonic = 1, kInconclusive = 2, kUsage = 3, kRuntime = 4 };

// ---------------------------------------------------------------------------
// Formatting

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

/// JSON numbers carry the same 13 significant digits as the CSV columns.
json num(double v) {
  if (!std::isfinite(v)) return v > 0 ? json("inf") : v < 0 ? json("-inf") : json(nullptr);
  const double r = std::strtod(fmt(v).c_str(), nullptr);
  return r == 0.0 ? 0.0 : r;
}

json num_array(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

json num_array(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

json num_matrix(const Matrix& M) {
  json a = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(num(M(i, j)));
    a.push_back(row);
  }
  return a;
}

// ---------------------------------------------------------------------------
// Manifest

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ManifestError(where + ": expected an object");
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) throw ManifestError(where + ": unknown key '" + k + "'");
}

double get_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ManifestError(where + ": expected a number");
  return v.get<double>();
}

int get_int(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() <= 0) throw ManifestError(where + ": expected a positive integer");
  return v.get<int>();
}

std::vector<double> get_numbers(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ManifestError(where + ": expected a non-empty array of numbers");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(get_number(x, where));
  return out;
}

struct PsiSpec {
  std::string kind;
  std::vector<double> coeffs;
};

struct BlowupSpec {
  double u_min = 1e-4, u_max = 1e-2;
  int samples = 25;
};

struct Manifest {
  std::string family, chart;
  CatalogParams params;
  std::optional<PsiSpec> psi;
  std::optional<Point> center;
  std::vector<Point> points;
  std::vector<double> radii;
  std::optional<int> directions;
  std::optional<double> tol;
  std::optional<int> steps;
  std::optional<BlowupSpec> blowup;
};

Manifest parse_manifest(const json& j) {
  check_keys(j, "manifest", {"metric", "deform", "analysis"});
  if (!j.contains("metric")) throw ManifestError("manifest: missing 'metric'");
  Manifest m;
  const json& metric = j.at("metric");
  if (!metric.is_object()) throw ManifestError("metric: expected an object");
  for (const auto& [k, v] : metric.items()) {
    if (k == "family") {
      if (!v.is_string()) throw ManifestError("metric.family: expected a string");
      m.family = v.get<std::string>();
    } else if (k == "chart") {
      if (!v.is_string()) throw ManifestError("metric.chart: expected a string");
      m.chart = v.get<std::string>();
    } else {
      m.params[k] = get_number(v, "metric." + k);
    }
  }
  if (m.family.empty()) throw ManifestError("metric: missing 'family'");

  if (j.contains("deform")) {
    const json& d = j.at("deform");
    check_keys(d, "deform", {"psi"});
    if (!d.contains("psi")) throw ManifestError("deform: missing 'psi'");
    const json& p = d.at("psi");
    if (!p.is_object() || !p.contains("kind") || !p.at("kind").is_string())
      throw ManifestError("deform.psi: expected an object with a string 'kind'");
    PsiSpec spec{p.at("kind").get<std::string>(), {}};
    if (spec.kind == "poly") {
      check_keys(p, "deform.psi", {"kind", "coeffs"});
      if (!p.contains("coeffs")) throw ManifestError("deform.psi: 'poly' needs 'coeffs'");
      spec.coeffs = get_numbers(p.at("coeffs"), "deform.psi.coeffs");
    } else if (spec.kind == "trivial-density" || spec.kind == "density-root") {
      check_keys(p, "deform.psi", {"kind"});
    } else {
      throw ManifestError("deform.psi: unknown kind '" + spec.kind + "'");
    }
    m.psi = spec;
  }

  if (j.contains("analysis")) {
    const json& a = j.at("analysis");
    check_keys(a, "analysis", {"center", "points", "radii", "directions", "tol", "steps", "blowup"});
    if (a.contains("center")) m.center = get_numbers(a.at("center"), "analysis.center");
    if (a.contains("points")) {
      if (!a.at("points").is_array()) throw ManifestError("analysis.points: expected an array of points");
      for (const auto& p : a.at("points")) m.points.push_back(get_numbers(p, "analysis.points"));
    }
    if (a.contains("radii")) m.radii = get_numbers(a.at("radii"), "analysis.radii");
    if (a.contains("directions")) m.directions = get_int(a.at("directions"), "analysis.directions");
    if (a.contains("tol")) m.tol = get_number(a.at("tol"), "analysis.tol");
    if (a.contains("steps")) m.steps = get_int(a.at("steps"), "analysis.steps");
    if (a.contains("blowup")) {
      const json& b = a.at("blowup");
      check_keys(b, "analysis.blowup", {"u_min", "u_max", "samples"});
      BlowupSpec s;
      if (b.contains("u_min")) s.u_min = get_number(b.at("u_min"), "analysis.blowup.u_min");
      if (b.contains("u_max")) s.u_max = get_number(b.at("u_max"), "analysis.blowup.u_max");
      if (b.contains("samples")) s.samples = get_int(b.at("samples"), "analysis.blowup.samples");
      m.blowup = s;
    }
  }
  return m;
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ManifestError("cannot open manifest '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ManifestError(std::string("manifest is not valid JSON: ") + e.what());
  }
  return parse_manifest(j);
}

struct Setup {
  CatalogEntry entry;
  ChartMetric metric;  // deformed when the manifest asks for it
  std::optional<RadialFunction> psi;
  Point center;
};

RadialFunction build_psi(const PsiSpec& spec, const CatalogEntry& entry) {
  if (spec.kind == "poly") return RadialFunction::polynomial(spec.coeffs);
  if (!entry.facts.reduced_density)
    throw ManifestError("deform.psi: '" + spec.kind + "' needs a catalog metric with a known radial density");
  const int m = entry.metric.dim();
  return spec.kind == "trivial-density" ? trivial_density_factor(*entry.facts.reduced_density, m)
                                        : density_root_factor(*entry.facts.reduced_density, m);
}

Setup build_setup(const Manifest& man) {
  std::string chart = man.chart;
  // Radial deformations need a chart with a declared radial variable.
  if (man.psi && chart.empty() && man.family == "fubini_study") chart = "normal";
  CatalogEntry entry = [&] {
    try {
      return build(man.family, man.params, chart);
    } catch (const InvalidArgument& e) {
      throw ManifestError(e.what());
    }
  }();
  Setup s{entry, entry.metric, std::nullopt, entry.center};
  if (man.psi) {
    if (!entry.metric.radial_variable())
      throw ManifestError("deform: chart '" + entry.metric.name() + "' has no declared radial variable");
    s.psi = build_psi(*man.psi, entry);
    s.metric = deform_metric(entry.metric, *s.psi);
    s.center = entry.metric.radial_variable()->center;
  }
  if (man.center) {
    if (static_cast<int>(man.center->size()) != entry.metric.dim())
      throw ManifestError("analysis.center: dimension mismatch");
    s.center = *man.center;
  }
  for (const auto& p : man.points)
    if (static_cast<int>(p.size()) != entry.metric.dim()) throw ManifestError("analysis.points: dimension mismatch");
  return s;
}

int thread_cap() {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("HML_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return n;
}

json metric_json(const Manifest& man, const Setup& s) {
  json j;
  j["family"] = man.family;
  j["name"] = s.metric.name();
  j["dim"] = s.metric.dim();
  json params = json::object();
  for (const auto& [k, v] : man.params) params[k] = num(v);
  j["params"] = params;
  if (s.psi) j["psi"] = s.psi->description();
  j["center"] = num_array(s.center);
  return j;
}

struct Options {
  std::string manifest;
  std::string out;
  std::optional<double> tol;
  std::optional<int> directions;
  std::vector<double> radii;
};

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary);
  if (!f) throw Error("cannot write " + name + " in '" + dir + "'");
  f << content;
}

void emit(const Options& opt, const std::string& name, const json& report, const std::string& csv_name = "",
          const std::string& csv = "") {
  const std::string text = report.dump(2) + "\n";
  std::cout << text;
  if (!opt.out.empty()) {
    write_file(opt.out, name + ".json", text);
    if (!csv_name.empty()) write_file(opt.out, csv_name, csv);
  }
}

std::pair<double, double> kappa_range(const ChartMetric& metric, const Point& x, int directions) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& d : unit_directions(metric.value(x), directions)) {
    const Eigen::SelfAdjointEigenSolver<Matrix> es(reduced_jacobi(metric, x, d));
    lo = std::min(lo, es.eigenvalues().minCoeff());
    hi = std::max(hi, es.eigenvalues().maxCoeff());
  }
  return {lo, hi};
}

IntegratorConfig integrator(const Manifest& man) {
  IntegratorConfig c;
  if (man.steps) c.steps = *man.steps;
  return c;
}

std::vector<double> radii_or(const Options& opt, const Manifest& man, std::vector<double> fallback) {
  if (!opt.radii.empty()) return opt.radii;
  if (!man.radii.empty()) return man.radii;
  return fallback;
}

int directions_or(const Options& opt, const Manifest& man, int fallback) {
  if (opt.directions) return *opt.directions;
  if (man.directions) return *man.directions;
  return fallback;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_curvature(const Options& opt) {
  const Manifest man = load_manifest(opt.manifest);
  const Setup s = build_setup(man);
  const int ndir = directions_or(opt, man, 64);
  std::vector<Point> points = man.points.empty() ? std::vector<Point>{s.center} : man.points;
  json report;
  report["command"] = "curvature";
  report["metric"] = metric_json(man, s);
  json pts = json::array();
  double kmin = std::numeric_limits<double>::infinity(), kmax = -kmin, defect = 0.0;
  for (const auto& x : points) {
    const CurvatureBundle b = curvature(s.metric, x, 0);
    const auto [lo, hi] = kappa_range(s.metric, x, ndir);
    const double e = einstein_defect(b);
    kmin = std::min(kmin, lo);
    kmax = std::max(kmax, hi);
    defect = std::max(defect, e);
    json p;
    p["point"] = num_array(x);
    p["metric"] = num_matrix(b.metric);
    p["ricci"] = num_matrix(b.ricci);
    p["scalar_curvature"] = num(b.scalar);
    p["riemann_norm"] = num(Eigen::Map<const Vector>(b.riemann.data(), static_cast<Eigen::Index>(b.riemann.size())).norm());
    p["einstein_defect"] = num(e);
    p["kappa_min"] = num(lo);
    p["kappa_max"] = num(hi);
    pts.push_back(p);
  }
  report["directions"] = ndir;
  report["points"] = pts;
  report["kappa_min"] = num(kmin);
  report["kappa_max"] = num(kmax);
  report["einstein_defect"] = num(defect);
  emit(opt, "curvature", report);
  return kOk;
}

int cmd_check_harmonic(const Options& opt) {
  const Manifest man = load_manifest(opt.manifest);
  const Setup s = build_setup(man);
  HarmonicityConfig cfg;
  cfg.radii = radii_or(opt, man, {});
  cfg.directions = directions_or(opt, man, cfg.directions);
  if (opt.tol) cfg.tolerance = *opt.tol;
  else if (man.tol) cfg.tolerance = *man.tol;
  cfg.integrator = integrator(man);
  cfg.threads = thread_cap();
  const HarmonicityReport r = centrally_harmonic_test(s.metric, s.center, cfg);

  json report;
  report["command"] = "check-harmonic";
  report["metric"] = metric_json(man, s);
  report["verdict"] = to_string(r.verdict);
  report["tolerance"] = num(r.tolerance);
  report["directions"] = cfg.directions;
  report["radii"] = num_array(r.radii);
  report["theta_spread"] = num_array(r.theta_spread);
  report["xi_spread"] = num_array(r.xi_spread);
  report["max_theta_spread"] = num(r.max_theta_spread);
  report["max_xi_spread"] = num(r.max_xi_spread);
  report["einstein_defect"] = num(r.einstein_defect);
  report["max_safe_radius"] = num(r.max_safe_radius);
  report["note"] = r.note;

  std::ostringstream csv;
  csv << "# r direction theta xi\n";
  for (std::size_t ri = 0; ri < r.table.radii.size(); ++ri)
    for (std::size_t di = 0; di < r.table.directions.size(); ++di)
      csv << fmt(r.table.radii[ri]) << ' ' << di << ' ' << fmt(r.table.theta(di, ri)) << ' '
          << fmt(r.table.xi(di, ri)) << '\n';
  emit(opt, "check_harmonic", report, "density.csv", csv.str());
  switch (r.verdict) {
    case HarmonicityReport::Verdict::Harmonic: return kOk;
    case HarmonicityReport::Verdict::NotHarmonic: return kNotHarmonic;
    default: return kInconclusive;
  }
}

int cmd_expand(const Options& opt) {
  const Manifest man = load_manifest(opt.manifest);
  const Setup s = build_setup(man);
  const int ndir = directions_or(opt, man, 3);
  const int m = s.metric.dim();
  const auto iota = s.metric.injectivity_radius();
  const double r_max = std::min(0.5, iota ? *iota / 4 : 0.5);
  const std::vector<double> radii = radii_or(opt, man, fit_radii(r_max, 48));
  const int order = 12;

  std::optional<CurvatureBundle> bundle;
  std::string note;
  try {
    bundle = curvature(s.metric, s.center, 4);
  } catch (const OrderExceeded& e) {
    note = std::string("analytic coefficients unavailable: ") + e.what();
  }
  const auto dirs = unit_directions(s.metric.value(s.center), ndir);
  const DensityTable table = density_profile(s.metric, s.center, dirs, radii, integrator(man), thread_cap());

  json out = json::array();
  double max_err = 0.0;
  for (std::size_t di = 0; di < dirs.size(); ++di) {
    std::vector<double> y;
    for (const auto& smp : table.samples[di]) y.push_back(smp.reduced_minus_one);
    const RadialFit fit = fit_density_deviation(radii, y, order);
    json d;
    d["direction"] = num_array(dirs[di]);
    if (bundle) {
      const DensityExpansion ex = density_coefficients(*bundle, dirs[di]);
      d["H"] = num_array(std::vector<double>(ex.H.begin() + 2, ex.H.begin() + 7));
      std::vector<double> err;
      for (int k = 2; k <= 6; ++k) err.push_back(std::abs(ex.H[static_cast<std::size_t>(k)] - fit.H[static_cast<std::size_t>(k)]));
      d["abs_error"] = num_array(err);
      max_err = std::max(max_err, *std::max_element(err.begin(), err.end()));
    } else {
      d["H"] = nullptr;
    }
    d["fitted"] = num_array(std::vector<double>(fit.H.begin() + 2, fit.H.end()));
    d["residual_rms"] = num(fit.residual_rms);
    d["residual_max"] = num(fit.residual_max);
    d["condition"] = num(fit.condition);
    out.push_back(d);
  }
  json report;
  report["command"] = "expand";
  report["metric"] = metric_json(man, s);
  report["order"] = order;
  report["first_index"] = 2;
  report["fit_radii"] = num_array(radii);
  report["directions"] = out;
  if (bundle) report["max_abs_error"] = num(max_err);
  if (!note.empty()) report["note"] = note;
  emit(opt, "expand", report);
  return kOk;
}

int cmd_deform(const Options& opt) {
  const Manifest man = load_manifest(opt.manifest);
  if (!man.psi) throw ManifestError("deform: manifest has no 'deform' section");
  const Setup s = build_setup(man);
  const ChartMetric& base = s.entry.metric;
  const int ndir = directions_or(opt, man, 4);
  const auto iota = base.injectivity_radius();
  const double r_top = std::min(1.0, iota ? *iota / 2 : 1.0);
  const std::vector<double> radii = radii_or(opt, man, linear_radii(r_top / 4, r_top, 4));

  json report;
  report["command"] = "deform";
  report["metric"] = metric_json(man, s);

  // Curvature of g_ψ at the center and at a few nearby coordinate points.
  std::vector<Point> points = man.points;
  if (points.empty()) {
    points.push_back(s.center);
    for (const auto& d : sphere_directions(base.dim(), 4)) {
      Point x = s.center;
      for (int i = 0; i < base.dim(); ++i) x[static_cast<std::size_t>(i)] += 0.3 * d(i);
      if (s.metric.in_domain(x)) points.push_back(x);
    }
  }
  double kmin = std::numeric_limits<double>::infinity(), kmax = -kmin, defect = 0.0;
  for (const auto& x : points) {
    const auto [lo, hi] = kappa_range(s.metric, x, 16);
    kmin = std::min(kmin, lo);
    kmax = std::max(kmax, hi);
    defect = std::max(defect, einstein_defect(curvature(s.metric, x, 0)));
  }
  json curv;
  curv["points"] = static_cast<int>(points.size());
  curv["kappa_min"] = num(kmin);
  curv["kappa_max"] = num(kmax);
  curv["constant_curvature"] = kmax - kmin <= 1e-7;
  curv["einstein_defect"] = num(defect);
  report["curvature"] = curv;

  const auto dirs = unit_directions(base.value(s.center), ndir);
  const DensityLawCheck law = density_law_check(base, *s.psi, dirs, radii, integrator(man), thread_cap());
  json dl;
  dl["radii"] = num_array(radii);
  dl["directions"] = ndir;
  dl["max_relative_error"] = num(law.max_relative_error);
  dl["max_reduced_deviation"] = num(law.max_reduced_deviation);
  report["density_law"] = dl;

  if (man.blowup) {
    if (man.family != "fubini_study" || man.psi->kind == "poly")
      throw ManifestError("analysis.blowup: only for fubini_study with a density-based ψ");
    const BlowupReport b = completeness_and_blowup(base.dim(), man.psi->kind, man.blowup->u_min, man.blowup->u_max,
                                                   man.blowup->samples);
    auto fit_json = [](const PowerLawFit& f) {
      json j;
      j["c"] = num(f.c);
      j["p"] = num(f.p);
      j["d"] = num(f.d);
      j["residual"] = num(f.residual);
      return j;
    };
    json bj;
    bj["factor"] = b.factor;
    bj["psi_exponent"] = num(b.psi_exponent);
    bj["psi_prefactor"] = num(b.psi_prefactor);
    bj["length"] = num(b.length);
    bj["length_error"] = num(b.length_error);
    bj["finite_length"] = b.finite_length;
    bj["direct"] = fit_json(b.direct);
    bj["formula"] = fit_json(b.formula);
    bj["max_route_disagreement"] = num(b.max_route_disagreement);
    json samples = json::array();
    for (std::size_t i = 0; i < b.direct.u.size(); ++i)
      samples.push_back({num(b.direct.u[i]), num(b.direct.value[i]), num(b.formula.value[i])});
    bj["samples"] = samples;
    report["blowup"] = bj;
  }

  std::ostringstream csv;
  csv << "# r r_deformed direction theta_base theta_predicted theta_direct\n";
  for (const auto& row : law.rows)
    csv << fmt(row.r) << ' ' << fmt(row.rc) << ' ' << row.direction << ' ' << fmt(row.theta_base) << ' '
        << fmt(row.theta_predicted) << ' ' << fmt(row.theta_direct) << '\n';
  emit(opt, "deform", report, "density.csv", csv.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curvature, density and conformal-deformation analyses for centrally harmonic metrics"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--manifest", opt.manifest, "manifest JSON file")->required();
    sub->add_option("--out", opt.out, "directory for the JSON report and CSV tables");
    sub->add_option("--directions", opt.directions, "number of sampled directions")->check(CLI::PositiveNumber);
  };
  auto add_radii = [&](CLI::App* sub) {
    sub->add_option("--radii", opt.radii, "comma-separated radii")->delimiter(',');
  };
  CLI::App* curv = app.add_subcommand("curvature", "curvature summary at sample points");
  add_common(curv);
  CLI::App* harm = app.add_subcommand("check-harmonic", "test whether the density is radial about the center");
  add_common(harm);
  add_radii(harm);
  harm->add_option("--tol", opt.tol, "spread tolerance")->check(CLI::PositiveNumber);
  CLI::App* expd = app.add_subcommand("expand", "density expansion coefficients, analytic and fitted");
  add_common(expd);
  add_radii(expd);
  CLI::App* dfm = app.add_subcommand("deform", "radial conformal deformation report");
  add_common(dfm);
  add_radii(dfm);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*curv) return cmd_curvature(opt);
    if (*harm) return cmd_check_harmonic(opt);
    if (*expd) return cmd_expand(opt);
    if (*dfm) return cmd_deform(opt);
  } catch (const ManifestError& e) {
    std::cerr << "manifest error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}
