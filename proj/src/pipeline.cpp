#include "gkforge/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "gkforge/errors.hpp"
#include "gkforge/examples.hpp"
#include "gkforge/frame_algebra.hpp"

namespace gkforge::pipeline {

using nlohmann::json;

const char* tool_version() { return GKFORGE_VERSION; }

// ---------------------------------------------------------------- config

namespace {

const json& require(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ConfigError(std::string("config is missing '") + key + "'");
  return doc.at(key);
}

int as_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
  return v.get<int>();
}

double as_real(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError("'" + key + "' must be finite");
  return x;
}

Eigen::Vector3d as_vec3(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 3) throw ConfigError("'" + key + "' must be an array of 3 numbers");
  return {as_real(v[0], key), as_real(v[1], key), as_real(v[2], key)};
}

void only_keys(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) throw ConfigError("'" + where + "' must be an object");
  for (const auto& [k, v] : obj.items())
    if (!known.contains(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

json vec_json(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }

}  // namespace

Config Config::from_json(const json& doc) {
  only_keys(doc,
            {"k_plus", "k_minus", "l_plus", "l_minus", "lambda", "lambda0", "poles", "holonomy",
             "z_quotient", "fd", "samples", "seed", "box", "tolerances"},
            "config");
  Config c;
  c.k_plus = as_int(require(doc, "k_plus"), "k_plus");
  if (doc.contains("k_minus") && !doc["k_minus"].is_null())
    c.k_minus = as_int(doc["k_minus"], "k_minus");
  if (doc.contains("l_plus")) c.l_plus = as_int(doc["l_plus"], "l_plus");
  if (doc.contains("l_minus")) c.l_minus = as_int(doc["l_minus"], "l_minus");
  c.lambda = as_real(require(doc, "lambda"), "lambda");
  if (doc.contains("lambda0")) c.lambda0 = as_real(doc["lambda0"], "lambda0");
  if (doc.contains("poles")) {
    if (!doc["poles"].is_array()) throw ConfigError("'poles' must be an array");
    for (const auto& p : doc["poles"]) {
      only_keys(p, {"mu1", "mu_plus", "mu_minus"}, "pole");
      c.poles.push_back({as_real(require(p, "mu1"), "mu1"), as_real(require(p, "mu_plus"), "mu_plus"),
                         as_real(require(p, "mu_minus"), "mu_minus")});
    }
  }
  if (doc.contains("holonomy")) {
    c.holonomy = as_real(doc["holonomy"], "holonomy");
    if (!(c.holonomy >= 0.0 && c.holonomy < 1.0)) throw ConfigError("'holonomy' must lie in [0, 1)");
  }
  if (doc.contains("z_quotient") && !doc["z_quotient"].is_null()) {
    const json& z = doc["z_quotient"];
    only_keys(z, {"c1p", "c"}, "z_quotient");
    c.z_quotient = ZTranslation{as_real(require(z, "c1p"), "c1p"), as_real(require(z, "c"), "c")};
    if (c.z_quotient->c == 0.0) throw ConfigError("'z_quotient.c' must be nonzero");
  }
  if (c.holonomy != 0.0 && !c.z_quotient)
    throw ConfigError("a nonzero 'holonomy' needs 'z_quotient'");
  if (doc.contains("fd")) {
    const json& fd = doc["fd"];
    only_keys(fd, {"order", "step"}, "fd");
    if (fd.contains("order")) c.fd.order = as_int(fd["order"], "fd.order");
    if (fd.contains("step")) c.fd.step = as_real(fd["step"], "fd.step");
  }
  try {
    c.fd.validate();
  } catch (const InvalidParamsError& e) {
    throw ConfigError(e.what());
  }
  if (doc.contains("samples")) {
    const int n = as_int(doc["samples"], "samples");
    if (n < 1) throw ConfigError("'samples' must be positive");
    c.samples = static_cast<std::size_t>(n);
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ConfigError("'seed' must be a nonnegative integer");
    c.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("box")) {
    only_keys(doc["box"], {"center", "half_width"}, "box");
    if (doc["box"].contains("center")) c.box.center = as_vec3(doc["box"]["center"], "box.center");
    if (doc["box"].contains("half_width"))
      c.box.half_width = as_vec3(doc["box"]["half_width"], "box.half_width");
    if (!(c.box.half_width.minCoeff() > 0.0)) throw ConfigError("'box.half_width' must be positive");
  }
  if (doc.contains("tolerances")) {
    if (!doc["tolerances"].is_object()) throw ConfigError("'tolerances' must be an object");
    for (const auto& [k, v] : doc["tolerances"].items()) {
      const double t = as_real(v, "tolerances." + k);
      if (!(t > 0.0)) throw ConfigError("tolerance '" + k + "' must be positive");
      c.tolerances[k] = t;
    }
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(doc);
}

json Config::to_json() const {
  json poles_json = json::array();
  for (const auto& z : poles)
    poles_json.push_back({{"mu1", z.mu1}, {"mu_plus", z.mu_plus}, {"mu_minus", z.mu_minus}});
  json out{{"k_plus", k_plus},
           {"k_minus", k_minus ? json(*k_minus) : json(nullptr)},
           {"l_plus", l_plus},
           {"l_minus", l_minus},
           {"lambda", lambda},
           {"lambda0", lambda0},
           {"poles", poles_json},
           {"holonomy", holonomy},
           {"z_quotient", z_quotient ? json{{"c1p", z_quotient->c1p}, {"c", z_quotient->c}}
                                     : json(nullptr)},
           {"fd", {{"order", fd.order}, {"step", fd.step}}},
           {"samples", samples},
           {"seed", seed},
           {"box", {{"center", vec_json(box.center)}, {"half_width", vec_json(box.half_width)}}}};
  if (!tolerances.empty()) out["tolerances"] = tolerances;
  return out;
}

double Config::tolerance(const std::string& name, double fallback) const {
  const auto it = tolerances.find(name);
  return it == tolerances.end() ? fallback : it->second;
}

// ---------------------------------------------------------------- construction

Construction construct(const Config& config, const RunOptions& options) {
  const SolitonParams params = SolitonParams::make(config.k_plus, config.k_minus, config.l_plus,
                                                   config.l_minus);
  const OrbifoldModel model = OrbifoldModel::for_params(params, config.z_quotient);
  auto angle = std::make_shared<SolitonAngle>(params);
  SuperpositionSpec spec;
  spec.lambda = config.lambda;
  spec.lambda0 = config.lambda0;
  spec.allow_incomplete = options.allow_incomplete;
  for (const auto& z : config.poles) spec.poles.push_back({z, std::nullopt});
  auto w = std::make_shared<ScalarSolution>(superpose(model, spec));

  MomentPoint base = MomentPoint::from_vec(config.box.center);
  for (const auto& z : config.poles)
    if ((z.vec() - base.vec()).norm() == 0.0) base.mu1 += 0.5 * options.pole_margin;
  const Eigen::Vector3d shift =
      config.holonomy != 0.0 ? holonomy_shift(model, config.holonomy) : Eigen::Vector3d::Zero();
  auto structure = std::make_shared<GkStructure>(
      angle, w, GaugePotential(angle, w, base, config.poles, 32, shift));
  return {config, params, model, angle, w, config.poles, structure};
}

// ---------------------------------------------------------------- reports

bool Report::pass() const {
  return std::all_of(stages.begin(), stages.end(), [](const Stage& s) { return s.pass; });
}

const Stage* Report::find(const std::string& name) const {
  for (const auto& s : stages)
    if (s.name == name) return &s;
  return nullptr;
}

json Report::to_json() const {
  json st = json::array();
  for (const auto& s : stages) st.push_back({{"name", s.name}, {"pass", s.pass}, {"detail", s.detail}});
  return {{"schema_version", kReportSchemaVersion},
          {"tool", {{"name", "gkforge"}, {"version", tool_version()}}},
          {"command", command},
          {"config", config},
          {"stages", st},
          {"pass", pass()},
          {"wall_time_seconds", wall_time}};
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::vector<Eigen::Vector4d> samples_for(const Construction& c, const RunOptions& options) {
  SamplingOptions s;
  s.samples = c.config.samples;
  s.seed = c.config.seed;
  s.max_angle = options.max_angle;
  s.pole_margin = options.pole_margin;
  return sample_points(*c.angle, c.config.box, c.poles, s);
}

MomentPoint moment_of(const Eigen::Vector4d& x) { return {x[1], x[2], x[3]}; }

Stage threshold_stage(std::string name, double max, double tolerance, json extra = json::object()) {
  extra["max"] = max;
  extra["tolerance"] = tolerance;
  return {std::move(name), max < tolerance, std::move(extra)};
}

Stage summary_stage(const Construction& c, const std::vector<Eigen::Vector4d>& samples) {
  double w_lo = std::numeric_limits<double>::infinity(), w_hi = -w_lo;
  double p_lo = w_lo, p_hi = -w_lo;
  for (const auto& x : samples) {
    const double w = c.w->value(moment_of(x));
    const double p = c.angle->angle_value(moment_of(x));
    w_lo = std::min(w_lo, w);
    w_hi = std::max(w_hi, w);
    p_lo = std::min(p_lo, p);
    p_hi = std::max(p_hi, p);
  }
  return {"summary",
          w_lo > 0.0,
          {{"samples", samples.size()},
           {"W_range", {w_lo, w_hi}},
           {"p_range", {p_lo, p_hi}},
           {"model", c.model.kind == ModelKind::Cone                 ? "cone"
                     : c.model.kind == ModelKind::HalfSpaceZQuotient ? "half_space_z_quotient"
                                                                     : "half_space"},
           {"warnings", c.w->warnings()}}};
}

// Sphere radii around a pole, kept well inside the h-distance to any other pole.
std::pair<double, double> flux_radii(const Construction& c, const MomentPoint& z) {
  double outer = 0.1;
  for (const auto& other : c.poles)
    if ((other.vec() - z.vec()).norm() > 0.0)
      outer = std::min(outer, 0.3 * h_distance(*c.angle, z, other));
  return {0.5 * outer, outer};
}

std::vector<Stage> flux_stages(const Construction& c) {
  const double rel_tol = c.config.tolerance("flux", 5e-3);
  const double agree_tol = c.config.tolerance("flux_agreement", 1e-3);
  json per_pole = json::array();
  bool ok = true;
  for (const auto& z : c.poles) {
    const auto [r_in, r_out] = flux_radii(c, z);
    const FluxResult inner = flux(*c.angle, *c.w, z, r_in, {}, c.poles);
    const FluxResult outer = flux(*c.angle, *c.w, z, r_out, {}, c.poles);
    const double e_in = std::abs(inner.value / -kTwoPi - 1.0);
    const double e_out = std::abs(outer.value / -kTwoPi - 1.0);
    const double agree = std::abs(inner.value - outer.value) / std::abs(outer.value);
    const bool pass = e_in < rel_tol && e_out < rel_tol && agree < agree_tol;
    ok = ok && pass;
    per_pole.push_back({{"pole", vec_json(z.vec())},
                        {"radii", {r_in, r_out}},
                        {"flux", {inner.value, outer.value}},
                        {"expected", -kTwoPi},
                        {"relative_error", {e_in, e_out}},
                        {"agreement", agree},
                        {"pass", pass}});
  }
  std::vector<Stage> out;
  out.push_back({"flux", ok,
                 {{"poles", per_pole}, {"tolerance", rel_tol}, {"agreement_tolerance", agree_tol}}});

  if (c.params.has_minus()) {
    const double tol = c.config.tolerance("quantization", 1e-6);
    const SeifertResult s = seifert_invariant(c.params, *c.angle, *c.w, c.poles, tol);
    out.push_back({"quantization",
                   s.integral,
                   {{"S", s.value},
                    {"label_offset", s.label_offset},
                    {"nearest_integer", s.nearest_integer},
                    {"distance", s.distance},
                    {"sphere_radius", s.sphere_radius},
                    {"tolerance", s.tolerance}}});
  } else {
    out.push_back({"quantization", true, {{"applicable", false}}});
  }
  return out;
}

double frame_residual(const std::vector<Eigen::Vector4d>& samples, const AngleField& angle) {
  double worst = 0.0;
  for (const auto& x : samples) {
    const AngleValue p(angle.angle_value(moment_of(x)));
    worst = std::max(worst, check_frame_identities(frame_tensors(p), p, 1.0).max());
  }
  return worst;
}

// dbeta by central differences and the two independent component paths of beta.
std::pair<double, double> curvature_residuals(const Construction& c,
                                              const std::vector<Eigen::Vector4d>& samples) {
  const VectorFunction beta = [&](const Eigen::Vector4d& y) {
    const TwoForm3 b = curvature(*c.angle, *c.w, moment_of(y));
    Eigen::VectorXd v(3);
    v << b(1, 2), b(2, 0), b(0, 1);
    return v;
  };
  const FdScheme scheme{4, 1e-3, true};
  double closed = 0.0, paths = 0.0;
  for (const auto& x : samples) {
    const DerivativeSet d = differentiate(beta, x, scheme);
    const double scale = 1.0 + d.value.cwiseAbs().maxCoeff();
    closed = std::max(closed, std::abs(d.d1[1][0] + d.d1[2][1] + d.d1[3][2]) / scale);
    const TwoForm3 a = curvature(*c.angle, *c.w, moment_of(x));
    const TwoForm3 b = curvature_from_components(*c.angle, *c.w, moment_of(x));
    paths = std::max(paths, (a - b).cwiseAbs().maxCoeff() / scale);
  }
  return {closed, paths};
}

std::vector<Stage> identity_stages(const VerificationReport& r) {
  std::vector<Stage> out;
  for (const auto& s : r.identities)
    out.push_back({s.name,
                   s.pass,
                   {{"max", s.max},
                    {"mean", s.mean},
                    {"n", s.n},
                    {"step", s.step},
                    {"order", s.order},
                    {"tolerance", s.tolerance}}});
  return out;
}

ToleranceTable with_overrides(const Config& c, ToleranceTable table) {
  for (auto& [name, tol] : table) tol = c.tolerance(name, tol);
  return table;
}

}  // namespace

Report construct_report(const Construction& c, const RunOptions& options) {
  const Stopwatch clock;
  Report r{"construct", c.config.to_json(), {}, 0.0};
  r.stages.push_back(summary_stage(c, samples_for(c, options)));
  for (auto& s : flux_stages(c)) r.stages.push_back(std::move(s));
  r.wall_time = clock.seconds();
  return r;
}

Report flux_report(const Construction& c) {
  const Stopwatch clock;
  Report r{"flux", c.config.to_json(), flux_stages(c), 0.0};
  r.wall_time = clock.seconds();
  return r;
}

Report verify(const Construction& c, const RunOptions& options) {
  const Stopwatch clock;
  const Config& cfg = c.config;
  Report r{"verify", cfg.to_json(), {}, 0.0};
  const auto samples = samples_for(c, options);
  r.stages.push_back(summary_stage(c, samples));

  r.stages.push_back(
      threshold_stage("frame_identities", frame_residual(samples, *c.angle),
                      cfg.tolerance("frame_identities", 1e-12)));

  double w_res = 0.0;
  for (const auto& x : samples) {
    const MomentPoint m = moment_of(x);
    w_res = std::max(w_res, std::abs(w_equation_residual(*c.angle, *c.w, m)) /
                                (1.0 + std::abs(c.w->value(m))));
  }
  r.stages.push_back(threshold_stage("w_equation", w_res, cfg.tolerance("w_equation", 1e-9),
                                     {{"scaled_by", "1 + |W|"}}));

  const auto [closed, paths] = curvature_residuals(c, samples);
  r.stages.push_back(threshold_stage("d_beta", closed, cfg.tolerance("d_beta", 1e-6),
                                     {{"scaled_by", "1 + max|beta|"}}));
  r.stages.push_back(threshold_stage("beta_two_path", paths, cfg.tolerance("beta_two_path", 1e-10),
                                     {{"scaled_by", "1 + max|beta|"}}));

  for (auto& s : flux_stages(c)) r.stages.push_back(std::move(s));

  ToleranceTable table = gk_axiom_tolerances(1e-4, 1e-6);
  for (const auto& e : soliton_tolerances(1e-4)) table.push_back(e);
  const VerificationReport gk = verify_samples(
      ansatz_charts(*c.structure, c.params), samples, cfg.fd, with_overrides(cfg, table),
      kFibreInvariant,
      ansatz_admissible(c.angle, c.poles, std::min(0.99, options.max_angle + 0.02),
                        0.5 * options.pole_margin));
  for (auto& s : identity_stages(gk)) r.stages.push_back(std::move(s));

  json poles = json::array();
  bool poles_ok = true;
  const double pole_tol = cfg.tolerance("pole_asymptotics", 0.02);
  for (const auto& z : c.poles) {
    const PoleAsymptotics a =
        pole_asymptotics(*c.angle, *c.w, z, {0.1, 0.03, 0.01, 0.003, 0.001}, 6, pole_tol);
    poles_ok = poles_ok && a.pass();
    poles.push_back({{"pole", vec_json(z.vec())},
                     {"limit", a.limit},
                     {"expected", 0.5},
                     {"limit_ok", a.limit_ok},
                     {"gradient_ok", a.gradient_ok}});
  }
  r.stages.push_back({"pole_asymptotics", poles_ok, {{"poles", poles}, {"tolerance", pole_tol}}});

  r.wall_time = clock.seconds();
  return r;
}

// ---------------------------------------------------------------- export

std::vector<std::string> export_columns() {
  return {"mu1",  "mu_plus", "mu_minus", "p",    "W",    "g_tt", "g_t1", "g_tp", "g_tm",
          "g_11", "g_1p",    "g_1m",     "g_pp", "g_pm", "g_mm", "w_equation_residual"};
}

json export_metadata(const Construction& c, const ExportOptions& options) {
  return {{"coordinates", {"t", "mu1", "mu_plus", "mu_minus"}},
          {"fibre", "t with X = d/dt; rows are taken at t = 0"},
          {"orientation", "dt^dmu1^dmu_plus^dmu_minus positive"},
          {"gauge", "connection potential vanishes at each exported point"},
          {"units", "dimensionless"},
          {"ordering", "mu1 fastest, then mu_plus, then mu_minus"},
          {"nodes", options.nodes},
          {"box",
           {{"center", vec_json(c.config.box.center)},
            {"half_width", vec_json(c.config.box.half_width)}}},
          {"columns", export_columns()},
          {"config", c.config.to_json()},
          {"tool", {{"name", "gkforge"}, {"version", tool_version()}}},
          {"schema_version", kReportSchemaVersion}};
}

void export_lattice(const Construction& c, const ExportOptions& options, std::ostream& out) {
  if (options.nodes < 1) throw ConfigError("export grid needs at least one node per axis");
  const int n = options.nodes;
  const Eigen::Vector3d lo = c.config.box.center - c.config.box.half_width;
  const Eigen::Vector3d step =
      n > 1 ? Eigen::Vector3d(2.0 * c.config.box.half_width / (n - 1)) : Eigen::Vector3d::Zero();
  const Eigen::Vector3d start = n > 1 ? lo : Eigen::Vector3d(c.config.box.center);

  std::vector<std::vector<double>> rows;
  rows.reserve(std::size_t(n) * n * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const MomentPoint x{start[0] + i * step[0], start[1] + j * step[1], start[2] + k * step[2]};
        const double p = c.angle->angle_value(x);
        const double w = c.w->value(x);
        const Eigen::Matrix4d g = assemble(p, w, Eigen::Vector3d::Zero()).g;
        std::vector<double> row{x.mu1, x.mu_plus, x.mu_minus, p, w};
        for (int a = 0; a < 4; ++a)
          for (int b = a; b < 4; ++b) row.push_back(g(a, b));
        row.push_back(w_equation_residual(*c.angle, *c.w, x));
        rows.push_back(std::move(row));
      }

  if (options.format == ExportFormat::Json) {
    out << json{{"metadata", export_metadata(c, options)}, {"rows", rows}}.dump() << '\n';
    return;
  }
  const auto columns = export_columns();
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n' << std::setprecision(17);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

// ---------------------------------------------------------------- examples

const std::vector<std::string>& example_names() {
  static const std::vector<std::string> names{"hopf", "diagonal-hopf", "taub-nut",
                                              "eguchi-hanson", "lebrun"};
  return names;
}

namespace {

using Vec4 = Eigen::Vector4d;

double trace_angle(const Eigen::Matrix4d& i, const Eigen::Matrix4d& j) {
  return -0.25 * (i * j).trace();
}

std::vector<Vec4> hopf_chart_points(std::size_t n, std::uint64_t seed, double spread) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> x(-spread, spread), y(-3.0, 3.0);
  std::vector<Vec4> out;
  for (std::size_t k = 0; k < n; ++k) {
    // draw in a fixed order so the points are platform independent up to the distribution
    const double a = x(rng), b = y(rng), c = x(rng), d = y(rng);
    out.emplace_back(a, b, c, d);
  }
  return out;
}

void hopf_example(Report& r, std::size_t samples, std::uint64_t seed) {
  const examples::StandardHopf hopf;
  const auto points = hopf_chart_points(samples, seed, 0.6);

  ToleranceTable table = soliton_tolerances(1e-4);
  for (const auto& e : gk_axiom_tolerances(1e-4, 1e-6)) table.push_back(e);
  const VerificationReport gk =
      verify_samples(hopf.charts(), points, {4, 5e-3}, table, examples::StandardHopf::kActive);
  for (auto& s : identity_stages(gk)) r.stages.push_back(std::move(s));

  // Same moment map on the ansatz side: k = (1, 1), W = 4 W0 gives 2 g.
  const SolitonParams params = examples::StandardHopf::ansatz_params();
  const SolitonAngle angle(params);
  const BaselineField w0(params);
  double angle_gap = 0.0, w_gap = 0.0, trace_gap = 0.0;
  for (const auto& c : points) {
    const MomentPoint mu = hopf.moment(c);
    const PointFields f = hopf.fields(c);
    angle_gap = std::max(angle_gap, std::abs(angle.angle_value(mu) - hopf.angle(c)));
    w_gap = std::max(w_gap, std::abs(examples::StandardHopf::kAnsatzLambda * w0.value(mu) -
                                     hopf.w(c) / examples::StandardHopf::kAnsatzMetricScale));
    trace_gap = std::max(trace_gap, std::abs(trace_angle(f.I, f.J) - hopf.angle(c)));
  }
  r.stages.push_back(threshold_stage("ansatz_angle", angle_gap, 1e-10));
  r.stages.push_back(threshold_stage("ansatz_w", w_gap, 1e-10));
  r.stages.push_back(threshold_stage("trace_angle", trace_gap, 1e-10));
}

void diagonal_hopf_example(Report& r, std::size_t samples, std::uint64_t seed) {
  const examples::DiagonalHopfParams params{1.0, 4.0, 1, 2};
  const examples::DiagonalHopf hopf(
      params, std::make_shared<examples::SolitonProfile>(params.ratio(), 0.3));
  const auto points = hopf_chart_points(samples, seed, 0.5);
  r.stages.push_back(threshold_stage("phi_linearity", hopf.phi_linearity_residual(points), 1e-6));

  double trace_gap = 0.0, compat = 0.0, w_gap = 0.0;
  const double a = params.a, b = params.b, m = params.m, n = params.n;
  for (const auto& c : points) {
    const Eigen::Matrix4d i = complex_structure_from_form(hopf.holomorphic_i());
    const Eigen::Matrix4d j = complex_structure_from_form(hopf.holomorphic_j(c));
    const Eigen::Matrix4d g = hopf.metric(c);
    trace_gap = std::max(trace_gap, std::abs(trace_angle(i, j) - hopf.angle(c)));
    compat = std::max(compat, std::max((i.transpose() * g * i - g).cwiseAbs().maxCoeff(),
                                       (j.transpose() * g * j - g).cwiseAbs().maxCoeff()));
    const double p = hopf.profile_angle(c);
    const double w_inv = (m * m * b * b * (1 + p) + n * n * a * a * (1 - p)) / (2 * a * b);
    w_gap = std::max(w_gap, std::abs(1.0 / hopf.w(c) - w_inv) / w_inv);
  }
  r.stages.push_back(threshold_stage("trace_angle", trace_gap, 1e-9));
  r.stages.push_back(threshold_stage("metric_compatibility", compat, 1e-9));
  r.stages.push_back(threshold_stage("w_inverse", w_gap, 1e-12));
}

void gibbons_hawking_example(Report& r, const examples::GibbonsHawking& gh, const MomentPoint& base,
                             std::size_t samples, std::uint64_t seed) {
  const GkStructure gk(gh.angle, gh.w, GaugePotential(gh.angle, gh.w, base, gh.centres));
  SamplingOptions opts;
  opts.samples = samples;
  opts.seed = seed;
  opts.pole_margin = 0.3;
  const auto points =
      sample_points(*gh.angle, {Eigen::Vector3d::Zero(), Eigen::Vector3d::Ones()}, gh.centres, opts);
  ToleranceTable table = ricci_tolerances(1e-4);
  table.emplace_back(identity::kRicciSymmetry, 1e-8);
  const VerificationReport rep =
      verify_samples(ansatz_charts(gk), points, {4, 1e-2}, table, kFibreInvariant,
                     ansatz_admissible(gh.angle, gh.centres, 0.95, 0.15));
  for (auto& s : identity_stages(rep)) r.stages.push_back(std::move(s));

  double worst = 0.0;
  for (const auto& z : gh.centres) {
    const FluxResult f = flux(*gh.angle, *gh.w, z, 0.1, {}, gh.centres);
    worst = std::max(worst, std::abs(f.value / -kTwoPi - 1.0));
  }
  r.stages.push_back(threshold_stage("flux", worst, 5e-3));
}

void lebrun_example(Report& r, std::size_t samples, std::uint64_t seed) {
  const examples::LeBrunInoue lebrun(2.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> xy(-1.0, 1.0), z(0.2, 3.0);
  double harmonic = 0.0, jet = 0.0, fd = 0.0, metric = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double qx = xy(rng), qy = xy(rng), qz = z(rng);
    const Eigen::Vector3d q(qx, qy, qz);
    harmonic = std::max(harmonic, std::abs(lebrun.hyperbolic_laplacian_fd(q)));
    const MomentPoint mu = examples::LeBrunInoue::from_half_space(q);
    const double w = lebrun.w()->value(mu);
    jet = std::max(jet, std::abs(w_equation_residual(*lebrun.angle(), *lebrun.w(), mu)) / (1.0 + w));
    fd = std::max(fd, std::abs(w_equation_residual_fd(*lebrun.angle(), *lebrun.w(), mu, {4, 2e-3})) /
                          (1.0 + w));
    const double p = lebrun.angle()->angle_value(mu);
    metric = std::max(metric, (lebrun.pulled_back_metric(mu) - 0.25 * base_metric(AngleValue(p)).matrix())
                                  .cwiseAbs()
                                  .maxCoeff());
  }
  r.stages.push_back(threshold_stage("hyperbolic_harmonic", harmonic, 1e-5));
  r.stages.push_back(threshold_stage("w_equation", jet, 1e-8, {{"scaled_by", "1 + |W|"}}));
  r.stages.push_back(threshold_stage("w_equation_fd", fd, 1e-5, {{"scaled_by", "1 + |W|"}}));
  r.stages.push_back(threshold_stage("pulled_back_metric", metric, 1e-8));
}

}  // namespace

Report run_example(const std::string& name, std::size_t samples, std::uint64_t seed) {
  const Stopwatch clock;
  Report r{"example " + name, nullptr, {}, 0.0};
  if (name == "hopf") {
    hopf_example(r, samples, seed);
  } else if (name == "diagonal-hopf") {
    diagonal_hopf_example(r, samples, seed);
  } else if (name == "taub-nut") {
    gibbons_hawking_example(r, examples::gibbons_hawking(1.0, {{0.0, 0.0, 0.0}}), {0.7, 0.3, -0.2},
                            samples, seed);
  } else if (name == "eguchi-hanson") {
    gibbons_hawking_example(r, examples::gibbons_hawking(0.0, {{0.0, 0.3, 0.0}, {0.0, -0.3, 0.0}}),
                            {0.5, 0.2, 0.4}, samples, seed);
  } else if (name == "lebrun") {
    lebrun_example(r, samples, seed);
  } else {
    std::ostringstream msg;
    msg << "unknown example '" << name << "'; expected one of";
    for (const auto& n : example_names()) msg << ' ' << n;
    throw ConfigError(msg.str());
  }
  r.wall_time = clock.seconds();
  return r;
}

}  // namespace gkforge::pipeline
