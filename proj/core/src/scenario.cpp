#include "breakcoag/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "breakcoag/diagnostics.hpp"
#include "breakcoag/dlvp.hpp"
#include "breakcoag/errors.hpp"
#include "breakcoag/report_json.hpp"

namespace breakcoag {

using nlohmann::json;
namespace fs = std::filesystem;

GridPtr ScenarioConfig::grid() const { return make_grid(x_min, x_max, cells); }

bool ScenarioConfig::wants(const std::string& experiment) const {
  return std::find(experiments.begin(), experiments.end(), experiment) != experiments.end();
}

std::string config_hash(const json& document) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : document.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void apply_override(json& document, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "': expected key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &document;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("override '" + assignment + "': empty key component");
    if (!node->is_object()) {
      if (!node->is_null()) throw ConfigError("override '" + key + "': '" + part + "' is not inside an object");
      *node = json::object();
    }
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

namespace {

// Object reader that remembers which keys were consumed.
class Section {
public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  bool has(const std::string& k) {
    seen_.insert(k);
    return node_.contains(k);
  }

  const json& raw(const std::string& k) {
    if (!has(k)) throw ConfigError(key(k) + ": missing required key");
    return node_.at(k);
  }

  double number(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_number()) throw ConfigError(key(k) + ": expected a number");
    return v.get<double>();
  }
  double number(const std::string& k, double fallback) { return has(k) ? number(k) : fallback; }

  std::optional<double> maybe_number(const std::string& k) {
    if (!has(k) || node_.at(k).is_null()) return std::nullopt;
    return number(k);
  }

  std::size_t count(const std::string& k, std::size_t fallback) {
    if (!has(k)) return fallback;
    const json& v = node_.at(k);
    if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(key(k) + ": expected a non-negative integer");
    return v.get<std::size_t>();
  }

  std::string text(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_string()) throw ConfigError(key(k) + ": expected a string");
    return v.get<std::string>();
  }
  std::string text(const std::string& k, const std::string& fallback) { return has(k) ? text(k) : fallback; }

  std::vector<double> numbers(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_array()) throw ConfigError(key(k) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(key(k) + ": expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  Section child(const std::string& k) { return Section(raw(k), key(k)); }

  // Throws on keys that were never looked at.
  void finish() const {
    for (const auto& [k, v] : node_.items()) {
      if (!seen_.count(k)) throw ConfigError(key(k) + ": unknown key");
    }
  }

private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

// Re-throws a ConfigError from library validation with the section name.
template <class F>
auto within(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    if (what.rfind(where, 0) == 0) throw;
    throw ConfigError(where + ": " + what);
  }
}

KernelSpec parse_kernel(Section s, const fs::path& base) {
  const std::string family = s.text("family");
  KernelFamily f;
  if (family == "smoluchowski") {
    f = kernel::Smoluchowski{};
  } else if (family == "sum_product") {
    f = kernel::SumProduct{s.number("zeta"), s.number("eta")};
  } else if (family == "bg_ratio") {
    f = kernel::BgRatio{s.number("sigma"), s.number("eta")};
  } else if (family == "product") {
    f = kernel::Product{};
  } else if (family == "additive") {
    f = kernel::Additive{};
  } else if (family == "constant") {
    f = kernel::Constant{s.number("value", 1.0)};
  } else if (family == "custom_table") {
    const std::string path = s.text("path");
    const std::string column = s.text("column", "K");
    f = kernel::CustomTable{std::make_shared<const LogTable2D>(LogTable2D::from_csv(resolve(base, path), column)),
                            path};
  } else {
    throw ConfigError(s.key("family") + ": unknown kernel family '" + family + "'");
  }
  KernelSpec spec = within(s.key("family"), [&] { return make_kernel(f); });
  if (auto v = s.maybe_number("alpha")) spec.alpha = *v;
  if (auto v = s.maybe_number("k1")) spec.k1 = *v;
  if (auto v = s.maybe_number("k2")) spec.k2 = *v;
  if (auto v = s.maybe_number("k0")) spec.k0 = *v;
  if (auto v = s.maybe_number("r_exponent")) spec.r_exponent = *v;
  if (auto v = s.maybe_number("r_scale")) spec.r_scale = *v;
  s.finish();
  within("kernel", [&] { validate(spec); });
  return spec;
}

DaughterSpec parse_daughter(Section s) {
  const std::string family = s.text("family");
  DaughterSpec spec;
  if (family == "power_total") {
    spec.family = daughter::PowerTotal{s.number("nu", 0.0)};
  } else if (family == "power_each") {
    spec.family = daughter::PowerEach{s.number("nu", 0.0)};
  } else if (family == "uniform") {
    spec.family = daughter::Uniform{};
  } else {
    throw ConfigError(s.key("family") + ": unknown daughter family '" + family + "'");
  }
  s.finish();
  within("daughter", [&] { validate(spec); });
  return spec;
}

ProbSpec parse_prob(Section s, const fs::path& base) {
  const std::string form = s.text("form");
  ProbSpec spec;
  if (form == "constant") {
    spec.form = prob::Constant{s.number("value")};
  } else if (form == "small_volume_floor") {
    spec.form = prob::SmallVolumeFloor{s.number("small"), s.number("large"), s.number("cut", 1.0)};
  } else if (form == "table") {
    const std::string path = s.text("path");
    const std::string column = s.text("column", "E");
    spec.form = prob::Table{std::make_shared<const LogTable2D>(LogTable2D::from_csv(resolve(base, path), column)), path};
  } else {
    throw ConfigError(s.key("form") + ": unknown probability form '" + form + "'");
  }
  s.finish();
  within("prob", [&] { validate(spec); });
  return spec;
}

InitialCondition parse_initial(Section s, const fs::path& base) {
  const std::string family = s.text("family");
  InitialCondition ic;
  if (family == "exponential") {
    ic.family = ic::Exponential{s.number("lambda", 1.0)};
  } else if (family == "power_cutoff") {
    ic.family = ic::PowerCutoff{s.number("p"), s.number("x_cut", 1.0)};
  } else if (family == "smeared_point_mass") {
    ic.family = ic::SmearedPointMass{s.number("x0"), s.number("width")};
  } else if (family == "tabulated") {
    ic.family = ic::Tabulated{TabulatedProfile::from_csv(resolve(base, s.text("path")))};
  } else {
    throw ConfigError(s.key("family") + ": unknown initial family '" + family + "'");
  }
  ic.mass = s.maybe_number("mass");
  s.finish();
  within("initial", [&] { validate(ic); });
  return ic;
}

StepControl parse_control(Section s, std::optional<double> top_t_end) {
  StepControl c;
  const std::string method = s.text("method", "heun_adaptive");
  if (method == "rk4") {
    c.method = Method::rk4;
  } else if (method == "heun_adaptive") {
    c.method = Method::heun_adaptive;
  } else {
    throw ConfigError(s.key("method") + ": unknown method '" + method + "'");
  }
  c.dt = s.number("dt", c.dt);
  c.rtol = s.number("rtol", c.rtol);
  c.atol = s.number("atol", c.atol);
  c.dt_min = s.number("dt_min", c.dt_min);
  c.dt_max = s.number("dt_max", c.dt_max);
  c.clip_tolerance = s.number("clip_tolerance", c.clip_tolerance);
  const auto t_end = s.maybe_number("t_end");
  if (t_end && top_t_end && *t_end != *top_t_end) throw ConfigError("t_end: conflicts with control.t_end");
  if (!t_end && !top_t_end) throw ConfigError("control.t_end: missing required key");
  c.t_end = t_end ? *t_end : *top_t_end;
  if (!(c.t_end > 0.0)) throw ConfigError("control.t_end: must be positive");
  const bool every = s.has("output_every");
  const bool times = s.has("output_times");
  if (every && times) throw ConfigError("control.output_times: conflicts with control.output_every");
  if (times) {
    c.output_times = s.numbers("output_times");
  } else {
    const double step = every ? s.number("output_every") : c.t_end / 20.0;
    c.output_times = within("control.output_every", [&] { return uniform_outputs(c.t_end, step); });
  }
  s.finish();
  within("control", [&] { validate(c); });
  return c;
}

}  // namespace

ScenarioConfig parse_config(const json& document, const fs::path& base_dir) {
  ScenarioConfig cfg;
  cfg.document = document;
  cfg.hash = config_hash(document);
  Section root(document, "");

  {
    Section g = root.child("grid");
    cfg.x_min = g.number("x_min");
    cfg.x_max = g.number("x_max");
    cfg.cells = g.count("cells", 0);
    if (!g.has("cells")) throw ConfigError("grid.cells: missing required key");
    g.finish();
    within("grid", [&] { return cfg.grid(); });
  }
  cfg.kernel = parse_kernel(root.child("kernel"), base_dir);
  cfg.daughter = parse_daughter(root.child("daughter"));
  cfg.prob = parse_prob(root.child("prob"), base_dir);
  cfg.initial = parse_initial(root.child("initial"), base_dir);

  const auto constants = daughter_constants(cfg.daughter, cfg.kernel.alpha);
  if (!constants.admissible) {
    throw ConfigError("daughter.family: " + cfg.daughter.name() + " with kernel " + cfg.kernel.name() + ": " +
                      constants.reason);
  }

  const std::optional<double> top_t_end = root.maybe_number("t_end");
  if (root.has("control")) {
    cfg.control = parse_control(root.child("control"), top_t_end);
  } else {
    cfg.control = parse_control(Section(json::object(), "control"), top_t_end);
  }

  if (root.has("truncation")) {
    Section t = root.child("truncation");
    const std::string mode = t.text("mode", "conservative");
    if (mode == "conservative") {
      cfg.tables.mode = TruncationMode::conservative;
    } else if (mode == "outflow") {
      cfg.tables.mode = TruncationMode::outflow;
    } else {
      throw ConfigError(t.key("mode") + ": unknown truncation mode '" + mode + "'");
    }
    cfg.tables.level = t.maybe_number("level");
    if (cfg.tables.level && !(*cfg.tables.level > 0.0 && *cfg.tables.level <= cfg.x_max)) {
      throw ConfigError(t.key("level") + ": must lie in (0, grid.x_max]");
    }
    t.finish();
  }

  if (root.has("checks")) {
    Section c = root.child("checks");
    cfg.checks.box.lo = c.number("box_lo", cfg.checks.box.lo);
    cfg.checks.box.hi = c.number("box_hi", cfg.checks.box.hi);
    cfg.checks.kernel_samples = c.count("kernel_samples", cfg.checks.kernel_samples);
    cfg.checks.pair_samples = c.count("pair_samples", cfg.checks.pair_samples);
    cfg.checks.omega_pair_samples = c.count("omega_pair_samples", cfg.checks.omega_pair_samples);
    c.finish();
    if (!(cfg.checks.box.lo > 0.0 && cfg.checks.box.lo < cfg.checks.box.hi)) {
      throw ConfigError("checks.box_lo: need 0 < box_lo < box_hi");
    }
    if (cfg.checks.kernel_samples < 10000) throw ConfigError("checks.kernel_samples: must be at least 10000");
    if (cfg.checks.pair_samples < 2 || cfg.checks.omega_pair_samples < 2) {
      throw ConfigError("checks.pair_samples: must be at least 2");
    }
  }

  if (root.has("experiments")) {
    const json& e = root.raw("experiments");
    if (!e.is_array()) throw ConfigError("experiments: expected an array of names");
    for (const auto& name : e) {
      if (!name.is_string()) throw ConfigError("experiments: expected an array of names");
      const std::string n = name.get<std::string>();
      if (std::find(known_experiments.begin(), known_experiments.end(), n) == known_experiments.end()) {
        throw ConfigError("experiments: unknown experiment '" + n + "'");
      }
      if (!cfg.wants(n)) cfg.experiments.push_back(n);
    }
  } else {
    cfg.experiments = {"verify", "run"};
  }

  if (root.has("options")) {
    Section o = root.child("options");
    auto& opt = cfg.options;
    opt.mass_tolerance = o.number("mass_tolerance", opt.mass_tolerance);
    opt.gel_threshold = o.number("gel_threshold", opt.gel_threshold);
    if (!(opt.mass_tolerance >= 0.0)) throw ConfigError("options.mass_tolerance: must be non-negative");
    if (!(opt.gel_threshold > 0.0 && opt.gel_threshold < 1.0)) {
      throw ConfigError("options.gel_threshold: must lie in (0, 1)");
    }
    if (o.has("contraction")) {
      Section c = o.child("contraction");
      auto& co = opt.contraction;
      co.perturbation = c.text("perturbation", co.perturbation);
      if (co.perturbation != "scale" && co.perturbation != "bump") {
        throw ConfigError(c.key("perturbation") + ": expected 'scale' or 'bump'");
      }
      co.factor = c.number("factor", co.factor);
      co.center = c.number("center", co.center);
      co.width = c.number("width", co.width);
      co.amplitude = c.number("amplitude", co.amplitude);
      co.slack = c.number("slack", co.slack);
      c.finish();
      if (!(co.factor > 0.0) || !(co.width > 0.0) || !(co.amplitude >= 0.0) || !(co.slack >= 0.0)) {
        throw ConfigError(c.key("factor") + ": perturbation parameters out of range");
      }
    }
    if (o.has("sweep")) {
      Section s = o.child("sweep");
      opt.sweep_E = s.numbers("E_values");
      s.finish();
      for (double v : opt.sweep_E) {
        if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("options.sweep.E_values: values must lie in [0, 1]");
      }
    }
    if (o.has("dlvp")) {
      Section d = o.child("dlvp");
      auto& dl = opt.dlvp;
      if (d.has("profile")) dl.profile = resolve(base_dir, d.text("profile"));
      dl.theta = d.number("theta", dl.theta);
      dl.max_m = static_cast<int>(d.count("max_m", static_cast<std::size_t>(dl.max_m)));
      dl.samples = static_cast<int>(d.count("samples", static_cast<std::size_t>(dl.samples)));
      d.finish();
      if (!(dl.theta > 0.0 && dl.theta < 1.0)) throw ConfigError("options.dlvp.theta: must lie in (0, 1)");
      if (dl.max_m < 2) throw ConfigError("options.dlvp.max_m: must be at least 2");
      if (dl.samples < 10) throw ConfigError("options.dlvp.samples: must be at least 10");
    }
    o.finish();
  }
  root.finish();
  return cfg;
}

ScenarioConfig parse_config_file(const fs::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config '" + path.string() + "': invalid JSON");
  if (!doc.is_object()) throw ConfigError("config '" + path.string() + "': expected a JSON object");
  for (const auto& o : overrides) apply_override(doc, o);
  return parse_config(doc, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_json(const fs::path& path, json body, const std::string& hash) {
  body["config_hash"] = hash;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << body.dump(2) << '\n';
}

void write_state(const fs::path& path, const State& s, const std::string& hash) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "# config_hash=" << hash << "\n# time=" << num(s.time) << "\nx_lo,x_hi,x,density\n";
  const auto e = s.grid->edges();
  const auto c = s.grid->centers();
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << num(e[i]) << ',' << num(e[i + 1]) << ',' << num(c[i]) << ',' << num(s.density[i]) << '\n';
  }
}

void write_moments(const fs::path& path, const MomentSeries& series, const std::string& hash) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "# config_hash=" << hash << "\ntime";
  for (double m : series.orders) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", m);
    out << ",M_" << buf;
  }
  out << '\n';
  for (std::size_t t = 0; t < series.times.size(); ++t) {
    out << num(series.times[t]);
    for (const auto& row : series.values) out << ',' << num(row[t]);
    out << '\n';
  }
}

State perturb(const State& f, const ContractionOptions& o) {
  State g = f;
  const auto c = f.grid->centers();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (o.perturbation == "scale") {
      g.density[i] *= o.factor;
    } else {
      const double z = (c[i] - o.center) / o.width;
      g.density[i] += o.amplitude * std::exp(-0.5 * z * z);
    }
  }
  return g;
}

std::string unmet_uniqueness(const HypothesisReport& report) {
  std::string out;
  auto add = [&](const std::string& s) { out += (out.empty() ? "" : ", ") + s; };
  for (const char* id : {check_id::kernel_small_volume_bound, check_id::kernel_linear_growth, check_id::daughter_mass,
                         check_id::probability_range, check_id::daughter_partial_moment}) {
    if (!report.passed(id)) add(id);
  }
  if (!report.initial_in_X_minus_2alpha) add("X_-2alpha");
  if (!report.initial_in_X_2) add("X_2");
  return out;
}

}  // namespace

RunOutcome run_scenario(const ScenarioConfig& cfg, const fs::path& out_dir, bool verify_only) {
  RunOutcome outcome;
  fs::create_directories(out_dir);
  const GridPtr grid = cfg.grid();

  const HypothesisReport report = check_scenario(cfg.kernel, cfg.daughter, cfg.prob, cfg.initial, cfg.checks);
  json hyp = to_json(report);
  hyp["scenario"] = {{"kernel", cfg.kernel.name()}, {"daughter", cfg.daughter.name()}, {"prob", cfg.prob.name()}};
  write_json(out_dir / "hypotheses.json", hyp, cfg.hash);
  if (verify_only) {
    outcome.message = "hypothesis report written";
    return outcome;
  }

  if (cfg.wants("contraction") && !report.applies(result_id::uniqueness)) {
    outcome.exit_code = exit_config;
    outcome.message = "contraction: uniqueness hypotheses unmet: " + unmet_uniqueness(report);
    return outcome;
  }

  json experiments = json::object();
  auto record = [&](const std::string& name, bool passed) { outcome.assertions.emplace_back(name, passed); };
  const State initial = sample_initial(cfg.initial, grid);
  const double rho = mass(initial);

  try {
    const bool need_tables = cfg.wants("run") || cfg.wants("gel") || cfg.wants("contraction");
    std::optional<OperatorTables> tables;
    if (need_tables) tables.emplace(build_tables(grid, cfg.kernel, cfg.daughter, cfg.prob, cfg.tables));

    if (cfg.wants("run") || cfg.wants("gel")) {
      const Trajectory traj = integrate(*tables, initial, cfg.control);
      fs::create_directories(out_dir / "trajectory");
      for (std::size_t k = 0; k < traj.states.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "state_%04zu.csv", k);
        write_state(out_dir / "trajectory" / name, traj.states[k], cfg.hash);
      }
      const MomentSeries series = moment_series(traj, apriori_orders(report));
      write_moments(out_dir / "moments.csv", series, cfg.hash);

      if (cfg.wants("run")) {
        json run;
        run["stats"] = to_json(traj.stats);
        const MassCheck mc = check_mass_conservation(traj, cfg.options.mass_tolerance);
        run["mass"] = to_json(mc);
        if (cfg.tables.mode == TruncationMode::conservative) record("run.mass", mc.passed);
        outcome.notes.push_back("run: max relative mass drift " + num(mc.max_drift));
        const AprioriReport ap = check_apriori_bounds(series, report, rho);
        run["apriori"] = to_json(ap);
        record("run.apriori", ap.passed());
        if (traj.states.size() >= 3) {
          const EquicontinuityResult eq = equicontinuity_modulus(traj, report, rho);
          run["equicontinuity"] = to_json(eq);
          if (report.passed(check_id::kernel_small_volume_bound) && report.passed(check_id::coalescence_dominance)) {
            record("run.equicontinuity", eq.passed);
          }
          json weak;
          weak["one"] = to_json(weak_form_residual(*tables, traj, [](double) { return 1.0; }));
          weak["x"] = to_json(weak_form_residual(*tables, traj, [](double x) { return x; }));
          weak["min_x_1"] = to_json(weak_form_residual(*tables, traj, [](double x) { return std::min(x, 1.0); }));
          run["weak_form"] = weak;
        }
        experiments["run"] = run;
      }
      if (cfg.wants("gel")) {
        const auto onset = detect_gelation(series, cfg.options.gel_threshold);
        json gel = {{"threshold", cfg.options.gel_threshold}, {"onset", onset ? json(*onset) : json(nullptr)}};
        if (cfg.tables.mode == TruncationMode::conservative) {
          gel["note"] = "conservative truncation keeps the mass on the grid; use truncation.mode = outflow";
        }
        experiments["gel"] = gel;
        outcome.notes.push_back(onset ? "gel: onset " + num(*onset) : std::string("gel: no onset"));
      }
    }

    if (cfg.wants("contraction")) {
      const auto& co = cfg.options.contraction;
      const State g0 = perturb(initial, co);
      const ContractionResult cr = contraction_experiment(*tables, report, initial, g0, cfg.control, co.slack);
      json c = to_json(cr);
      c["perturbation"] = co.perturbation;
      experiments["contraction"] = c;
      record("contraction", cr.passed);
      outcome.notes.push_back("contraction: worst distance/envelope " + num(cr.worst_ratio));
    }

    if (cfg.wants("sweep")) {
      SweepTemplate st{grid, cfg.kernel, cfg.daughter, cfg.initial, cfg.control, cfg.tables, cfg.checks};
      json rows = json::array();
      for (const auto& row : e_sweep(st, cfg.options.sweep_E)) rows.push_back(to_json(row));
      experiments["sweep"] = rows;
    }

    if (cfg.wants("dlvp")) {
      const auto& d = cfg.options.dlvp;
      TabulatedProfile h = d.profile ? TabulatedProfile::from_csv(*d.profile)
                                     : TabulatedProfile(std::vector<double>(grid->centers().begin(), grid->centers().end()),
                                                        initial.density);
      h = h.with_fitted_tail();
      const PhiConstruction pc = build_phi(h, d.theta, d.max_m);
      const DlvpReport dr = verify_dlvp(pc, h, d.samples);
      json j = to_json(dr);
      j["construction"] = to_json(pc);
      experiments["dlvp"] = j;
      record("dlvp", dr.passed());
      outcome.notes.push_back("dlvp: j_1 = " + std::to_string(pc.j[1]) + ", integral " + num(dr.integral));
    }
  } catch (const IntegrationError& e) {
    write_json(out_dir / "failure.json", {{"error", e.what()}, {"diagnostics", e.diagnostics()}}, cfg.hash);
    outcome.exit_code = exit_integration;
    outcome.message = std::string("integration failed: ") + e.what() + "; see failure.json";
    return outcome;
  }

  json asserts = json::array();
  bool all = true;
  for (const auto& [name, passed] : outcome.assertions) {
    asserts.push_back({{"name", name}, {"passed", passed}});
    all = all && passed;
  }
  write_json(out_dir / "experiments.json", {{"experiments", experiments}, {"assertions", asserts}}, cfg.hash);
  outcome.exit_code = all ? exit_ok : exit_assertion;
  outcome.message = all ? "all assertions passed" : "assertion failure";
  return outcome;
}

}  // namespace breakcoag
