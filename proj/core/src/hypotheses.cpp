#include "breakcoag/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "breakcoag/errors.hpp"

namespace breakcoag {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

std::vector<double> log_axis(double lo, double hi, std::size_t n) {
  std::vector<double> axis(n);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    axis[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  axis.front() = lo;
  axis.back() = hi;
  return axis;
}

// Tracks max (value - bound) / bound over a sample.
class Worst {
public:
  void add(double value, double bound, double x, double y) {
    const double r = (value - bound) / bound;
    if (!seen_ || r > residual_) {
      residual_ = r;
      witness_ = Witness{x, y, std::nullopt};
      seen_ = true;
    }
  }
  void add_residual(double r, double x, double y) {
    if (!seen_ || r > residual_) {
      residual_ = r;
      witness_ = Witness{x, y, std::nullopt};
      seen_ = true;
    }
  }

  HypothesisCheck finish(const char* id, std::string detail, bool extra = true, double tol = 1e-12) const {
    HypothesisCheck c;
    c.id = id;
    c.worst_residual = seen_ ? residual_ : 0.0;
    if (seen_) c.witness = witness_;
    c.status = (extra && c.worst_residual <= tol) ? CheckStatus::pass : CheckStatus::fail;
    c.detail = std::move(detail);
    return c;
  }

private:
  bool seen_ = false;
  double residual_ = 0.0;
  Witness witness_;
};

HypothesisCheck not_applicable(const char* id, std::string detail) {
  HypothesisCheck c;
  c.id = id;
  c.status = CheckStatus::not_applicable;
  c.detail = std::move(detail);
  return c;
}

HypothesisCheck failed(const char* id, std::string detail) {
  HypothesisCheck c;
  c.id = id;
  c.status = CheckStatus::fail;
  c.detail = std::move(detail);
  return c;
}

HypothesisCheck from_growth(const char* id, const GrowthCheck& g, const std::string& what) {
  HypothesisCheck c;
  c.id = id;
  c.status = g.satisfied ? CheckStatus::pass : CheckStatus::fail;
  c.worst_residual = g.worst_residual;
  if (g.evaluated > 0) c.witness = Witness{g.witness_x, g.witness_y, std::nullopt};
  if (!g.declared) {
    c.detail = "no " + what + " constant for this kernel";
  } else {
    c.detail = what + " constant " + fmt(g.constant) + " on " + std::to_string(g.evaluated) + " samples";
  }
  return c;
}

}  // namespace

double coalescence_threshold(double beta, double alpha) {
  if (!(alpha >= 0.0 && alpha < 0.5)) throw DomainError("coalescence_threshold: alpha must lie in [0, 1/2)");
  if (!(beta >= 1.0)) throw DomainError("coalescence_threshold: beta must be >= 1, got " + fmt(beta));
  const double numerator = beta - std::pow(2.0, 1.0 + 2.0 * alpha);
  if (numerator <= 0.0) return 0.0;
  if (beta == 1.0) throw DomainError("coalescence_threshold: beta = 1 with positive numerator");
  return numerator / (beta - 1.0);
}

double threshold_power_total(double nu) {
  if (!(nu > -1.0)) throw DomainError("threshold_power_total: need nu > -1");
  return std::max(0.0, -nu);
}

double threshold_power_each(double nu) {
  if (!(nu > -1.0)) throw DomainError("threshold_power_each: need nu > -1");
  return 2.0 / (nu + 3.0);
}

double threshold_singular(double nu, double zeta) {
  if (!(zeta > -0.5 && zeta < 0.0)) throw DomainError("threshold_singular: need zeta in (-1/2, 0)");
  if (!(nu > -2.0 * zeta - 1.0)) throw DomainError("threshold_singular: need nu > 2 alpha - 1 with alpha = -zeta");
  const double v = (nu + 2.0 - (nu + 1.0 + 2.0 * zeta) * std::pow(2.0, 1.0 - 2.0 * zeta)) / (1.0 - 2.0 * zeta);
  return std::max(0.0, v);
}

double threshold_bg_ratio(double nu, double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw DomainError("threshold_bg_ratio: need sigma in (0, 1)");
  if (!(nu > sigma - 1.0)) throw DomainError("threshold_bg_ratio: need nu > sigma - 1");
  const double v = (nu + 2.0 - (nu + 1.0 - sigma) * std::pow(2.0, 1.0 + sigma)) / (1.0 + sigma);
  return std::max(0.0, v);
}

double TrialSet::measure() const {
  double m = 0.0;
  for (const auto& [a, b] : intervals) m += std::max(0.0, b - a);
  return m;
}

std::vector<TrialSet> default_trial_sets() {
  std::vector<TrialSet> sets;
  for (double radius : {1.0, 10.0}) {
    for (int e = -6; e <= 0; ++e) {
      const double d = std::pow(10.0, e);
      sets.push_back(TrialSet{{{0.0, d}}});
      for (double c : {1e-3, 1e-2, 1e-1, 0.5}) {
        const double a = c * (radius - d);
        if (a > 0.0) sets.push_back(TrialSet{{{a, a + d}}});
      }
      for (int k = 2; k <= 4; ++k) {
        const double piece = d / k;
        const double spacing = (radius - piece) / k;
        if (spacing < piece) continue;
        TrialSet s;
        for (int j = 0; j < k; ++j) s.intervals.emplace_back(j * spacing, j * spacing + piece);
        sets.push_back(std::move(s));
      }
    }
  }
  return sets;
}

UniformIntegrabilityReport verify_uniform_integrability(const DaughterSpec& spec, double alpha, double theta,
                                                        double omega_coefficient,
                                                        const std::vector<TrialSet>& trial_sets,
                                                        const SampleBox& box, std::size_t per_axis) {
  UniformIntegrabilityReport report;
  const auto axis = log_axis(box.lo, box.hi, std::max<std::size_t>(per_axis, 2));

  for (const auto& set : trial_sets) {
    const double measure = set.measure();
    if (!(measure > 0.0)) continue;
    OmegaRow row;
    row.measure = measure;
    row.bound = omega_coefficient * std::pow(measure, theta);
    for (double x : axis) {
      for (double y : axis) {
        double lhs = 0.0;
        for (const auto& [a, b] : set.intervals) {
          lhs += partial_moment_integral(spec, -alpha, b, x, y) - partial_moment_integral(spec, -alpha, a, x, y);
        }
        const double weight = std::pow(x + y, -alpha) * (std::pow(x, -theta) + std::pow(y, -theta));
        const double ratio = std::max(lhs, 0.0) / weight;
        if (ratio > row.max_ratio) {
          row.max_ratio = ratio;
          row.witness_x = x;
          row.witness_y = y;
          row.witness_set = set;
        }
      }
    }
    // Merge with an existing row of the same measure.
    auto it = std::find_if(report.rows.begin(), report.rows.end(), [&](const OmegaRow& r) {
      return std::abs(r.measure - measure) <= 1e-9 * measure;
    });
    if (it == report.rows.end()) {
      report.rows.push_back(row);
    } else if (row.max_ratio > it->max_ratio) {
      *it = row;
    }
  }

  std::sort(report.rows.begin(), report.rows.end(),
            [](const OmegaRow& a, const OmegaRow& b) { return a.measure < b.measure; });
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    const double residual = r.max_ratio / r.bound - 1.0;
    if (i == 0 || residual > report.worst_residual) report.worst_residual = residual;
    if (residual > 1e-12) report.bounded = false;
    if (i > 0 && report.rows[i - 1].max_ratio > r.max_ratio * (1.0 + 1e-12)) report.decreasing = false;
  }
  return report;
}

std::string to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::not_applicable: return "n/a";
  }
  return "n/a";
}

const HypothesisCheck& HypothesisReport::check(const std::string& id) const {
  for (const auto& c : checks) {
    if (c.id == id) return c;
  }
  throw std::out_of_range("no hypothesis check named " + id);
}

bool HypothesisReport::passed(const std::string& id) const { return check(id).status == CheckStatus::pass; }

bool HypothesisReport::applies(const std::string& result) const {
  return std::find(applicable_results.begin(), applicable_results.end(), result) != applicable_results.end();
}

bool HypothesisReport::mass_conserving() const {
  for (const char* r : {result_id::singular_mass_conserving, result_id::singular_mass_conserving_x2,
                        result_id::bounded_mass_conserving, result_id::bounded_mass_conserving_x2,
                        result_id::bounded_relaxed_mass_conserving, result_id::bounded_relaxed_mass_conserving_x2,
                        result_id::linear_kernel_mass_conserving}) {
    if (applies(r)) return true;
  }
  return false;
}

HypothesisReport check_scenario(const KernelSpec& kernel, const DaughterSpec& daughter, const ProbSpec& prob,
                                const InitialCondition& initial, const CheckOptions& options) {
  HypothesisReport rep;
  const double alpha = kernel.alpha;
  const auto consts = daughter_constants(daughter, alpha);
  rep.alpha = alpha;
  rep.theta = consts.theta;
  rep.p = consts.p;
  rep.omega_coefficient = consts.omega_coefficient;
  rep.beta_0 = consts.beta_0;
  rep.beta_minus_theta = consts.beta_minus_theta;
  rep.beta_minus_2alpha = consts.beta_minus_2alpha;
  rep.B_minus_alpha = consts.B_minus_alpha;
  rep.beta_prime = consts.beta_prime;
  rep.E_floor = min_on_unit_square(prob);

  try {
    rep.E_min = coalescence_threshold(consts.beta_minus_2alpha, alpha);
  } catch (const DomainError& e) {
    rep.E_min = 1.0;
    rep.notes.push_back(std::string("threshold unavailable: ") + e.what());
  }

  rep.initial_in_X_minus_2alpha = initial.has_finite_moment(-2.0 * alpha);
  rep.initial_in_X_minus_theta = initial.has_finite_moment(-rep.theta);
  rep.initial_in_X_0 = initial.has_finite_moment(0.0);
  rep.initial_in_X_2 = initial.has_finite_moment(2.0);

  // Kernel growth.
  rep.growth = classify_growth(kernel, options.box, options.kernel_samples);
  rep.checks.push_back(from_growth(check_id::kernel_small_volume_bound, rep.growth.small_volume_bound,
                                   "small-volume (k1, alpha = " + fmt(alpha) + ")"));
  rep.checks.push_back(from_growth(check_id::kernel_linear_growth, rep.growth.linear_growth, "linear-growth k2"));
  rep.checks.push_back(from_growth(check_id::kernel_sublinear_majorant, rep.growth.sublinear_majorant,
                                   "sublinear majorant exponent"));
  rep.checks.push_back(from_growth(check_id::kernel_globally_linear, rep.growth.globally_linear, "global linear k0"));

  const auto axis = log_axis(options.box.lo, options.box.hi, std::max<std::size_t>(options.pair_samples, 2));
  const double nu = daughter.nu();

  // Symmetry, support and mass of b.
  {
    Worst w;
    for (double x : axis) {
      for (double y : axis) {
        const double s = x + y;
        double asym = 0.0;
        for (double frac : {1e-3, 0.3, 0.7, 0.999}) {
          const double z = frac * s;
          asym = std::max(asym, std::abs(eval_b(daughter, z, x, y) - eval_b(daughter, z, y, x)));
        }
        const double outside = eval_b(daughter, s * (1.0 + 1e-9), x, y);
        const double mass_err = std::abs(moment_integral(daughter, 1.0, x, y) - s) / s;
        w.add_residual(std::max({asym, outside, mass_err}), x, y);
      }
    }
    rep.checks.push_back(w.finish(check_id::daughter_mass, "symmetry, support in (0, x+y), mass identity"));
  }

  // Bounded-kernel moment bounds.
  if (alpha > 0.0) {
    rep.checks.push_back(not_applicable(check_id::daughter_moments_bounded, "alpha > 0"));
  } else {
    Worst w;
    const double th = rep.theta;
    for (double x : axis) {
      for (double y : axis) {
        w.add(moment_integral(daughter, 0.0, x, y), consts.beta_0, x, y);
        w.add(moment_integral(daughter, -th, x, y),
              0.5 * consts.beta_minus_theta * (std::pow(x, -th) + std::pow(y, -th)), x, y);
      }
    }
    const bool ranges = consts.beta_0 >= 1.0 && consts.beta_minus_theta >= std::pow(2.0, -th);
    rep.checks.push_back(w.finish(check_id::daughter_moments_bounded,
                                  "beta_0 = " + fmt(consts.beta_0) + ", beta_-theta = " + fmt(consts.beta_minus_theta),
                                  ranges));
  }

  // Singular moment bound.
  if (alpha == 0.0) {
    rep.checks.push_back(not_applicable(check_id::daughter_singular_moment, "alpha = 0"));
  } else if (!consts.admissible) {
    rep.checks.push_back(failed(check_id::daughter_singular_moment, consts.reason));
  } else {
    Worst w;
    for (double x : axis) {
      for (double y : axis) {
        w.add(moment_integral(daughter, -2.0 * alpha, x, y), consts.beta_minus_2alpha * std::pow(x + y, -2.0 * alpha),
              x, y);
      }
    }
    const bool ranges = rep.theta <= alpha && consts.beta_minus_2alpha >= 1.0;
    rep.checks.push_back(w.finish(check_id::daughter_singular_moment,
                                  "beta_-2alpha = " + fmt(consts.beta_minus_2alpha) + ", theta = " + fmt(rep.theta),
                                  ranges));
  }

  // Uniform integrability.
  if (!consts.admissible) {
    rep.checks.push_back(failed(check_id::daughter_uniform_integrability, consts.reason));
  } else {
    rep.uniform_integrability = verify_uniform_integrability(daughter, alpha, rep.theta, rep.omega_coefficient,
                                                             default_trial_sets(), options.box,
                                                             options.omega_pair_samples);
    HypothesisCheck c;
    c.id = check_id::daughter_uniform_integrability;
    c.status = rep.uniform_integrability.passed() ? CheckStatus::pass : CheckStatus::fail;
    c.worst_residual = rep.uniform_integrability.worst_residual;
    const OmegaRow* worst = nullptr;
    for (const auto& r : rep.uniform_integrability.rows) {
      if (!worst || r.max_ratio / r.bound > worst->max_ratio / worst->bound) worst = &r;
    }
    if (worst) c.witness = Witness{worst->witness_x, worst->witness_y, worst->witness_set};
    c.detail = "omega(xi) = " + fmt(rep.omega_coefficient) + " xi^" + fmt(rep.theta) +
               (rep.uniform_integrability.decreasing ? "" : "; empirical modulus not monotone");
    rep.checks.push_back(c);
  }

  // Partial z^{-alpha} moment over (0, min{1, x+y}).
  if (!consts.admissible) {
    rep.checks.push_back(failed(check_id::daughter_partial_moment, consts.reason));
  } else {
    Worst w;
    for (double x : axis) {
      for (double y : axis) {
        const double u = std::min(1.0, x + y);
        w.add(partial_moment_integral(daughter, -alpha, u, x, y), consts.B_minus_alpha * std::pow(u, -alpha), x, y);
      }
    }
    rep.checks.push_back(w.finish(check_id::daughter_partial_moment, "B_-alpha = " + fmt(consts.B_minus_alpha),
                                  consts.B_minus_alpha > 1.0));
  }

  // Relaxed z^{-theta} bound.
  if (alpha > 0.0) {
    rep.checks.push_back(not_applicable(check_id::daughter_relaxed_moment, "alpha > 0"));
  } else {
    Worst w;
    const double th = rep.theta;
    const bool each = std::holds_alternative<daughter::PowerEach>(daughter.family);
    const DaughterSpec piece{daughter::PowerTotal{nu}};
    for (double x : axis) {
      for (double y : axis) {
        if (each) {
          // Each fragment source separately, against its own volume.
          w.add(moment_integral(piece, -th, x, 0.0), 0.5 * consts.beta_prime * std::pow(x, -th), x, y);
          w.add(moment_integral(piece, -th, y, 0.0), 0.5 * consts.beta_prime * std::pow(y, -th), x, y);
        } else {
          w.add(moment_integral(daughter, -th, x, y), 0.5 * consts.beta_prime * std::pow(x + y, -th), x, y);
        }
      }
    }
    rep.checks.push_back(w.finish(check_id::daughter_relaxed_moment, "beta' = " + fmt(consts.beta_prime),
                                  consts.beta_prime >= 2.0));
  }

  // E in [0, 1] and symmetric.
  {
    Worst w;
    double lo = options.box.lo, hi = options.box.hi;
    if (const auto* t = std::get_if<prob::Table>(&prob.form)) {
      lo = std::max(lo, t->table->lo());
      hi = std::min(hi, t->table->hi());
    }
    for (double x : log_axis(lo, hi, axis.size())) {
      for (double y : log_axis(lo, hi, axis.size())) {
        const double e = eval_E(prob, x, y);
        const double out_of_range = std::max(0.0, std::max(-e, e - 1.0));
        w.add_residual(std::max(out_of_range, std::abs(e - eval_E(prob, y, x))), x, y);
      }
    }
    rep.checks.push_back(w.finish(check_id::probability_range, "0 <= E = E^T <= 1", true, 0.0));
  }

  // Coalescence dominance on (0,1)^2.
  {
    HypothesisCheck c;
    c.id = check_id::coalescence_dominance;
    c.worst_residual = rep.E_min - rep.E_floor;
    c.status = (consts.admissible && c.worst_residual <= 1e-12) ? CheckStatus::pass : CheckStatus::fail;
    c.detail = "inf E on (0,1)^2 = " + fmt(rep.E_floor) + ", required E_min = " + fmt(rep.E_min);
    if (!consts.admissible) c.detail += "; " + consts.reason;
    rep.checks.push_back(c);
  }

  auto ok = [&](const char* id) { return rep.passed(id); };
  const bool core_singular = alpha > 0.0 && ok(check_id::kernel_small_volume_bound) && ok(check_id::daughter_mass) &&
                             ok(check_id::daughter_uniform_integrability) &&
                             ok(check_id::daughter_singular_moment) && ok(check_id::probability_range) &&
                             ok(check_id::coalescence_dominance) && rep.initial_in_X_minus_2alpha;
  const bool core_bounded_common = alpha == 0.0 && ok(check_id::kernel_small_volume_bound) &&
                                   ok(check_id::daughter_mass) && ok(check_id::daughter_uniform_integrability) &&
                                   ok(check_id::daughter_moments_bounded) && ok(check_id::probability_range) &&
                                   ok(check_id::coalescence_dominance);
  const bool core_bounded = core_bounded_common && rep.initial_in_X_minus_theta;
  const bool core_relaxed = core_bounded_common && ok(check_id::daughter_relaxed_moment) && rep.initial_in_X_0;
  const bool sub = ok(check_id::kernel_sublinear_majorant);
  const bool lin = ok(check_id::kernel_linear_growth);
  auto& out = rep.applicable_results;

  if (core_singular && sub) out.push_back(result_id::singular_weak);
  if (core_singular && lin) out.push_back(result_id::singular_mass_conserving);
  if (core_singular && lin && rep.initial_in_X_2) out.push_back(result_id::singular_mass_conserving_x2);
  if (core_bounded && sub) out.push_back(result_id::bounded_weak);
  if (core_bounded && lin) out.push_back(result_id::bounded_mass_conserving);
  if (core_bounded && lin && rep.initial_in_X_2) out.push_back(result_id::bounded_mass_conserving_x2);
  if (core_relaxed && sub) out.push_back(result_id::bounded_relaxed_weak);
  if (core_relaxed && lin) out.push_back(result_id::bounded_relaxed_mass_conserving);
  if (core_relaxed && lin && rep.initial_in_X_2) out.push_back(result_id::bounded_relaxed_mass_conserving_x2);
  if (ok(check_id::kernel_globally_linear) && ok(check_id::daughter_mass) &&
      ok(check_id::daughter_uniform_integrability) && ok(check_id::daughter_moments_bounded) &&
      ok(check_id::probability_range) && rep.initial_in_X_minus_theta) {
    out.push_back(result_id::linear_kernel_mass_conserving);
  }
  if (ok(check_id::kernel_small_volume_bound) && lin && ok(check_id::daughter_mass) &&
      ok(check_id::probability_range) && ok(check_id::daughter_partial_moment) && rep.initial_in_X_minus_2alpha &&
      rep.initial_in_X_2) {
    out.push_back(result_id::uniqueness);
  }

  if (!consts.admissible) rep.notes.push_back(consts.reason);
  if (!rep.mass_conserving()) {
    rep.notes.push_back("no mass-conserving result covers this scenario; mass drift is reported, not asserted");
  }
  if (!ok(check_id::coalescence_dominance) && !ok(check_id::kernel_globally_linear)) {
    rep.notes.push_back("E falls below the coalescence threshold on (0,1)^2; moment bounds are not guaranteed");
  }
  return rep;
}

}  // namespace breakcoag
