#include "breakcoag/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "breakcoag/errors.hpp"

namespace breakcoag {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(8);
  os << v;
  return os.str();
}

constexpr double envelope_tolerance = 1e-12;

}  // namespace

std::optional<std::size_t> MomentSeries::index(double order) const {
  for (std::size_t k = 0; k < orders.size(); ++k) {
    if (std::abs(orders[k] - order) <= 1e-14) return k;
  }
  return std::nullopt;
}

const std::vector<double>& MomentSeries::at(double order) const {
  const auto k = index(order);
  if (!k) throw std::out_of_range("moment order " + fmt(order) + " not recorded");
  return values[*k];
}

MomentSeries moment_series(const Trajectory& trajectory, const std::vector<double>& orders) {
  MomentSeries s;
  for (double m : orders) {
    if (!s.index(m)) s.orders.push_back(m + 0.0);
  }
  s.times = trajectory.times();
  s.values.assign(s.orders.size(), std::vector<double>(trajectory.states.size()));
  for (std::size_t t = 0; t < trajectory.states.size(); ++t) {
    for (std::size_t k = 0; k < s.orders.size(); ++k) s.values[k][t] = moment(trajectory.states[t], s.orders[k]);
  }
  return s;
}

MassCheck check_mass_conservation(const Trajectory& trajectory, double tolerance) {
  MassCheck out;
  out.tolerance = tolerance;
  if (trajectory.states.empty()) return out;
  const double m0 = mass(trajectory.states.front());
  if (m0 == 0.0) return out;
  for (const auto& s : trajectory.states) {
    const double drift = std::abs(mass(s) - m0) / m0;
    if (drift > out.max_drift) {
      out.max_drift = drift;
      out.worst_time = s.time;
    }
  }
  out.passed = out.max_drift <= tolerance;
  return out;
}

bool AprioriReport::passed() const {
  return std::none_of(bounds.begin(), bounds.end(), [](const BoundCheck& b) { return b.status == CheckStatus::fail; });
}

const BoundCheck& AprioriReport::bound(const std::string& id) const {
  for (const auto& b : bounds) {
    if (b.id == id) return b;
  }
  throw std::out_of_range("no bound named " + id);
}

std::vector<double> apriori_orders(const HypothesisReport& report) {
  return {-2.0 * report.alpha, -report.theta, 0.0, 1.0 - report.alpha, 1.0, 2.0};
}

namespace {

void compare(BoundCheck& b, const std::vector<double>& values, const std::vector<double>& times) {
  b.worst_ratio = 0.0;
  for (std::size_t t = 0; t < values.size(); ++t) {
    const double ratio = b.envelope[t] > 0.0 ? values[t] / b.envelope[t] : (values[t] > 0.0 ? INFINITY : 0.0);
    if (ratio > b.worst_ratio) {
      b.worst_ratio = ratio;
      b.worst_time = times[t];
    }
  }
  b.status = b.worst_ratio <= 1.0 + envelope_tolerance ? CheckStatus::pass : CheckStatus::fail;
}

}  // namespace

AprioriReport check_apriori_bounds(const MomentSeries& series, const HypothesisReport& report, double rho) {
  AprioriReport out;
  const double k1 = report.growth.small_volume_bound.constant;
  const double k2 = report.growth.linear_growth.constant;
  const double a = report.alpha;
  const auto& times = series.times;
  const bool small_ok = report.passed(check_id::kernel_small_volume_bound);
  const bool dominant = report.passed(check_id::coalescence_dominance);

  {
    BoundCheck b;
    b.id = "negative_moment";
    b.order = -2.0 * a;
    if (!small_ok || !dominant) {
      b.detail = "E below the coalescence threshold or kernel bound unmet";
    } else if (!series.index(b.order)) {
      b.detail = "order not recorded";
    } else {
      const auto& m = series.at(b.order);
      const double rate = k1 * report.beta_minus_2alpha * rho;
      for (double t : times) b.envelope.push_back((m.front() + rho) * std::exp(rate * t));
      compare(b, m, times);
      b.detail = "(M(0) + rho) exp(" + fmt(rate) + " t)";
    }
    out.bounds.push_back(b);
  }

  {
    BoundCheck b;
    b.id = "theta_moment";
    b.order = -report.theta;
    if (a > 0.0) {
      b.detail = "alpha > 0";
    } else if (!small_ok || !dominant || !report.passed(check_id::daughter_moments_bounded)) {
      b.detail = "E below the coalescence threshold or moment bounds unmet";
    } else if (!series.index(b.order) || !series.index(0.0)) {
      b.detail = "order not recorded";
    } else {
      const auto& m = series.at(b.order);
      const auto& m0 = series.at(0.0);
      double integral = 0.0;
      for (std::size_t t = 0; t < times.size(); ++t) {
        if (t > 0) integral += (times[t] - times[t - 1]) * (rho + std::max(m0[t], m0[t - 1]));
        b.envelope.push_back((m.front() + rho) * std::exp(k1 * report.beta_minus_theta * integral));
      }
      compare(b, m, times);
      b.detail = "(M(0) + rho) exp(k1 beta_-theta int (rho + M_0))";
    }
    out.bounds.push_back(b);
  }

  {
    BoundCheck b;
    b.id = "second_moment";
    b.order = 2.0;
    if (!small_ok || !report.passed(check_id::kernel_linear_growth) || !report.initial_in_X_2) {
      b.detail = "needs the linear-growth bound and a finite initial second moment";
    } else if (!series.index(2.0) || !series.index(1.0 - a)) {
      b.detail = "order not recorded";
    } else {
      const auto& m2 = series.at(2.0);
      const auto& mid = series.at(1.0 - a);
      double sup_mid = 0.0;
      // Piecewise Gronwall with the running sup of M_{1-a}.
      double bound = m2.front();
      for (std::size_t t = 0; t < times.size(); ++t) {
        sup_mid = std::max(sup_mid, mid[t]);
        if (t > 0) {
          const double lin = 2.0 * k1 * sup_mid * sup_mid;
          const double grow = 2.0 * (2.0 * k1 * sup_mid + k2 * rho);
          const double h = times[t] - times[t - 1];
          bound = (bound + lin / grow) * std::exp(grow * h) - lin / grow;
        }
        b.envelope.push_back(bound);
      }
      compare(b, m2, times);
      b.detail = "Gronwall envelope with measured sup M_{1-alpha}";
    }
    out.bounds.push_back(b);
  }
  return out;
}

std::optional<double> detect_gelation(const MomentSeries& series, double threshold) {
  const auto k = series.index(1.0);
  if (!k) throw std::out_of_range("detect_gelation needs the first moment");
  const auto& m1 = series.values[*k];
  if (m1.empty() || !(m1.front() > 0.0)) return std::nullopt;
  int run = 0;
  for (std::size_t t = 0; t < m1.size(); ++t) {
    const double loss = (m1.front() - m1[t]) / m1.front();
    run = loss > threshold ? run + 1 : 0;
    if (run == 3) return series.times[t - 2];
  }
  return std::nullopt;
}

double weighted_distance(const State& f, const State& g, double alpha) {
  if (f.density.size() != g.density.size()) throw DomainError("weighted_distance: states on different grids");
  const auto c = f.grid->centers();
  const auto dx = f.grid->widths();
  double d = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    d += std::max(std::pow(c[i], -alpha), c[i]) * std::abs(f.density[i] - g.density[i]) * dx[i];
  }
  return d;
}

ContractionResult contraction_envelope(const Trajectory& f, const Trajectory& g, const HypothesisReport& report,
                                       double slack) {
  if (f.states.size() != g.states.size()) throw DomainError("contraction: trajectories differ in length");
  ContractionResult out;
  out.slack = slack;
  const double a = report.alpha;
  for (std::size_t t = 0; t < f.states.size(); ++t) {
    const double m = moment(f.states[t], -2.0 * a) + moment(g.states[t], -2.0 * a) + moment(f.states[t], 2.0) +
                     moment(g.states[t], 2.0);
    out.mass_bound = std::max(out.mass_bound, m);
  }
  const double k1 = report.growth.small_volume_bound.constant;
  out.rate = k1 * (1.0 + std::pow(2.0, 2.0 + a) + 2.0 * report.B_minus_alpha) * out.mass_bound;
  const double d0 = weighted_distance(f.states.front(), g.states.front(), a);
  for (std::size_t t = 0; t < f.states.size(); ++t) {
    const double time = f.states[t].time;
    const double d = weighted_distance(f.states[t], g.states[t], a);
    const double env = d0 * std::exp(out.rate * time);
    out.times.push_back(time);
    out.distance.push_back(d);
    out.envelope.push_back(env);
    const double ratio = env > 0.0 ? d / env : (d > 0.0 ? INFINITY : 0.0);
    out.worst_ratio = std::max(out.worst_ratio, ratio);
  }
  out.passed = out.worst_ratio <= 1.0 + slack;
  return out;
}

ContractionResult contraction_experiment(const OperatorTables& tables, const HypothesisReport& report,
                                         const State& f0, const State& g0, const StepControl& control,
                                         double slack) {
  if (!report.applies(result_id::uniqueness)) {
    std::string unmet;
    for (const char* id : {check_id::kernel_small_volume_bound, check_id::kernel_linear_growth,
                           check_id::daughter_mass, check_id::probability_range, check_id::daughter_partial_moment}) {
      if (!report.passed(id)) unmet += std::string(unmet.empty() ? "" : ", ") + id;
    }
    if (!report.initial_in_X_minus_2alpha) unmet += std::string(unmet.empty() ? "" : ", ") + "X_-2alpha";
    if (!report.initial_in_X_2) unmet += std::string(unmet.empty() ? "" : ", ") + "X_2";
    throw ConfigError("contraction requires the uniqueness hypotheses; unmet: " + unmet);
  }
  const auto f = integrate(tables, f0, control);
  const auto g = integrate(tables, g0, control);
  return contraction_envelope(f, g, report, slack);
}

EquicontinuityResult equicontinuity_modulus(const Trajectory& trajectory, const HypothesisReport& report,
                                            double rho) {
  if (trajectory.states.size() < 3) throw DomainError("equicontinuity_modulus: need at least three output times");
  EquicontinuityResult out;
  const double a = report.alpha;
  double sup = 0.0;
  for (const auto& s : trajectory.states) sup = std::max({sup, moment(s, -2.0 * a), moment(s, -a)});
  for (std::size_t k = 1; k < trajectory.states.size(); ++k) {
    const State& s0 = trajectory.states[k - 1];
    const State& s1 = trajectory.states[k];
    const auto c = s0.grid->centers();
    const auto dx = s0.grid->widths();
    double d = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) d += std::pow(c[i], -a) * std::abs(s1.density[i] - s0.density[i]) * dx[i];
    const double h = s1.time - s0.time;
    if (h > 0.0) out.estimate = std::max(out.estimate, d / h);
  }
  const double k1 = report.growth.small_volume_bound.constant;
  out.bound = k1 * (2.0 + report.beta_minus_2alpha) * (sup + rho) * (sup + rho);
  out.passed = out.estimate <= out.bound;
  return out;
}

std::vector<SweepRow> e_sweep(const SweepTemplate& scenario, const std::vector<double>& E_values) {
  std::vector<SweepRow> rows;
  const State initial = sample_initial(scenario.initial, scenario.grid);
  const double rho = mass(initial);
  for (double value : E_values) {
    if (!(value >= 0.0 && value <= 1.0)) throw ConfigError("sweep: E values must lie in [0, 1]");
    SweepRow row;
    row.E = value;
    const ProbSpec prob{prob::Constant{value}};
    const auto report = check_scenario(scenario.kernel, scenario.daughter, prob, scenario.initial, scenario.checks);
    row.E_min = report.E_min;
    row.threshold_met = report.passed(check_id::coalescence_dominance);
    const double order = -2.0 * report.alpha;
    row.negative_moment_initial = moment(initial, order);
    try {
      const auto tables = build_tables(scenario.grid, scenario.kernel, scenario.daughter, prob, scenario.tables);
      const auto traj = integrate(tables, initial, scenario.control);
      row.mass_drift = check_mass_conservation(traj, 1.0).max_drift;
      row.negative_moment_final = moment(traj.states.back(), order);
      row.negative_moment_growth =
          row.negative_moment_initial > 0.0 ? row.negative_moment_final / row.negative_moment_initial : 0.0;
      double prev = 0.0;
      for (std::size_t k = 0; k < traj.states.size(); ++k) {
        RhsTotals totals;
        apply_rhs(tables, traj.states[k], &totals);
        if (k > 0) {
          row.breakage_collisions +=
              0.5 * (traj.states[k].time - traj.states[k - 1].time) * (prev + totals.breakage_rate);
        }
        prev = totals.breakage_rate;
      }
      const auto series = moment_series(traj, apriori_orders(report));
      row.apriori = check_apriori_bounds(series, report, rho).bound("negative_moment").status;
    } catch (const IntegrationError& e) {
      row.failure = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace breakcoag
