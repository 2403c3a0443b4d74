#pragma once

#include <optional>
#include <string>
#include <vector>

#include "breakcoag/hypotheses.hpp"
#include "breakcoag/solver.hpp"

namespace breakcoag {

struct MomentSeries {
  std::vector<double> times;
  std::vector<double> orders;
  // values[k][t]: moment of order orders[k] at times[t].
  std::vector<std::vector<double>> values;

  std::optional<std::size_t> index(double order) const;
  // Throws std::out_of_range if the order was not recorded.
  const std::vector<double>& at(double order) const;
};

// Duplicate orders are recorded once.
MomentSeries moment_series(const Trajectory& trajectory, const std::vector<double>& orders);

struct MassCheck {
  bool passed = true;
  double max_drift = 0.0;
  double worst_time = 0.0;
  double tolerance = 0.0;
};

// max_t |M_1(t) - M_1(0)| / M_1(0) against `tolerance`; a zero state has no
// drift.
MassCheck check_mass_conservation(const Trajectory& trajectory, double tolerance);

struct BoundCheck {
  std::string id;
  CheckStatus status = CheckStatus::not_applicable;
  double order = 0.0;
  // max_t value / envelope.
  double worst_ratio = 0.0;
  double worst_time = 0.0;
  std::vector<double> envelope;
  std::string detail;
};

struct AprioriReport {
  std::vector<BoundCheck> bounds;

  bool passed() const;
  const BoundCheck& bound(const std::string& id) const;
};

// Moment orders the a priori checks read from the series.
std::vector<double> apriori_orders(const HypothesisReport& report);

// Checks, at every output time:
//   negative_moment: M_{-2a}(t) <= (M_{-2a}(0) + rho) exp(k1 beta_{-2a} rho t)
//     (the number bound with beta_0 when alpha = 0);
//   theta_moment (alpha = 0): M_{-theta}(t) <= (M_{-theta}(0) + rho)
//     exp(k1 beta_{-theta} int_0^t (rho + M_0));
//   second_moment: M_2 below the Gronwall envelope of
//     dM_2/dt <= 2 k1 Mbar^2 + 2 (2 k1 Mbar + k2 rho) M_2, Mbar = sup M_{1-a}.
// Checks whose hypotheses fail are marked n/a.
AprioriReport check_apriori_bounds(const MomentSeries& series, const HypothesisReport& report, double rho);

// First output time starting a run of three consecutive outputs whose
// relative mass loss exceeds `threshold`.
std::optional<double> detect_gelation(const MomentSeries& series, double threshold = 1e-2);

struct ContractionResult {
  std::vector<double> times;
  std::vector<double> distance;
  std::vector<double> envelope;
  double rate = 0.0;       // Lambda
  double mass_bound = 0.0; // max_t M_{-2a}(f) + M_{-2a}(g) + M_2(f) + M_2(g)
  double slack = 0.05;
  double worst_ratio = 0.0;
  bool passed = true;
};

// Weighted distance sum_i max{c_i^{-alpha}, c_i} |f_i - g_i| dx_i.
double weighted_distance(const State& f, const State& g, double alpha);

// Runs both initial states on the same tables and compares the distance with
// d(0) exp(Lambda t), Lambda = k1 (1 + 2^{2+alpha} + 2 B_{-alpha}) M. Throws
// ConfigError when the report does not list the uniqueness result.
ContractionResult contraction_experiment(const OperatorTables& tables, const HypothesisReport& report,
                                         const State& f0, const State& g0, const StepControl& control,
                                         double slack = 0.05);

// Envelope evaluation on given trajectories.
ContractionResult contraction_envelope(const Trajectory& f, const Trajectory& g, const HypothesisReport& report,
                                       double slack = 0.05);

struct EquicontinuityResult {
  // max over adjacent outputs of sum c^{-alpha} |f(t) - f(s)| dx / |t - s|.
  double estimate = 0.0;
  // k1 (2 + beta_{-2a}) (C + rho)^2, C = sup_t max{M_{-2a}, M_{-a}}.
  double bound = 0.0;
  bool passed = true;
};

EquicontinuityResult equicontinuity_modulus(const Trajectory& trajectory, const HypothesisReport& report,
                                            double rho);

struct SweepTemplate {
  GridPtr grid;
  KernelSpec kernel;
  DaughterSpec daughter;
  InitialCondition initial;
  StepControl control;
  TableOptions tables;
  CheckOptions checks;
};

struct SweepRow {
  double E = 0.0;
  double E_min = 0.0;
  bool threshold_met = false;
  double mass_drift = 0.0;
  double negative_moment_initial = 0.0;
  double negative_moment_final = 0.0;
  double negative_moment_growth = 0.0;
  // Time integral of the breakup collision rate.
  double breakage_collisions = 0.0;
  CheckStatus apriori = CheckStatus::not_applicable;
  std::string failure;
};

// One run per constant E; integration failures are recorded in the row.
std::vector<SweepRow> e_sweep(const SweepTemplate& scenario, const std::vector<double>& E_values);

}  // namespace breakcoag
