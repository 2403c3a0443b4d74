#include "breakcoag/report_json.hpp"

namespace breakcoag {

using nlohmann::json;

json to_json(const GrowthCheck& c) {
  return {{"satisfied", c.satisfied},       {"declared", c.declared},   {"constant", c.constant},
          {"worst_residual", c.worst_residual}, {"witness", {c.witness_x, c.witness_y}}, {"evaluated", c.evaluated}};
}

json to_json(const GrowthClass& g) {
  return {{"alpha", g.alpha},
          {"small_volume_bound", to_json(g.small_volume_bound)},
          {"linear_growth", to_json(g.linear_growth)},
          {"sublinear_majorant", to_json(g.sublinear_majorant)},
          {"globally_linear", to_json(g.globally_linear)}};
}

json to_json(const TrialSet& s) {
  json out = json::array();
  for (const auto& [a, b] : s.intervals) out.push_back({a, b});
  return out;
}

json to_json(const UniformIntegrabilityReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"measure", row.measure},
                    {"max_ratio", row.max_ratio},
                    {"bound", row.bound},
                    {"witness", {row.witness_x, row.witness_y}},
                    {"witness_set", to_json(row.witness_set)}});
  }
  return {{"bounded", r.bounded}, {"decreasing", r.decreasing}, {"worst_residual", r.worst_residual}, {"rows", rows}};
}

json to_json(const HypothesisCheck& c) {
  json out = {{"id", c.id}, {"status", to_string(c.status)}, {"worst_residual", c.worst_residual}};
  if (c.witness) {
    json w = {{"x", c.witness->x}, {"y", c.witness->y}};
    if (c.witness->set) w["set"] = to_json(*c.witness->set);
    out["witness"] = w;
  }
  if (!c.detail.empty()) out["detail"] = c.detail;
  return out;
}

json to_json(const HypothesisReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  return {{"constants",
           {{"alpha", r.alpha},
            {"theta", r.theta},
            {"p", r.p},
            {"omega_coefficient", r.omega_coefficient},
            {"beta_0", r.beta_0},
            {"beta_minus_theta", r.beta_minus_theta},
            {"beta_minus_2alpha", r.beta_minus_2alpha},
            {"B_minus_alpha", r.B_minus_alpha},
            {"beta_prime", r.beta_prime},
            {"E_min", r.E_min},
            {"E_floor", r.E_floor}}},
          {"initial_moments",
           {{"X_minus_2alpha", r.initial_in_X_minus_2alpha},
            {"X_minus_theta", r.initial_in_X_minus_theta},
            {"X_0", r.initial_in_X_0},
            {"X_2", r.initial_in_X_2}}},
          {"growth", to_json(r.growth)},
          {"uniform_integrability", to_json(r.uniform_integrability)},
          {"checks", checks},
          {"applicable_results", r.applicable_results},
          {"notes", r.notes}};
}

json to_json(const StepStats& s) {
  return {{"accepted", s.accepted},         {"rejected", s.rejected},
          {"rhs_evaluations", s.rhs_evaluations}, {"clipped_mass", s.clipped_mass},
          {"max_clipped_fraction", s.max_clipped_fraction}, {"min_dt", s.min_dt},
          {"max_dt", s.max_dt}};
}

json to_json(const MassCheck& c) {
  return {{"passed", c.passed}, {"max_drift", c.max_drift}, {"worst_time", c.worst_time}, {"tolerance", c.tolerance}};
}

json to_json(const BoundCheck& b) {
  return {{"id", b.id},
          {"status", to_string(b.status)},
          {"order", b.order},
          {"worst_ratio", b.worst_ratio},
          {"worst_time", b.worst_time},
          {"envelope", b.envelope},
          {"detail", b.detail}};
}

json to_json(const AprioriReport& r) {
  json bounds = json::array();
  for (const auto& b : r.bounds) bounds.push_back(to_json(b));
  return {{"passed", r.passed()}, {"bounds", bounds}};
}

json to_json(const ContractionResult& r) {
  return {{"passed", r.passed},     {"rate", r.rate},         {"mass_bound", r.mass_bound},
          {"slack", r.slack},       {"worst_ratio", r.worst_ratio}, {"times", r.times},
          {"distance", r.distance}, {"envelope", r.envelope}};
}

json to_json(const EquicontinuityResult& r) {
  return {{"passed", r.passed}, {"estimate", r.estimate}, {"bound", r.bound}};
}

json to_json(const SweepRow& r) {
  json out = {{"E", r.E},
              {"E_min", r.E_min},
              {"threshold_met", r.threshold_met},
              {"mass_drift", r.mass_drift},
              {"negative_moment_initial", r.negative_moment_initial},
              {"negative_moment_final", r.negative_moment_final},
              {"negative_moment_growth", r.negative_moment_growth},
              {"breakage_collisions", r.breakage_collisions},
              {"apriori", to_string(r.apriori)}};
  if (!r.failure.empty()) out["failure"] = r.failure;
  return out;
}

json to_json(const WeakFormResidual& r) {
  json intervals = json::array();
  for (const auto& i : r.intervals) {
    intervals.push_back({{"t0", i.t0}, {"t1", i.t1}, {"lhs", i.lhs}, {"rhs", i.rhs}, {"relative", i.relative}});
  }
  return {{"max_relative", r.max_relative}, {"max_absolute", r.max_absolute}, {"intervals", intervals}};
}

json to_json(const PhiConstruction& pc) { return {{"theta", pc.theta}, {"j", pc.j}}; }

json to_json(const DlvpReport& r) {
  return {{"passed", r.passed()},
          {"integral", r.integral},
          {"integral_refined", r.integral_refined},
          {"integrable", r.integrable},
          {"nonincreasing", r.nonincreasing},
          {"convex", r.convex},
          {"min_theta_slope", r.min_theta_slope},
          {"theta_limit_ratio", r.theta_limit_ratio},
          {"theta_monotone", r.theta_monotone},
          {"first_piece_value", r.first_piece_value},
          {"first_piece_bound", r.first_piece_bound},
          {"min_curvature_margin", r.min_curvature_margin},
          {"min_integrated_margin", r.min_integrated_margin},
          {"inequalities", r.inequalities}};
}

}  // namespace breakcoag
