#include <gtest/gtest.h>

#include <cmath>

#include "breakcoag/diagnostics.hpp"
#include "breakcoag/errors.hpp"
#include "oracles.hpp"

using namespace breakcoag;

namespace {

const InitialCondition exponential{ic::Exponential{1.0}, 1.0};

struct Run {
  OperatorTables tables;
  HypothesisReport report;
  Trajectory trajectory;
};

Run simulate(const KernelFamily& k, const DaughterSpec& d, double E, double t_end, double every,
             std::size_t cells = 80, TableOptions opt = {}, double x_max = 1e3) {
  const auto spec = make_kernel(k);
  auto tables = build_tables(make_grid(1e-4, x_max, cells), spec, d, {prob::Constant{E}}, opt);
  auto report = check_scenario(spec, d, {prob::Constant{E}}, exponential);
  StepControl c;
  c.t_end = t_end;
  c.output_times = uniform_outputs(t_end, every);
  auto traj = integrate(tables, sample_initial(exponential, tables.grid_ptr()), c);
  return {std::move(tables), std::move(report), std::move(traj)};
}

}  // namespace

TEST(MomentSeries, RecordsRequestedOrdersOnce) {
  const auto run = simulate(kernel::Constant{1.0}, {daughter::Uniform{}}, 1.0, 1.0, 0.25, 40);
  const auto s = moment_series(run.trajectory, {0.0, 1.0, -0.0, 2.0});
  EXPECT_EQ(s.orders.size(), 3u);
  EXPECT_EQ(s.times.size(), run.trajectory.states.size());
  EXPECT_EQ(s.at(2.0).size(), s.times.size());
  EXPECT_THROW(s.at(3.0), std::out_of_range);
}

TEST(MassConservation, ZeroStateHasNoDrift) {
  Trajectory t;
  t.states.push_back(zero_state(make_grid(1e-3, 1.0, 10)));
  const auto r = check_mass_conservation(t, 1e-8);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.max_drift, 0.0);
}

TEST(MassConservation, GelationLeaksMassOnTheTruncatedDomain) {
  TableOptions out;
  out.mode = TruncationMode::outflow;
  const auto run = simulate(kernel::Product{}, {daughter::Uniform{}}, 1.0, 1.0, 0.1, 120, out);
  const auto r = check_mass_conservation(run.trajectory, 1e-8);
  EXPECT_FALSE(r.passed);
  double previous = 0.0;
  for (const auto& s : run.trajectory.states) {
    if (s.time < 0.5) continue;
    const double drift = 1.0 - mass(s);
    EXPECT_GE(drift, previous);
    previous = drift;
  }
}

TEST(AprioriBounds, HoldAtTheThreshold) {
  // power_total(-1/2): beta_0 = 3 and E_min = 1/2.
  const auto run = simulate(kernel::Constant{1.0}, {daughter::PowerTotal{-0.5}}, 0.5, 2.0, 0.1);
  EXPECT_DOUBLE_EQ(run.report.beta_0, 3.0);
  EXPECT_DOUBLE_EQ(run.report.E_min, 0.5);
  const auto series = moment_series(run.trajectory, apriori_orders(run.report));
  const auto r = check_apriori_bounds(series, run.report, 1.0);
  EXPECT_TRUE(r.passed());
  const auto& b = r.bound("negative_moment");
  EXPECT_EQ(b.status, CheckStatus::pass);
  const double k1 = run.report.growth.small_volume_bound.constant;
  const auto& m0 = series.at(0.0);
  for (std::size_t t = 0; t < series.times.size(); ++t) {
    EXPECT_NEAR(b.envelope[t], (1.0 + m0.front()) * std::exp(k1 * 3.0 * series.times[t]), 1e-12 * b.envelope[t]);
  }
  EXPECT_EQ(r.bound("theta_moment").status, CheckStatus::pass);
  EXPECT_EQ(r.bound("second_moment").status, CheckStatus::pass);
}

TEST(AprioriBounds, PureCoagulationHoldsTrivially) {
  const auto run = simulate(kernel::Constant{1.0}, {daughter::Uniform{}}, 1.0, 2.0, 0.25);
  const auto series = moment_series(run.trajectory, apriori_orders(run.report));
  const auto r = check_apriori_bounds(series, run.report, 1.0);
  EXPECT_TRUE(r.passed());
  EXPECT_LT(r.bound("negative_moment").worst_ratio, 1.0);
}

TEST(AprioriBounds, BelowThresholdIsNotApplicable) {
  const auto run = simulate(kernel::Constant{1.0}, {daughter::PowerTotal{-0.5}}, 0.3, 0.5, 0.1, 40);
  const auto r = check_apriori_bounds(moment_series(run.trajectory, apriori_orders(run.report)), run.report, 1.0);
  EXPECT_EQ(r.bound("negative_moment").status, CheckStatus::not_applicable);
  EXPECT_EQ(r.bound("theta_moment").status, CheckStatus::not_applicable);
}

TEST(Gelation, AdditiveKernelKeepsItsMass) {
  const auto run = simulate(kernel::Additive{}, {daughter::Uniform{}}, 1.0, 5.0, 0.25, 120);
  const auto s = moment_series(run.trajectory, {0.0, 1.0});
  EXPECT_FALSE(detect_gelation(s));
  const auto& m0 = s.at(0.0);
  for (std::size_t t = 0; t < s.times.size() && s.times[t] <= 2.0; ++t) {
    EXPECT_LT(oracle::relative(m0[t], oracle::additive_kernel_number(s.times[t])), 2e-2);
  }
}

TEST(Gelation, ProductKernelOnsetNearOneHalf) {
  TableOptions out;
  out.mode = TruncationMode::outflow;
  const auto run = simulate(kernel::Product{}, {daughter::Uniform{}}, 1.0, 0.8, 0.025, 200, out);
  const auto onset = detect_gelation(moment_series(run.trajectory, {1.0}));
  ASSERT_TRUE(onset);
  EXPECT_GE(*onset, 0.45);
  EXPECT_LE(*onset, 0.7);
}

TEST(Gelation, ZeroStateAndMissingOrder) {
  Trajectory t;
  const auto g = make_grid(1e-3, 1.0, 10);
  for (int k = 0; k < 5; ++k) t.states.push_back(zero_state(g, 0.1 * k));
  EXPECT_FALSE(detect_gelation(moment_series(t, {1.0})));
  EXPECT_THROW(detect_gelation(moment_series(t, {0.0})), std::out_of_range);
}

TEST(Contraction, IdenticalDataStayAtZeroDistance) {
  const auto run = simulate(kernel::Constant{1.0}, {daughter::Uniform{}}, 0.5, 1.0, 0.25, 40);
  const auto r = contraction_envelope(run.trajectory, run.trajectory, run.report);
  EXPECT_TRUE(r.passed);
  for (double d : r.distance) EXPECT_EQ(d, 0.0);
}

TEST(Contraction, ScaledDataRespectTheEnvelope) {
  const auto run = simulate(kernel::Constant{1.0}, {daughter::Uniform{}}, 0.5, 2.0, 0.1, 80);
  EXPECT_DOUBLE_EQ(run.report.B_minus_alpha, 2.0);
  const State f0 = run.trajectory.states.front();
  State g0 = f0;
  for (double& v : g0.density) v *= 1.01;
  StepControl c;
  c.t_end = 2.0;
  c.output_times = uniform_outputs(2.0, 0.1);
  const auto r = contraction_experiment(run.tables, run.report, f0, g0, c);
  EXPECT_TRUE(r.passed);
  // Lambda = k1 (1 + 2^2 + 2 * 2) M with k1 = 1.
  EXPECT_NEAR(r.rate, 9.0 * r.mass_bound, 1e-12 * r.rate);
  EXPECT_NEAR(r.distance.front(), 0.01 * weighted_distance(f0, zero_state(f0.grid), 0.0), 1e-15);
}

TEST(Contraction, LocalizedLargeVolumePerturbation) {
  const auto run = simulate(kernel::Constant{1.0}, {daughter::Uniform{}}, 0.5, 1.0, 0.1, 80);
  const State f0 = run.trajectory.states.front();
  State g0 = f0;
  const auto c = f0.grid->centers();
  for (std::size_t i = 0; i < g0.size(); ++i) g0.density[i] += 1e-4 * std::exp(-0.5 * std::pow(c[i] - 20.0, 2));
  StepControl ctl;
  ctl.t_end = 1.0;
  ctl.output_times = uniform_outputs(1.0, 0.1);
  const auto r = contraction_experiment(run.tables, run.report, f0, g0, ctl);
  EXPECT_TRUE(r.passed);
  StepControl fine = ctl;
  fine.dt_max = 0.05;
  fine.rtol = 1e-8;
  const auto r2 = contraction_experiment(run.tables, run.report, f0, g0, fine);
  EXPECT_NEAR(r2.distance.back(), r.distance.back(), 1e-6);
}

TEST(Contraction, OutsideUniquenessIsConfigError) {
  const auto run = simulate(kernel::Product{}, {daughter::Uniform{}}, 0.5, 0.2, 0.1, 40);
  StepControl c;
  c.t_end = 0.2;
  const State f0 = run.trajectory.states.front();
  try {
    contraction_experiment(run.tables, run.report, f0, f0, c);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("kernel_linear_growth"), std::string::npos);
  }
}

TEST(Equicontinuity, ZeroStateGivesZero) {
  Trajectory t;
  const auto g = make_grid(1e-3, 1.0, 10);
  for (int k = 0; k < 4; ++k) t.states.push_back(zero_state(g, 0.1 * k));
  const auto report = check_scenario(make_kernel(kernel::Constant{1.0}), {daughter::Uniform{}}, {prob::Constant{1.0}},
                                     exponential);
  const auto r = equicontinuity_modulus(t, report, 0.0);
  EXPECT_EQ(r.estimate, 0.0);
  t.states.resize(2);
  EXPECT_THROW(equicontinuity_modulus(t, report, 0.0), DomainError);
}

TEST(Equicontinuity, BelowTheAssembledConstantAndStableUnderRefinement) {
  const auto coarse = simulate(kernel::Constant{1.0}, {daughter::Uniform{}}, 1.0, 2.0, 0.05, 80);
  const auto fine = simulate(kernel::Constant{1.0}, {daughter::Uniform{}}, 1.0, 2.0, 0.025, 80);
  const auto a = equicontinuity_modulus(coarse.trajectory, coarse.report, 1.0);
  const auto b = equicontinuity_modulus(fine.trajectory, fine.report, 1.0);
  EXPECT_TRUE(a.passed);
  EXPECT_LE(a.estimate, a.bound);
  EXPECT_LT(oracle::relative(a.estimate, b.estimate), 0.1);
}

TEST(Sweep, RowsReportTheExpectedDiagnostics) {
  SweepTemplate st{make_grid(1e-4, 1e3, 60), make_kernel(kernel::SumProduct{-0.25, 0.5}), {daughter::PowerTotal{0.0}},
                   exponential, StepControl{}, TableOptions{}, CheckOptions{}};
  st.control.t_end = 0.5;
  const double e3 = threshold_singular(0.0, -0.25);
  const auto rows = e_sweep(st, {0.0, e3, 1.0});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_FALSE(rows[0].threshold_met);
  EXPECT_GT(rows[0].negative_moment_growth, rows[2].negative_moment_growth);
  EXPECT_LT(rows[2].negative_moment_growth, 1.0);
  EXPECT_EQ(rows[1].apriori, CheckStatus::pass);
  EXPECT_EQ(rows[2].breakage_collisions, 0.0);
  EXPECT_LT(rows[2].mass_drift, 1e-12);
  EXPECT_THROW(e_sweep(st, {1.5}), ConfigError);
}
