#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "breakcoag/errors.hpp"
#include "breakcoag/grid.hpp"
#include "oracles.hpp"

using namespace breakcoag;

TEST(Grid, RejectsBadParameters) {
  EXPECT_THROW(make_grid(0.0, 1.0, 10), ConfigError);
  EXPECT_THROW(make_grid(-1.0, 1.0, 10), ConfigError);
  EXPECT_THROW(make_grid(1.0, 1.0, 10), ConfigError);
  EXPECT_THROW(make_grid(1e-3, 1.0, 1), ConfigError);
}

TEST(Grid, GeometricEdgesAndCenters) {
  const auto g = make_grid(1e-4, 1e3, 300);
  ASSERT_EQ(g->cells(), 300u);
  EXPECT_EQ(g->edges().size(), 301u);
  EXPECT_DOUBLE_EQ(g->x_min(), 1e-4);
  EXPECT_EQ(g->x_max(), 1e3);
  const double ratio = std::pow(1e7, 1.0 / 300.0);
  EXPECT_NEAR(g->ratio(), ratio, 1e-14);
  for (std::size_t i = 0; i < g->cells(); ++i) {
    EXPECT_NEAR(g->edges()[i + 1] / g->edges()[i], ratio, 1e-12);
    EXPECT_NEAR(g->centers()[i], std::sqrt(g->edges()[i] * g->edges()[i + 1]), 1e-14 * g->centers()[i]);
    EXPECT_NEAR(g->widths()[i], g->edges()[i + 1] - g->edges()[i], 1e-14 * g->widths()[i]);
  }
}

TEST(Grid, Locate) {
  const auto g = make_grid(1.0, 16.0, 4);
  EXPECT_EQ(g->locate(1.0), 0u);
  EXPECT_EQ(g->locate(2.5), 1u);
  EXPECT_EQ(g->locate(15.999), 3u);
  EXPECT_FALSE(g->locate(16.0));
  EXPECT_FALSE(g->locate(0.5));
}

TEST(State, ZeroStateHasZeroMoments) {
  const auto s = zero_state(make_grid(1e-3, 10.0, 20));
  EXPECT_EQ(moment(s, 0.0), 0.0);
  EXPECT_EQ(mass(s), 0.0);
  EXPECT_EQ(moment(s, -0.5), 0.0);
}

TEST(State, ValidateRejectsNegativeAndWrongSize) {
  auto s = zero_state(make_grid(1e-3, 10.0, 20));
  EXPECT_NO_THROW(validate(s));
  s.density[3] = -1e-3;
  EXPECT_THROW(validate(s), DomainError);
  s.density[3] = NAN;
  EXPECT_THROW(validate(s), DomainError);
  s.density.resize(5, 0.0);
  EXPECT_THROW(validate(s), DomainError);
}

TEST(InitialCondition, ExponentialCellAveragesMatchQuadrature) {
  const auto g = make_grid(1e-3, 50.0, 60);
  const InitialCondition ic{ic::Exponential{2.0}, std::nullopt};
  const State s = sample_initial(ic, g);
  double raw_mass = 0.0;
  std::vector<double> raw(g->cells());
  for (std::size_t i = 0; i < g->cells(); ++i) {
    const double a = g->edges()[i], b = g->edges()[i + 1];
    raw[i] = oracle::smooth([](double x) { return 2.0 * std::exp(-2.0 * x); }, a, b) / (b - a);
    raw_mass += g->centers()[i] * raw[i] * g->widths()[i];
  }
  for (std::size_t i = 0; i < g->cells(); ++i) EXPECT_NEAR(s.density[i], raw[i] / raw_mass, 1e-12 * raw[i] / raw_mass + 1e-300);
  EXPECT_NEAR(mass(s), 1.0, 1e-14);
}

TEST(InitialCondition, ConfiguredMassIsHonoured) {
  const auto g = make_grid(1e-3, 50.0, 60);
  const State s = sample_initial({ic::Exponential{1.0}, 3.5}, g);
  EXPECT_NEAR(mass(s), 3.5, 1e-13);
}

TEST(InitialCondition, MomentsConvergeToGamma) {
  const auto g = make_grid(1e-6, 1e3, 400);
  const State s = sample_initial({ic::Exponential{1.0}, 1.0}, g);
  for (double m : {0.0, 0.5, 2.0, 3.0}) {
    EXPECT_LT(oracle::relative(moment(s, m), oracle::exponential_moment(m)), 2e-3) << "m = " << m;
  }
}

TEST(InitialCondition, PowerCutoffValidationAndMoments) {
  EXPECT_THROW(validate(InitialCondition{ic::PowerCutoff{2.0, 1.0}, std::nullopt}), ConfigError);
  EXPECT_THROW(validate(InitialCondition{ic::PowerCutoff{0.5, -1.0}, std::nullopt}), ConfigError);
  const InitialCondition ic{ic::PowerCutoff{0.5, 1.0}, std::nullopt};
  EXPECT_TRUE(ic.has_finite_moment(-0.25));
  EXPECT_FALSE(ic.has_finite_moment(-0.5));
  EXPECT_TRUE(ic.has_finite_moment(2.0));
  const auto g = make_grid(1e-8, 10.0, 300);
  const State s = sample_initial(ic, g);
  // C x^{-1/2} on (0,1) with unit mass: C = 3/2, so M_0 = 3.
  EXPECT_NEAR(moment(s, 0.0), 3.0, 3e-3);
  const double c = g->centers()[g->cells() - 1];
  EXPECT_EQ(s.density[*g->locate(c)], 0.0);
}

TEST(InitialCondition, ExponentialHasAllPositiveMoments) {
  const InitialCondition ic{ic::Exponential{1.0}, std::nullopt};
  EXPECT_TRUE(ic.has_finite_moment(0.0));
  EXPECT_TRUE(ic.has_finite_moment(-0.5));
  EXPECT_FALSE(ic.has_finite_moment(-1.0));
}

TEST(InitialCondition, SmearedPointMassIsPeaked) {
  const auto g = make_grid(1e-3, 100.0, 200);
  const State s = sample_initial({ic::SmearedPointMass{5.0, 0.5}, 2.0}, g);
  EXPECT_NEAR(mass(s), 2.0, 1e-13);
  EXPECT_NEAR(moment(s, 1.0) / moment(s, 0.0), 5.0, 0.1);
}

TEST(Profile, InterpolatesLogLogAndIntegrates) {
  const TabulatedProfile h({1.0, 2.0, 4.0}, {1.0, 0.25, 0.0625});
  EXPECT_NEAR(h(std::sqrt(2.0)), 0.5, 1e-14);
  EXPECT_EQ(h(5.0), 0.0);
  EXPECT_EQ(h(0.5), 0.0);
  EXPECT_NEAR(h.integral(1.0, 4.0), oracle::smooth([](double x) { return 1.0 / (x * x); }, 1.0, 4.0), 1e-13);
}

TEST(Profile, FittedTailReproducesPowerLaw) {
  const TabulatedProfile h = TabulatedProfile({1.0, 2.0, 4.0}, {1.0, std::pow(2.0, -0.5), 0.5}).with_fitted_tail();
  ASSERT_TRUE(h.tail());
  EXPECT_NEAR(h.tail()->exponent, -0.5, 1e-14);
  EXPECT_NEAR(h(0.25), 2.0, 1e-13);
  EXPECT_NEAR(h.integral(0.0, 1.0), 2.0, 1e-13);
}

TEST(Profile, NonIntegrableTailIsDataError) {
  const TabulatedProfile h = TabulatedProfile::from_csv(oracle::data("profile_singular.csv"));
  EXPECT_THROW(h.with_fitted_tail(), DataError);
}

TEST(Profile, RejectsMalformedInput) {
  EXPECT_THROW(TabulatedProfile({1.0, 0.5}, {1.0, 1.0}), DataError);
  EXPECT_THROW(TabulatedProfile({1.0, 2.0}, {1.0, -1.0}), DataError);
  EXPECT_THROW(TabulatedProfile::from_csv(oracle::data("kernel_sum.csv")), DataError);
  EXPECT_THROW(TabulatedProfile::from_csv(oracle::data("missing.csv")), DataError);
}

TEST(InitialCondition, TabulatedProfileSamples) {
  const TabulatedProfile h = TabulatedProfile::from_csv(oracle::data("profile_exp.csv"));
  const auto g = make_grid(1e-3, 100.0, 150);
  const State s = sample_initial({ic::Tabulated{h}, std::nullopt}, g);
  EXPECT_NEAR(mass(s), 1.0, 1e-3);
  EXPECT_NEAR(moment(s, 0.0), 1.0, 2e-3);
}
