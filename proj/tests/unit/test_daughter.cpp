#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "breakcoag/daughter.hpp"
#include "breakcoag/errors.hpp"
#include "oracles.hpp"

using namespace breakcoag;

namespace {

// int_lo^hi z^m b(z, x, y) dz, split at the support breakpoints.
double quad_moment(const DaughterSpec& d, double m, double hi, double x, double y) {
  auto f = [&](double z) { return std::pow(z, m) * eval_b(d, z, x, y); };
  std::vector<double> cuts{0.0};
  for (double c : {std::min(x, y), std::max(x, y)}) {
    if (c < hi) cuts.push_back(c);
  }
  cuts.push_back(hi);
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (cuts[k + 1] > cuts[k]) sum += oracle::singular(f, cuts[k], cuts[k + 1], 1e-13);
  }
  return sum;
}

const std::vector<DaughterSpec> families{{daughter::PowerTotal{0.0}},  {daughter::PowerTotal{-0.5}},
                                         {daughter::PowerTotal{1.5}},  {daughter::PowerEach{0.0}},
                                         {daughter::PowerEach{-0.3}}, {daughter::Uniform{}}};

}  // namespace

TEST(Daughter, DensityFormulas) {
  EXPECT_NEAR(eval_b({daughter::PowerTotal{-0.5}}, 0.25, 1.0, 3.0), 1.5 * 2.0 / 2.0, 1e-14);
  EXPECT_EQ(eval_b({daughter::PowerTotal{0.0}}, 5.0, 1.0, 3.0), 0.0);
  EXPECT_NEAR(eval_b({daughter::Uniform{}}, 1.0, 1.0, 3.0), 0.5, 1e-15);
  // z = 2 lies only in the support of the y = 3 term.
  EXPECT_NEAR(eval_b({daughter::PowerEach{0.0}}, 2.0, 1.0, 3.0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(eval_b({daughter::PowerEach{0.0}}, 0.5, 1.0, 3.0), 2.0 + 2.0 / 3.0, 1e-14);
}

TEST(Daughter, RejectsNuAtOrBelowMinusOne) {
  EXPECT_THROW(validate(DaughterSpec{daughter::PowerTotal{-1.0}}), ConfigError);
  EXPECT_NO_THROW(validate(DaughterSpec{daughter::PowerTotal{-0.9}}));
}

TEST(Daughter, MassIdentity) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 3.0);
  for (const auto& d : families) {
    for (int k = 0; k < 200; ++k) {
      const double x = std::pow(10.0, u(rng)), y = std::pow(10.0, u(rng));
      EXPECT_NEAR(moment_integral(d, 1.0, x, y), x + y, 1e-12 * (x + y)) << d.name();
    }
  }
}

TEST(Daughter, MomentsMatchQuadrature) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 2.0);
  for (const auto& d : families) {
    for (double m : {-0.4, -0.25, 0.0, 0.5, 1.0, 2.0}) {
      if (m <= -(d.nu() + 1.0)) continue;
      for (int k = 0; k < 20; ++k) {
        const double x = std::pow(10.0, u(rng)), y = std::pow(10.0, u(rng));
        const double ref = quad_moment(d, m, x + y, x, y);
        EXPECT_LT(oracle::relative(moment_integral(d, m, x, y), ref), 1e-8) << d.name() << " m=" << m;
      }
    }
  }
}

TEST(Daughter, PartialMomentsMatchQuadrature) {
  for (const auto& d : families) {
    for (double upper : {0.05, 0.7, 1.0, 2.5, 10.0}) {
      const double x = 0.4, y = 1.9;
      const double ref = quad_moment(d, 0.0, std::min(upper, x + y), x, y);
      EXPECT_LT(oracle::relative(partial_moment_integral(d, 0.0, upper, x, y), ref), 1e-8) << d.name();
    }
  }
}

TEST(Daughter, DivergentOrderIsDomainError) {
  EXPECT_THROW(moment_integral({daughter::PowerTotal{-0.5}}, -0.5, 1.0, 1.0), DomainError);
  EXPECT_THROW(moment_integral({daughter::Uniform{}}, -1.0, 1.0, 1.0), DomainError);
  EXPECT_NO_THROW(moment_integral({daughter::Uniform{}}, -0.99, 1.0, 1.0));
}

TEST(DaughterConstants, FragmentNumberBounds) {
  EXPECT_DOUBLE_EQ(daughter_constants({daughter::PowerTotal{-0.5}}, 0.0).beta_0, 3.0);
  EXPECT_DOUBLE_EQ(daughter_constants({daughter::PowerTotal{0.0}}, 0.0).beta_0, 2.0);
  EXPECT_DOUBLE_EQ(daughter_constants({daughter::Uniform{}}, 0.0).beta_0, 2.0);
  EXPECT_DOUBLE_EQ(daughter_constants({daughter::PowerEach{0.0}}, 0.0).beta_0, 4.0);
  // beta_0 bounds the fragment number.
  for (const auto& d : families) {
    const auto c = daughter_constants(d, 0.0);
    EXPECT_LE(moment_integral(d, 0.0, 0.3, 7.0), c.beta_0 * (1.0 + 1e-14)) << d.name();
  }
}

TEST(DaughterConstants, UniformPartialMomentBoundIsTwo) {
  const auto c = daughter_constants({daughter::Uniform{}}, 0.0);
  EXPECT_DOUBLE_EQ(c.B_minus_alpha, 2.0);
  for (double s : {0.1, 0.9, 1.0, 5.0, 100.0}) {
    const double v = quad_moment({daughter::Uniform{}}, 0.0, std::min(1.0, s), 0.5 * s, 0.5 * s);
    EXPECT_LE(v, 2.0 + 1e-12);
    if (s <= 1.0) EXPECT_NEAR(v, 2.0, 1e-12);
  }
}

TEST(DaughterConstants, SingularMomentBound) {
  // (nu+2) / (nu+1-2 alpha) for power_total.
  const auto c = daughter_constants({daughter::PowerTotal{0.0}}, 0.25);
  EXPECT_DOUBLE_EQ(c.beta_minus_2alpha, 4.0);
  for (double x : {1e-3, 0.2, 5.0}) {
    const double y = 0.7;
    EXPECT_LE(moment_integral({daughter::PowerTotal{0.0}}, -0.5, x, y),
              c.beta_minus_2alpha * std::pow(x + y, -0.5) * (1.0 + 1e-14));
  }
}

TEST(DaughterConstants, ThetaAndModulus) {
  const auto c = daughter_constants({daughter::Uniform{}}, 0.0);
  EXPECT_DOUBLE_EQ(c.p, 4.0);
  EXPECT_DOUBLE_EQ(c.theta, 0.25);
  EXPECT_GT(c.omega_coefficient, 0.0);
  const auto s = daughter_constants({daughter::PowerTotal{0.0}}, 0.25);
  EXPECT_GE(s.p, 1.0 / 0.25 + 1.0);
}

TEST(DaughterConstants, PowerEachNeedsBoundedKernel) {
  const auto c = daughter_constants({daughter::PowerEach{0.0}}, 0.25);
  EXPECT_FALSE(c.admissible);
  EXPECT_NE(c.reason.find("power_each requires alpha = 0"), std::string::npos);
  EXPECT_FALSE(daughter_constants({daughter::PowerTotal{-0.6}}, 0.25).admissible);
  EXPECT_TRUE(daughter_constants({daughter::PowerTotal{-0.4}}, 0.25).admissible);
}

TEST(Probability, ValidationAndEvaluation) {
  EXPECT_THROW(validate(ProbSpec{prob::Constant{1.5}}), ConfigError);
  EXPECT_THROW(validate(ProbSpec{prob::Constant{-0.1}}), ConfigError);
  EXPECT_THROW(validate(ProbSpec{prob::SmallVolumeFloor{0.5, 2.0, 1.0}}), ConfigError);
  const ProbSpec floor{prob::SmallVolumeFloor{0.8, 0.2, 1.0}};
  EXPECT_DOUBLE_EQ(eval_E(floor, 0.5, 0.5), 0.8);
  EXPECT_DOUBLE_EQ(eval_E(floor, 0.5, 2.0), 0.2);
  EXPECT_DOUBLE_EQ(min_on_unit_square(floor), 0.8);
  EXPECT_DOUBLE_EQ(min_on_unit_square(ProbSpec{prob::SmallVolumeFloor{0.8, 0.2, 0.5}}), 0.2);
}

TEST(Probability, TableMinimumIsALowerBound) {
  const auto table = std::make_shared<const LogTable2D>(LogTable2D::from_csv(oracle::data("prob_table.csv"), "E"));
  const ProbSpec p{prob::Table{table, "prob_table.csv"}};
  EXPECT_NO_THROW(validate(p));
  const double floor = min_on_unit_square(p);
  for (double x : {1e-3, 0.01, 0.3, 0.99}) {
    for (double y : {1e-3, 0.2, 0.9}) EXPECT_GE(eval_E(p, x, y), floor - 1e-15);
  }
  EXPECT_THROW(eval_E(p, 1e-5, 0.5), DomainError);
}
