#include <gtest/gtest.h>

#include <cmath>

#include "breakcoag/errors.hpp"
#include "breakcoag/kernels.hpp"
#include "oracles.hpp"

using namespace breakcoag;

TEST(Kernels, ClosedForms) {
  EXPECT_DOUBLE_EQ(eval_kernel(make_kernel(kernel::Product{}), 2.0, 3.0), 6.0);
  EXPECT_DOUBLE_EQ(eval_kernel(make_kernel(kernel::Additive{}), 2.0, 3.0), 5.0);
  EXPECT_DOUBLE_EQ(eval_kernel(make_kernel(kernel::Constant{2.5}), 2.0, 3.0), 2.5);
  EXPECT_NEAR(eval_kernel(make_kernel(kernel::Smoluchowski{}), 1.0, 8.0), 3.0 * 1.5, 1e-14);
  EXPECT_NEAR(eval_kernel(make_kernel(kernel::SumProduct{-0.25, 0.5}), 16.0, 4.0), 0.5 * 2.0 + 4.0 * std::pow(4.0, -0.25),
              1e-13);
  EXPECT_NEAR(eval_kernel(make_kernel(kernel::BgRatio{0.5, 1.0}), 1.0, 3.0), 8.0 / 2.0, 1e-13);
}

TEST(Kernels, Symmetric) {
  for (const KernelFamily& f : {KernelFamily{kernel::Smoluchowski{}}, KernelFamily{kernel::SumProduct{-0.3, 0.7}},
                                KernelFamily{kernel::BgRatio{0.4, 0.6}}}) {
    const auto k = make_kernel(f);
    for (double x : {1e-3, 0.7, 40.0}) {
      for (double y : {2e-2, 3.0, 900.0}) EXPECT_NEAR(eval_kernel(k, x, y), eval_kernel(k, y, x), 1e-13 * eval_kernel(k, x, y));
    }
  }
}

TEST(Kernels, ParameterValidation) {
  EXPECT_THROW(make_kernel(kernel::SumProduct{-0.6, 0.5}), ConfigError);
  EXPECT_THROW(make_kernel(kernel::SumProduct{0.5, 1.5}), ConfigError);
  EXPECT_THROW(make_kernel(kernel::SumProduct{0.8, 0.5}), ConfigError);
  EXPECT_THROW(make_kernel(kernel::BgRatio{1.0, 0.5}), ConfigError);
  EXPECT_THROW(make_kernel(kernel::Constant{0.0}), ConfigError);
  KernelSpec k = make_kernel(kernel::Constant{1.0});
  k.alpha = 0.5;
  EXPECT_THROW(validate(k), ConfigError);
}

TEST(Kernels, DefaultConstants) {
  const auto s = make_kernel(kernel::SumProduct{-0.25, 0.5});
  EXPECT_DOUBLE_EQ(s.alpha, 0.25);
  EXPECT_DOUBLE_EQ(s.k1, 2.0);
  ASSERT_TRUE(s.k2);
  EXPECT_FALSE(s.k0);
  const auto b = make_kernel(kernel::BgRatio{0.5, 0.5});
  EXPECT_DOUBLE_EQ(b.alpha, 0.25);
  EXPECT_DOUBLE_EQ(b.k1, 2.0);
  EXPECT_FALSE(make_kernel(kernel::Product{}).k2);
  EXPECT_TRUE(make_kernel(kernel::Additive{}).k0);
}

namespace {

GrowthClass classify(const KernelFamily& f) { return classify_growth(make_kernel(f)); }

}  // namespace

TEST(GrowthClassification, StandardFamiliesSatisfyTheirBounds) {
  for (const KernelFamily& f :
       {KernelFamily{kernel::Smoluchowski{}}, KernelFamily{kernel::SumProduct{0.0, 1.0}},
        KernelFamily{kernel::SumProduct{-0.25, 0.5}}, KernelFamily{kernel::BgRatio{0.5, 0.5}},
        KernelFamily{kernel::Constant{3.0}}, KernelFamily{kernel::Additive{}}}) {
    const auto g = classify(f);
    EXPECT_TRUE(g.small_volume_bound.satisfied) << make_kernel(f).name();
    EXPECT_TRUE(g.linear_growth.satisfied) << make_kernel(f).name();
    EXPECT_LE(g.small_volume_bound.worst_residual, growth_tolerance);
  }
}

TEST(GrowthClassification, ProductKernelIsNotLinear) {
  const auto g = classify(kernel::Product{});
  EXPECT_TRUE(g.small_volume_bound.satisfied);
  EXPECT_FALSE(g.linear_growth.satisfied);
  EXPECT_FALSE(g.linear_growth.declared);
  EXPECT_FALSE(g.globally_linear.satisfied);
}

TEST(GrowthClassification, SublinearMajorantNeedsExponentBelowOne) {
  EXPECT_TRUE(classify(kernel::SumProduct{-0.25, 0.5}).sublinear_majorant.satisfied);
  EXPECT_TRUE(classify(kernel::Smoluchowski{}).sublinear_majorant.satisfied);
  EXPECT_FALSE(classify(kernel::SumProduct{0.0, 1.0}).sublinear_majorant.satisfied);
}

TEST(GrowthClassification, GloballyLinear) {
  EXPECT_TRUE(classify(kernel::Additive{}).globally_linear.satisfied);
  EXPECT_TRUE(classify(kernel::SumProduct{0.0, 1.0}).globally_linear.satisfied);
  EXPECT_FALSE(classify(kernel::Constant{1.0}).globally_linear.satisfied);
}

TEST(GrowthClassification, UndersizedConstantFailsWithWitness) {
  KernelSpec k = make_kernel(kernel::Additive{});
  k.k2 = 0.5;
  const auto g = classify_growth(k);
  EXPECT_FALSE(g.linear_growth.satisfied);
  EXPECT_NEAR(g.linear_growth.worst_residual, 1.0, 1e-12);
  EXPECT_GE(g.linear_growth.witness_x, 1.0);
  EXPECT_GE(g.linear_growth.witness_y, 1.0);
  EXPECT_NEAR(eval_kernel(k, g.linear_growth.witness_x, g.linear_growth.witness_y),
              2.0 * 0.5 * (g.linear_growth.witness_x + g.linear_growth.witness_y), 1e-9);
}

TEST(GrowthClassification, TooFewSamples) {
  EXPECT_THROW(classify_growth(make_kernel(kernel::Product{}), {}, 100), ConfigError);
}

TEST(Truncation, ConservativeSwitchesOffLargePairs) {
  const auto k = truncate_kernel(make_kernel(kernel::Product{}), 100.0);
  EXPECT_DOUBLE_EQ(k(2.0, 3.0), 6.0);
  EXPECT_DOUBLE_EQ(k(40.0, 50.0), 100.0);
  EXPECT_EQ(k(60.0, 50.0), 0.0);
  EXPECT_EQ(k(99.0, 1.0), 0.0);
}

TEST(Truncation, OutflowKeepsTheKernel) {
  const auto k = truncate_kernel(make_kernel(kernel::Product{}), 100.0, TruncationMode::outflow);
  EXPECT_DOUBLE_EQ(k(60.0, 50.0), 3000.0);
}

TEST(CustomTable, InterpolatesExactlyAtNodesAndLinearInLog) {
  const auto table = std::make_shared<const LogTable2D>(LogTable2D::from_csv(oracle::data("kernel_sum.csv"), "K"));
  const auto k = make_kernel(kernel::CustomTable{table, "kernel_sum.csv"});
  EXPECT_NEAR(eval_kernel(k, 1.0, 10.0), 11.0, 1e-12);
  EXPECT_NEAR(eval_kernel(k, 0.1, 0.1), 0.2, 1e-13);
  // Cell centre in log coordinates: mean of the four corner values.
  const double q = std::pow(10.0, 0.25);
  const double mid = std::sqrt(q);
  EXPECT_NEAR(eval_kernel(k, mid, mid), 0.25 * (2.0 + 2.0 * (1.0 + q) + 2.0 * q), 1e-12);
  EXPECT_THROW(eval_kernel(k, 1e-5, 1.0), DomainError);
  EXPECT_THROW(eval_kernel(k, 1.0, 1e5), DomainError);
}

TEST(CustomTable, GrowthUsesTheTableBox) {
  const auto table = std::make_shared<const LogTable2D>(LogTable2D::from_csv(oracle::data("kernel_sum.csv"), "K"));
  KernelSpec k = make_kernel(kernel::CustomTable{table, "kernel_sum.csv"});
  k.k2 = 1.1;
  const auto g = classify_growth(k);
  EXPECT_TRUE(g.small_volume_bound.satisfied);
  EXPECT_TRUE(g.linear_growth.satisfied);
}

TEST(CustomTable, RaggedOrMissingColumnIsDataError) {
  EXPECT_THROW(LogTable2D::from_csv(oracle::data("kernel_ragged.csv"), "K"), DataError);
  EXPECT_THROW(LogTable2D::from_csv(oracle::data("kernel_sum.csv"), "Q"), DataError);
}
