#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "breakcoag/log_table.hpp"

namespace breakcoag {

namespace kernel {

// (x^{1/3} + y^{1/3}) (x^{-1/3} + y^{-1/3})
struct Smoluchowski {};

// x^zeta y^eta + x^eta y^zeta
struct SumProduct {
  double zeta = 0.0;
  double eta = 1.0;
};

// (1+x)^eta (1+y)^eta / (x+y)^sigma
struct BgRatio {
  double sigma = 0.0;
  double eta = 0.0;
};

struct Product {};

struct Additive {};

struct Constant {
  double value = 1.0;
};

struct CustomTable {
  std::shared_ptr<const LogTable2D> table;
  std::string source;
};

}  // namespace kernel

using KernelFamily = std::variant<kernel::Smoluchowski, kernel::SumProduct, kernel::BgRatio, kernel::Product,
                                  kernel::Additive, kernel::Constant, kernel::CustomTable>;

// A collision kernel together with the growth constants it is claimed to
// satisfy. The constants are inputs; classify_growth verifies them.
struct KernelSpec {
  KernelFamily family;
  // Small-volume bound: K <= k1 (xy)^{-alpha} on (0,1)^2, k1 x^{-alpha} y
  // across, k1 xy on (1,inf)^2.
  double alpha = 0.0;
  double k1 = 1.0;
  // K <= k2 (x+y) on (1,inf)^2.
  std::optional<double> k2;
  // K <= k0 (x+y) everywhere.
  std::optional<double> k0;
  // Majorant r(x) = r_scale * max{1, x^r_exponent} for the sublinear bound.
  std::optional<double> r_exponent;
  double r_scale = 1.0;

  std::string name() const;
};

// Spec with the standard constants for the family. Throws ConfigError on
// out-of-range parameters. A custom table gets alpha = 0, k1 = table max and
// no other constants.
KernelSpec make_kernel(KernelFamily family);

// Throws ConfigError when the family parameters or constants are invalid.
void validate(const KernelSpec& spec);

// Throws DomainError for a custom table queried outside its box.
double eval_kernel(const KernelSpec& spec, double x, double y);

enum class TruncationMode {
  // min{n, K} 1_{x+y<n}: collisions producing x+y >= n are switched off.
  conservative,
  // K itself; coagulation products beyond n leave the system.
  outflow,
};

class TruncatedKernel {
public:
  TruncatedKernel(KernelSpec spec, double level, TruncationMode mode = TruncationMode::conservative);

  double operator()(double x, double y) const;

  const KernelSpec& spec() const noexcept { return spec_; }
  double level() const noexcept { return level_; }
  TruncationMode mode() const noexcept { return mode_; }

private:
  KernelSpec spec_;
  double level_;
  TruncationMode mode_;
};

TruncatedKernel truncate_kernel(const KernelSpec& spec, double level,
                                TruncationMode mode = TruncationMode::conservative);

struct SampleBox {
  double lo = 1e-6;
  double hi = 1e6;
};

struct GrowthCheck {
  bool satisfied = false;
  // False when the spec carries no constant for this bound.
  bool declared = false;
  double constant = 0.0;
  // max (K - bound) / bound over the sample; <= 0 when the bound holds.
  double worst_residual = 0.0;
  double witness_x = 0.0;
  double witness_y = 0.0;
  std::size_t evaluated = 0;
};

struct GrowthClass {
  GrowthCheck small_volume_bound;
  GrowthCheck linear_growth;
  GrowthCheck sublinear_majorant;
  GrowthCheck globally_linear;
  double alpha = 0.0;
};

inline constexpr double growth_tolerance = 1e-12;

// Checks every bound on a deterministic log-uniform tensor sample of about
// `samples` points in box^2. Throws ConfigError if samples < 10^4.
GrowthClass classify_growth(const KernelSpec& spec, const SampleBox& box = {}, std::size_t samples = 40000);

}  // namespace breakcoag
