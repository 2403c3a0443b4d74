#include "breakcoag/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "breakcoag/errors.hpp"

namespace breakcoag {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::string KernelSpec::name() const {
  return std::visit(overloaded{
                        [](const kernel::Smoluchowski&) { return std::string("smoluchowski"); },
                        [](const kernel::SumProduct& k) {
                          return "sum_product(" + fmt(k.zeta) + ", " + fmt(k.eta) + ")";
                        },
                        [](const kernel::BgRatio& k) {
                          return "bg_ratio(" + fmt(k.sigma) + ", " + fmt(k.eta) + ")";
                        },
                        [](const kernel::Product&) { return std::string("product"); },
                        [](const kernel::Additive&) { return std::string("additive"); },
                        [](const kernel::Constant& k) { return "constant(" + fmt(k.value) + ")"; },
                        [](const kernel::CustomTable& k) { return "custom_table(" + k.source + ")"; },
                    },
                    family);
}

KernelSpec make_kernel(KernelFamily family) {
  KernelSpec spec;
  spec.family = std::move(family);
  std::visit(overloaded{
                 [&](const kernel::Smoluchowski&) {
                   spec.alpha = 1.0 / 3.0;
                   spec.k1 = 4.0;
                   spec.k2 = 2.0;
                   spec.r_exponent = 1.0 / 3.0;
                   spec.r_scale = 4.0;
                 },
                 [&](const kernel::SumProduct& k) {
                   spec.alpha = std::max(-k.zeta, 0.0);
                   spec.k1 = 2.0;
                   if (k.zeta + k.eta <= 1.0) spec.k2 = 2.0;
                   if (k.zeta >= 0.0 && k.zeta + k.eta == 1.0) spec.k0 = 1.0;
                   spec.r_exponent = k.eta;
                   spec.r_scale = 2.0;
                 },
                 [&](const kernel::BgRatio& k) {
                   spec.alpha = k.sigma / 2.0;
                   spec.k1 = std::pow(2.0, 2.0 * k.eta);
                   if (2.0 * k.eta - k.sigma <= 1.0) spec.k2 = spec.k1;
                   spec.r_exponent = (2.0 * k.eta - k.sigma) / 2.0;
                   spec.r_scale = spec.k1;
                 },
                 [&](const kernel::Product&) {
                   spec.alpha = 0.0;
                   spec.k1 = 1.0;
                 },
                 [&](const kernel::Additive&) {
                   spec.alpha = 0.0;
                   spec.k1 = 2.0;
                   spec.k2 = 1.0;
                   spec.k0 = 1.0;
                 },
                 [&](const kernel::Constant& k) {
                   spec.alpha = 0.0;
                   spec.k1 = k.value;
                   spec.k2 = k.value / 2.0;
                   spec.r_exponent = 0.0;
                   spec.r_scale = std::max(1.0, k.value);
                 },
                 [&](const kernel::CustomTable& k) {
                   if (!k.table) throw ConfigError("kernel: custom_table has no table");
                   spec.alpha = 0.0;
                   spec.k1 = std::max(k.table->max_value(), std::numeric_limits<double>::min());
                 },
             },
             spec.family);
  validate(spec);
  return spec;
}

void validate(const KernelSpec& spec) {
  std::visit(overloaded{
                 [](const kernel::SumProduct& k) {
                   if (!(k.zeta <= k.eta && k.eta <= 1.0)) {
                     throw ConfigError("kernel: sum_product requires zeta <= eta <= 1");
                   }
                   if (!(k.zeta > -0.5)) throw ConfigError("kernel: sum_product requires zeta > -1/2");
                 },
                 [](const kernel::BgRatio& k) {
                   if (!(k.sigma >= 0.0 && k.sigma < 1.0)) throw ConfigError("kernel: bg_ratio requires sigma in [0, 1)");
                   if (!(k.eta >= 0.0)) throw ConfigError("kernel: bg_ratio requires eta >= 0");
                 },
                 [](const kernel::Constant& k) {
                   if (!(k.value > 0.0) || !std::isfinite(k.value)) {
                     throw ConfigError("kernel: constant value must be positive");
                   }
                 },
                 [](const kernel::CustomTable& k) {
                   if (!k.table) throw ConfigError("kernel: custom_table has no table");
                   if (k.table->min_value() < 0.0) throw ConfigError("kernel: custom_table has negative entries");
                 },
                 [](const auto&) {},
             },
             spec.family);
  if (!(spec.alpha >= 0.0 && spec.alpha < 0.5)) throw ConfigError("kernel: alpha must lie in [0, 1/2)");
  if (!(spec.k1 > 0.0)) throw ConfigError("kernel: k1 must be positive");
  if (spec.k2 && !(*spec.k2 > 0.0)) throw ConfigError("kernel: k2 must be positive");
  if (spec.k0 && !(*spec.k0 > 0.0)) throw ConfigError("kernel: k0 must be positive");
  if (!(spec.r_scale >= 1.0)) throw ConfigError("kernel: r_scale must be >= 1");
}

double eval_kernel(const KernelSpec& spec, double x, double y) {
  return std::visit(overloaded{
                        [&](const kernel::Smoluchowski&) {
                          const double a = std::cbrt(x), b = std::cbrt(y);
                          return (a + b) * (1.0 / a + 1.0 / b);
                        },
                        [&](const kernel::SumProduct& k) {
                          return std::pow(x, k.zeta) * std::pow(y, k.eta) + std::pow(x, k.eta) * std::pow(y, k.zeta);
                        },
                        [&](const kernel::BgRatio& k) {
                          return std::pow((1.0 + x) * (1.0 + y), k.eta) / std::pow(x + y, k.sigma);
                        },
                        [&](const kernel::Product&) { return x * y; },
                        [&](const kernel::Additive&) { return x + y; },
                        [&](const kernel::Constant& k) { return k.value; },
                        [&](const kernel::CustomTable& k) { return (*k.table)(x, y); },
                    },
                    spec.family);
}

TruncatedKernel::TruncatedKernel(KernelSpec spec, double level, TruncationMode mode)
    : spec_(std::move(spec)), level_(level), mode_(mode) {
  if (!(level_ > 0.0)) throw ConfigError("truncation level must be positive");
}

double TruncatedKernel::operator()(double x, double y) const {
  if (mode_ == TruncationMode::outflow) return eval_kernel(spec_, x, y);
  if (!(x + y < level_)) return 0.0;
  return std::min(level_, eval_kernel(spec_, x, y));
}

TruncatedKernel truncate_kernel(const KernelSpec& spec, double level, TruncationMode mode) {
  return TruncatedKernel(spec, level, mode);
}

namespace {

struct Accumulator {
  GrowthCheck check;

  void add(double value, double bound, double x, double y) {
    const double residual = (value - bound) / bound;
    if (check.evaluated == 0 || residual > check.worst_residual) {
      check.worst_residual = residual;
      check.witness_x = x;
      check.witness_y = y;
    }
    ++check.evaluated;
  }

  GrowthCheck finish(bool declared, double constant, bool extra = true) {
    check.declared = declared;
    check.constant = constant;
    check.satisfied = declared && extra && check.worst_residual <= growth_tolerance;
    return check;
  }
};

}  // namespace

GrowthClass classify_growth(const KernelSpec& spec, const SampleBox& box, std::size_t samples) {
  if (samples < 10000) throw ConfigError("classify_growth: need at least 10^4 samples");
  if (!(box.lo > 0.0 && box.hi > box.lo)) throw ConfigError("classify_growth: invalid sample box");

  SampleBox effective = box;
  if (const auto* t = std::get_if<kernel::CustomTable>(&spec.family)) {
    effective.lo = std::max(box.lo, t->table->lo());
    effective.hi = std::min(box.hi, t->table->hi());
  }

  const auto per_axis = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(samples))));
  std::vector<double> axis(per_axis);
  const double llo = std::log(effective.lo), lhi = std::log(effective.hi);
  for (std::size_t i = 0; i < per_axis; ++i) {
    axis[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(per_axis - 1));
  }
  axis.front() = effective.lo;
  axis.back() = effective.hi;

  const double a = spec.alpha;
  const double r_exp = spec.r_exponent.value_or(0.0);
  auto r = [&](double v) { return spec.r_scale * std::max(1.0, std::pow(v, r_exp)); };

  Accumulator p1, p2, p3, p400;
  for (double x : axis) {
    for (double y : axis) {
      const double k = eval_kernel(spec, x, y);
      const bool xs = x < 1.0, ys = y < 1.0;

      double b1;
      if (xs && ys) b1 = spec.k1 * std::pow(x * y, -a);
      else if (xs) b1 = spec.k1 * std::pow(x, -a) * y;
      else if (ys) b1 = spec.k1 * x * std::pow(y, -a);
      else b1 = spec.k1 * x * y;
      p1.add(k, b1, x, y);

      if (!xs && !ys && spec.k2) p2.add(k, *spec.k2 * (x + y), x, y);

      if (spec.r_exponent && !(xs && ys)) {
        double b3;
        if (xs) b3 = std::pow(x, -a) * r(y);
        else if (ys) b3 = r(x) * std::pow(y, -a);
        else b3 = r(x) * r(y);
        p3.add(k, b3, x, y);
      }

      if (spec.k0) p400.add(k, *spec.k0 * (x + y), x, y);
    }
  }

  GrowthClass out;
  out.alpha = a;
  out.small_volume_bound = p1.finish(true, spec.k1);
  out.linear_growth = p2.finish(spec.k2.has_value(), spec.k2.value_or(0.0), p2.check.evaluated > 0);
  // r(x)/x -> 0 needs a sublinear exponent.
  out.sublinear_majorant = p3.finish(spec.r_exponent.has_value(), r_exp, r_exp < 1.0);
  out.globally_linear = p400.finish(spec.k0.has_value(), spec.k0.value_or(0.0));
  return out;
}

}  // namespace breakcoag
