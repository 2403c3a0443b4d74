#include "breakcoag/daughter.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

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

void require_integrable(double m, double nu) {
  if (!(m > -(nu + 1.0))) {
    throw DomainError("daughter moment of order " + fmt(m) + " diverges: need m > -(nu+1) = " + fmt(-(nu + 1.0)));
  }
}

// (nu+2) / s^{nu+1} * integral of z^{nu+m} over (0, min{u, s}).
double power_piece(double nu, double m, double u, double s) {
  const double e = nu + 1.0 + m;
  const double top = std::min(u, s);
  if (!(top > 0.0)) return 0.0;
  // (nu+2)/e * top^e / s^{nu+1}, written to keep the m = 1, u = s case exact.
  if (top == s) return (nu + 2.0) / e * std::pow(s, m);
  return (nu + 2.0) / e * std::pow(top, e) / std::pow(s, nu + 1.0);
}

}  // namespace

double DaughterSpec::nu() const {
  return std::visit(overloaded{
                        [](const daughter::PowerTotal& d) { return d.nu; },
                        [](const daughter::PowerEach& d) { return d.nu; },
                        [](const daughter::Uniform&) { return 0.0; },
                    },
                    family);
}

std::string DaughterSpec::name() const {
  return std::visit(overloaded{
                        [](const daughter::PowerTotal& d) { return "power_total(" + fmt(d.nu) + ")"; },
                        [](const daughter::PowerEach& d) { return "power_each(" + fmt(d.nu) + ")"; },
                        [](const daughter::Uniform&) { return std::string("uniform"); },
                    },
                    family);
}

void validate(const DaughterSpec& spec) {
  const double nu = spec.nu();
  if (!(nu > -1.0) || !std::isfinite(nu)) {
    throw ConfigError("daughter: nu must be > -1 (got " + fmt(nu) + ")");
  }
}

double eval_b(const DaughterSpec& spec, double z, double x, double y) {
  if (!(z > 0.0)) return 0.0;
  return std::visit(overloaded{
                        [&](const daughter::PowerTotal& d) {
                          const double s = x + y;
                          if (z >= s) return 0.0;
                          return (d.nu + 2.0) * std::pow(z, d.nu) / std::pow(s, d.nu + 1.0);
                        },
                        [&](const daughter::PowerEach& d) {
                          double v = 0.0;
                          if (z < x) v += (d.nu + 2.0) * std::pow(z, d.nu) / std::pow(x, d.nu + 1.0);
                          if (z < y) v += (d.nu + 2.0) * std::pow(z, d.nu) / std::pow(y, d.nu + 1.0);
                          return v;
                        },
                        [&](const daughter::Uniform&) { return z < x + y ? 2.0 / (x + y) : 0.0; },
                    },
                    spec.family);
}

double moment_integral(const DaughterSpec& spec, double m, double x, double y) {
  return partial_moment_integral(spec, m, x + y, x, y);
}

double partial_moment_integral(const DaughterSpec& spec, double m, double upper, double x, double y) {
  require_integrable(m, spec.nu());
  const double s = x + y;
  const double u = std::min(upper, s);
  if (!(u > 0.0)) return 0.0;
  return std::visit(overloaded{
                        [&](const daughter::PowerTotal& d) { return power_piece(d.nu, m, u, s); },
                        [&](const daughter::PowerEach& d) {
                          return power_piece(d.nu, m, u, x) + power_piece(d.nu, m, u, y);
                        },
                        [&](const daughter::Uniform&) {
                          if (u == s) return 2.0 * std::pow(s, m) / (m + 1.0);
                          return 2.0 * std::pow(u, m + 1.0) / ((m + 1.0) * s);
                        },
                    },
                    spec.family);
}

DaughterConstants daughter_constants(const DaughterSpec& spec, double alpha) {
  DaughterConstants c;
  c.alpha = alpha;
  const double nu = spec.nu();
  const bool each = std::holds_alternative<daughter::PowerEach>(spec.family);

  if (each && alpha > 0.0) {
    c.admissible = false;
    c.reason = "power_each requires alpha = 0";
  }
  if (!(nu > 2.0 * alpha - 1.0)) {
    c.admissible = false;
    c.reason = "need nu > 2 alpha - 1 (nu = " + fmt(nu) + ", alpha = " + fmt(alpha) + ")";
  }

  const double shifted = nu + 1.0 - alpha;
  double lower = 0.0;
  if (alpha > 0.0) {
    lower = std::max(1.0 / alpha, shifted > 0.0 ? 1.0 / shifted : 0.0);
  } else {
    lower = 1.0 / (nu + 1.0);
  }
  // Smallest admissible integer strictly above the bound, plus 2.
  c.p = std::max(std::floor(lower) + 1.0, 2.0) + 2.0;
  c.theta = 1.0 / c.p;
  if (shifted > 0.0) {
    c.omega_coefficient =
        (nu + 2.0) * std::pow((c.p - 1.0) / (c.p * shifted - 1.0), (c.p - 1.0) / c.p);
  }

  const double factor = each ? 2.0 : 1.0;
  c.beta_0 = factor * (nu + 2.0) / (nu + 1.0);
  c.beta_minus_theta = factor * (nu + 2.0) / (nu + 1.0 - c.theta);
  c.beta_minus_2alpha = alpha > 0.0 ? (nu + 2.0) / (nu + 1.0 - 2.0 * alpha) : c.beta_0;
  c.B_minus_alpha = factor * (nu + 2.0) / shifted;
  c.beta_prime = 2.0 * (nu + 2.0) / (nu + 1.0 - c.theta);
  return c;
}

std::string ProbSpec::name() const {
  return std::visit(overloaded{
                        [](const prob::Constant& e) { return "constant(" + fmt(e.value) + ")"; },
                        [](const prob::SmallVolumeFloor& e) {
                          return "small_volume_floor(" + fmt(e.small) + ", " + fmt(e.large) + ", " + fmt(e.cut) + ")";
                        },
                        [](const prob::Table& e) { return "table(" + e.source + ")"; },
                    },
                    form);
}

void validate(const ProbSpec& spec) {
  auto in_unit = [](double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string("prob: ") + what + " must lie in [0, 1], got " + fmt(v));
  };
  std::visit(overloaded{
                 [&](const prob::Constant& e) { in_unit(e.value, "value"); },
                 [&](const prob::SmallVolumeFloor& e) {
                   in_unit(e.small, "small");
                   in_unit(e.large, "large");
                   if (!(e.cut > 0.0)) throw ConfigError("prob: cut must be positive");
                 },
                 [&](const prob::Table& e) {
                   if (!e.table) throw ConfigError("prob: table missing");
                   in_unit(e.table->min_value(), "table minimum");
                   in_unit(e.table->max_value(), "table maximum");
                 },
             },
             spec.form);
}

double eval_E(const ProbSpec& spec, double x, double y) {
  return std::visit(overloaded{
                        [](const prob::Constant& e) { return e.value; },
                        [&](const prob::SmallVolumeFloor& e) { return (x < e.cut && y < e.cut) ? e.small : e.large; },
                        [&](const prob::Table& e) { return (*e.table)(x, y); },
                    },
                    spec.form);
}

double min_on_unit_square(const ProbSpec& spec) {
  return std::visit(overloaded{
                        [](const prob::Constant& e) { return e.value; },
                        [](const prob::SmallVolumeFloor& e) { return e.cut >= 1.0 ? e.small : std::min(e.small, e.large); },
                        [](const prob::Table& e) { return e.table->min_below(1.0); },
                    },
                    spec.form);
}

}  // namespace breakcoag
