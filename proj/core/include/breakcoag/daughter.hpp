#pragma once

#include <memory>
#include <string>
#include <variant>

#include "breakcoag/log_table.hpp"

namespace breakcoag {

namespace daughter {

// (nu+2) z^nu / (x+y)^{nu+1} on (0, x+y)
struct PowerTotal {
  double nu = 0.0;
};

// (nu+2) z^nu / x^{nu+1} on (0, x) plus the same term in y
struct PowerEach {
  double nu = 0.0;
};

// 2 / (x+y) on (0, x+y)
struct Uniform {};

}  // namespace daughter

struct DaughterSpec {
  std::variant<daughter::PowerTotal, daughter::PowerEach, daughter::Uniform> family;

  // Exponent of the fragment density; 0 for the uniform family.
  double nu() const;
  std::string name() const;
};

// Throws ConfigError unless nu > -1 (fragment number finite).
void validate(const DaughterSpec& spec);

double eval_b(const DaughterSpec& spec, double z, double x, double y);

// Integral of z^m b(z,x,y) over (0, x+y). Throws DomainError when
// m <= -(nu+1).
double moment_integral(const DaughterSpec& spec, double m, double x, double y);

// Integral of z^m b(z,x,y) over (0, upper); upper is clamped to x+y.
double partial_moment_integral(const DaughterSpec& spec, double m, double upper, double x, double y);

// Constants of the daughter distribution that enter the existence and
// uniqueness hypotheses, for a kernel singularity exponent alpha.
struct DaughterConstants {
  double alpha = 0.0;
  // Integrability exponent of the uniform-integrability modulus; theta = 1/p.
  double p = 0.0;
  double theta = 0.0;
  // omega(xi) = omega_coefficient * xi^theta
  double omega_coefficient = 0.0;
  // Bound on the fragment number.
  double beta_0 = 0.0;
  // Bound on the z^{-theta} moment, against (x^{-theta} + y^{-theta}) / 2.
  double beta_minus_theta = 0.0;
  // Bound on the z^{-2 alpha} moment against (x+y)^{-2 alpha}; beta_0 when
  // alpha = 0.
  double beta_minus_2alpha = 0.0;
  // Bound on the z^{-alpha} moment over (0, min{1, x+y}).
  double B_minus_alpha = 0.0;
  // Relaxed z^{-theta} bound, against (x+y)^{-theta} / 2 (per fragment
  // source for the power_each family).
  double beta_prime = 0.0;
  // False when the family does not fit the analysis for this alpha.
  bool admissible = true;
  std::string reason;
};

DaughterConstants daughter_constants(const DaughterSpec& spec, double alpha);

namespace prob {

struct Constant {
  double value = 1.0;
};

// `small` on (0, cut)^2, `large` elsewhere.
struct SmallVolumeFloor {
  double small = 1.0;
  double large = 1.0;
  double cut = 1.0;
};

struct Table {
  std::shared_ptr<const LogTable2D> table;
  std::string source;
};

}  // namespace prob

struct ProbSpec {
  std::variant<prob::Constant, prob::SmallVolumeFloor, prob::Table> form;

  std::string name() const;
};

// Throws ConfigError for values outside [0, 1].
void validate(const ProbSpec& spec);

// Throws DomainError on a table miss.
double eval_E(const ProbSpec& spec, double x, double y);

// Infimum of E over (0,1)^2 (a lower bound for tables).
double min_on_unit_square(const ProbSpec& spec);

}  // namespace breakcoag
