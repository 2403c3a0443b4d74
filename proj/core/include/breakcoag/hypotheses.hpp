#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "breakcoag/daughter.hpp"
#include "breakcoag/grid.hpp"
#include "breakcoag/kernels.hpp"

namespace breakcoag {

// Lower bound on E over (0,1)^2 that makes coalescence dominate breakage:
// max{0, (beta - 2^{1+2 alpha}) / (beta - 1)}. Throws DomainError for
// beta < 1, for beta = 1 with a positive numerator, or alpha outside [0, 1/2).
double coalescence_threshold(double beta, double alpha);

// Closed forms for the model families.
// power_total(nu), bounded kernel: max{0, -nu}.
double threshold_power_total(double nu);
// power_each(nu), bounded kernel: 2 / (nu + 3).
double threshold_power_each(double nu);
// sum_product(zeta, eta) with zeta in (-1/2, 0) and power_total(nu), nu > -2 zeta - 1.
double threshold_singular(double nu, double zeta);
// bg_ratio(sigma, eta) with sigma in (0, 1) and power_total(nu), nu > sigma - 1.
double threshold_bg_ratio(double nu, double sigma);

// Finite union of disjoint open intervals.
struct TrialSet {
  std::vector<std::pair<double, double>> intervals;

  double measure() const;
};

// Intervals (0, d), translates (a, a+d) and unions of 2 to 4 equal pieces
// inside (0, R) for R in {1, 10} and d in {1e-6, 1e-5, ..., 1}.
std::vector<TrialSet> default_trial_sets();

struct OmegaRow {
  double measure = 0.0;
  // max over sets of this measure and sampled pairs of
  // LHS / ((x+y)^{-alpha} (x^{-theta} + y^{-theta})).
  double max_ratio = 0.0;
  double bound = 0.0;
  double witness_x = 0.0;
  double witness_y = 0.0;
  TrialSet witness_set;
};

struct UniformIntegrabilityReport {
  bool bounded = true;
  // max_ratio non-decreasing in the measure.
  bool decreasing = true;
  // max over rows of max_ratio / bound - 1.
  double worst_residual = 0.0;
  std::vector<OmegaRow> rows;

  bool passed() const { return bounded && decreasing; }
};

// Empirical modulus for the uniform-integrability bound, compared against
// omega_coefficient * |A|^theta. Pairs are a log-uniform tensor sample of
// `per_axis`^2 points in box^2.
UniformIntegrabilityReport verify_uniform_integrability(const DaughterSpec& spec, double alpha, double theta,
                                                        double omega_coefficient,
                                                        const std::vector<TrialSet>& trial_sets,
                                                        const SampleBox& box = {}, std::size_t per_axis = 25);

enum class CheckStatus { pass, fail, not_applicable };

std::string to_string(CheckStatus status);

struct Witness {
  double x = 0.0;
  double y = 0.0;
  std::optional<TrialSet> set;
};

struct HypothesisCheck {
  std::string id;
  CheckStatus status = CheckStatus::not_applicable;
  double worst_residual = 0.0;
  std::optional<Witness> witness;
  std::string detail;
};

namespace check_id {
inline constexpr const char* kernel_small_volume_bound = "kernel_small_volume_bound";
inline constexpr const char* kernel_linear_growth = "kernel_linear_growth";
inline constexpr const char* kernel_sublinear_majorant = "kernel_sublinear_majorant";
inline constexpr const char* kernel_globally_linear = "kernel_globally_linear";
inline constexpr const char* daughter_mass = "daughter_mass";
inline constexpr const char* daughter_moments_bounded = "daughter_moments_bounded";
inline constexpr const char* daughter_uniform_integrability = "daughter_uniform_integrability";
inline constexpr const char* daughter_singular_moment = "daughter_singular_moment";
inline constexpr const char* daughter_partial_moment = "daughter_partial_moment";
inline constexpr const char* daughter_relaxed_moment = "daughter_relaxed_moment";
inline constexpr const char* probability_range = "probability_range";
inline constexpr const char* coalescence_dominance = "coalescence_dominance";
}  // namespace check_id

namespace result_id {
inline constexpr const char* singular_weak = "singular_weak";
inline constexpr const char* singular_mass_conserving = "singular_mass_conserving";
inline constexpr const char* singular_mass_conserving_x2 = "singular_mass_conserving_x2";
inline constexpr const char* bounded_weak = "bounded_weak";
inline constexpr const char* bounded_mass_conserving = "bounded_mass_conserving";
inline constexpr const char* bounded_mass_conserving_x2 = "bounded_mass_conserving_x2";
inline constexpr const char* bounded_relaxed_weak = "bounded_relaxed_weak";
inline constexpr const char* bounded_relaxed_mass_conserving = "bounded_relaxed_mass_conserving";
inline constexpr const char* bounded_relaxed_mass_conserving_x2 = "bounded_relaxed_mass_conserving_x2";
inline constexpr const char* linear_kernel_mass_conserving = "linear_kernel_mass_conserving";
inline constexpr const char* uniqueness = "uniqueness";
}  // namespace result_id

struct HypothesisReport {
  double alpha = 0.0;
  double theta = 0.0;
  double p = 0.0;
  double omega_coefficient = 0.0;
  double beta_0 = 0.0;
  double beta_minus_theta = 0.0;
  double beta_minus_2alpha = 0.0;
  double B_minus_alpha = 0.0;
  double beta_prime = 0.0;
  double E_min = 0.0;
  // Infimum of E over (0,1)^2.
  double E_floor = 0.0;

  // Moment classes of the initial condition.
  bool initial_in_X_minus_2alpha = false;
  bool initial_in_X_minus_theta = false;
  bool initial_in_X_0 = false;
  bool initial_in_X_2 = false;

  GrowthClass growth;
  UniformIntegrabilityReport uniform_integrability;
  std::vector<HypothesisCheck> checks;
  std::vector<std::string> applicable_results;
  std::vector<std::string> notes;

  // Throws std::out_of_range for an unknown id.
  const HypothesisCheck& check(const std::string& id) const;
  bool passed(const std::string& id) const;
  bool applies(const std::string& result) const;
  // Any of the mass-conserving results.
  bool mass_conserving() const;
};

struct CheckOptions {
  SampleBox box;
  std::size_t kernel_samples = 40000;
  // Per-axis count of the (x, y) pair sample for daughter checks.
  std::size_t pair_samples = 60;
  std::size_t omega_pair_samples = 25;
};

HypothesisReport check_scenario(const KernelSpec& kernel, const DaughterSpec& daughter, const ProbSpec& prob,
                                const InitialCondition& initial, const CheckOptions& options = {});

}  // namespace breakcoag
