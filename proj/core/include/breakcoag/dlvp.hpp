#pragma once

#include <cstdint>
#include <vector>

#include "breakcoag/profile.hpp"

namespace breakcoag {

// Convex weight built from an integrable profile h:
//   Phi(x) = x Phi0(1/x) + 2/theta,
// with Phi0' piecewise linear on the breakpoints 0 < j_1 < j_2 < ...
struct PhiConstruction {
  std::vector<std::int64_t> j;  // j[0] = 1
  double theta = 0.5;
  // Linear extrapolation of Phi0' beyond the last breakpoint.
  bool extrapolate = false;
  // Phi0 and Phi0' at the piece starts 0, j_1, ..., j_M.
  std::vector<double> start;
  std::vector<double> value;
  std::vector<double> slope_start;
  std::vector<double> curvature;  // Phi0'' on each piece

  double last_breakpoint() const { return static_cast<double>(j.back()); }
};

// Minimal integers j_0 = 1 < j_1 < ... < j_max_m with
//   j_{m+1} >= max{2 j_m, ceil(e^{m+1})},   int_0^{1/j_m} h <= 1/m^2.
// A profile without a tail model gets one fitted to its first two points.
// Throws ConfigError for max_m < 2 and DataError when h is not integrable
// at 0 at the tabulated resolution.
std::vector<std::int64_t> build_j_sequence(const TabulatedProfile& h, int max_m = 25);

// Throws ConfigError unless 0 < theta < 1 and the sequence is admissible.
PhiConstruction make_phi(std::vector<std::int64_t> j, double theta);
PhiConstruction build_phi(const TabulatedProfile& h, double theta, int max_m = 25);

struct Phi0Value {
  double value = 0.0;
  double derivative = 0.0;
};

// Throws DomainError for xi < 0, or xi past the last breakpoint when
// extrapolation is off.
Phi0Value eval_phi0(const PhiConstruction& pc, double xi);
// Phi0'' (right derivative at breakpoints).
double eval_phi0_curvature(const PhiConstruction& pc, double xi);
// Throws DomainError for x <= 0.
double eval_phi(const PhiConstruction& pc, double x);

struct DlvpReport {
  // (i) int Phi h, at the base and doubled quadrature resolution
  double integral = 0.0;
  double integral_refined = 0.0;
  bool integrable = false;
  // (ii)
  bool nonincreasing = false;
  bool convex = false;
  // (iii) x^theta Phi(x)
  double min_theta_slope = 0.0;
  double theta_limit_ratio = 0.0;  // value at 1/j_M over value at 1
  bool theta_monotone = false;
  // (iv) worst margins of
  //   theta Phi0' - xi Phi0'' - 2(theta - 1) on piece interiors,
  //   (1 + theta) Phi0 - xi Phi0' - 2(theta - 1) xi.
  double first_piece_value = 0.0;  // (theta - 1) j_1 / (j_1 - 1)
  double first_piece_bound = 0.0;  // 2 (theta - 1)
  double min_curvature_margin = 0.0;
  double min_integrated_margin = 0.0;
  bool inequalities = false;

  bool passed() const { return integrable && nonincreasing && convex && theta_monotone && inequalities; }
};

DlvpReport verify_dlvp(const PhiConstruction& pc, const TabulatedProfile& h, int samples = 1000);

}  // namespace breakcoag
