#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "breakcoag/profile.hpp"

namespace breakcoag {

// Geometric mesh on (x_min, x_max). x_max plays the role of the truncation
// level; x_min is a numerical cutoff for densities and kernels that are
// singular at 0.
class Grid {
public:
  double x_min() const noexcept { return edges_.front(); }
  double x_max() const noexcept { return edges_.back(); }
  std::size_t cells() const noexcept { return centers_.size(); }
  // Constant ratio e_{i+1} / e_i.
  double ratio() const noexcept { return ratio_; }
  double log_ratio() const noexcept { return log_ratio_; }

  std::span<const double> edges() const noexcept { return edges_; }
  // Geometric midpoints sqrt(e_i e_{i+1}).
  std::span<const double> centers() const noexcept { return centers_; }
  std::span<const double> widths() const noexcept { return widths_; }

  // Index of the cell with e_i <= x < e_{i+1}; nullopt outside [x_min, x_max).
  std::optional<std::size_t> locate(double x) const noexcept;

private:
  friend std::shared_ptr<const Grid> make_grid(double, double, std::size_t);
  Grid() = default;

  double ratio_ = 1.0;
  double log_ratio_ = 0.0;
  std::vector<double> edges_;
  std::vector<double> centers_;
  std::vector<double> widths_;
};

using GridPtr = std::shared_ptr<const Grid>;

// Throws ConfigError for x_min <= 0, x_min >= x_max, or cells < 2.
GridPtr make_grid(double x_min, double x_max, std::size_t cells);

// Cell-averaged number density on a grid at one instant.
struct State {
  GridPtr grid;
  std::vector<double> density;
  double time = 0.0;

  std::size_t size() const noexcept { return density.size(); }
};

// Zero density on `grid` at time `t`.
State zero_state(GridPtr grid, double t = 0.0);

// Throws DomainError if the density has the wrong size or a negative or
// non-finite entry.
void validate(const State& state);

namespace ic {

// lambda e^{-lambda x}, scaled to the configured mass.
struct Exponential {
  double lambda = 1.0;
};

// C x^{-p} on (0, x_cut), C fixed by the configured mass. Requires p < 2.
struct PowerCutoff {
  double p = 0.5;
  double x_cut = 1.0;
};

// Gaussian bump exp(-(x - x0)^2 / (2 w^2)) restricted to x > 0.
struct SmearedPointMass {
  double x0 = 1.0;
  double width = 0.1;
};

struct Tabulated {
  TabulatedProfile profile;
};

}  // namespace ic

struct InitialCondition {
  std::variant<ic::Exponential, ic::PowerCutoff, ic::SmearedPointMass, ic::Tabulated> family;
  // First moment of the sampled state. Defaults to 1 for the closed-form
  // families; a tabulated profile keeps its own mass when unset.
  std::optional<double> mass;

  // Whether the continuous profile has a finite moment of order m.
  bool has_finite_moment(double m) const;
};

// Throws ConfigError when the family parameters are out of range.
void validate(const InitialCondition& ic);

// Cell averages of the initial profile, rescaled so that the discrete first
// moment equals the configured mass. time = 0.
State sample_initial(const InitialCondition& ic, GridPtr grid);

// Midpoint rule on the cell-averaged representation: sum_i c_i^m f_i dx_i.
double moment(const State& state, double m);

// First moment; the total mass used everywhere else.
inline double mass(const State& state) { return moment(state, 1.0); }

}  // namespace breakcoag
