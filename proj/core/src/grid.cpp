#include "breakcoag/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "breakcoag/errors.hpp"

namespace breakcoag {

std::optional<std::size_t> Grid::locate(double x) const noexcept {
  if (!(x >= edges_.front()) || !(x < edges_.back())) return std::nullopt;
  auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  return static_cast<std::size_t>(it - edges_.begin()) - 1;
}

GridPtr make_grid(double x_min, double x_max, std::size_t cells) {
  if (!(x_min > 0.0) || !std::isfinite(x_min)) {
    throw ConfigError("grid: x_min must be positive, got " + std::to_string(x_min));
  }
  if (!(x_max > x_min) || !std::isfinite(x_max)) {
    throw ConfigError("grid: x_max must exceed x_min");
  }
  if (cells < 2) throw ConfigError("grid: need at least 2 cells");

  auto grid = std::shared_ptr<Grid>(new Grid());
  const double log_span = std::log(x_max / x_min);
  grid->log_ratio_ = log_span / static_cast<double>(cells);
  grid->ratio_ = std::exp(grid->log_ratio_);
  const double log_min = std::log(x_min);

  grid->edges_.resize(cells + 1);
  grid->edges_.front() = x_min;
  for (std::size_t i = 1; i < cells; ++i) {
    grid->edges_[i] = std::exp(log_min + static_cast<double>(i) * grid->log_ratio_);
  }
  grid->edges_.back() = x_max;

  grid->centers_.resize(cells);
  grid->widths_.resize(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    grid->centers_[i] = std::sqrt(grid->edges_[i] * grid->edges_[i + 1]);
    grid->widths_[i] = grid->edges_[i + 1] - grid->edges_[i];
  }
  return grid;
}

State zero_state(GridPtr grid, double t) {
  State s;
  s.density.assign(grid->cells(), 0.0);
  s.grid = std::move(grid);
  s.time = t;
  return s;
}

void validate(const State& state) {
  if (!state.grid) throw DomainError("state has no grid");
  if (state.density.size() != state.grid->cells()) throw DomainError("state size does not match grid");
  for (double f : state.density) {
    if (!(f >= 0.0) || !std::isfinite(f)) throw DomainError("state density must be finite and non-negative");
  }
}

namespace {

double target_mass(const InitialCondition& ic) { return ic.mass.value_or(1.0); }

// Integral of the un-normalized profile over [a, b].
struct CellIntegral {
  double a, b;

  double operator()(const ic::Exponential& e) const {
    // lambda^2 e^{-lambda x} has unit mass.
    return e.lambda * std::exp(-e.lambda * a) * -std::expm1(-e.lambda * (b - a));
  }

  double operator()(const ic::PowerCutoff& pc) const {
    const double hi = std::min(b, pc.x_cut);
    if (!(hi > a)) return 0.0;
    const double c = (2.0 - pc.p) / std::pow(pc.x_cut, 2.0 - pc.p);
    const double e = 1.0 - pc.p;
    const double log_ratio = std::log(hi / a);
    if (std::abs(e * log_ratio) < 1e-14) return c * log_ratio;
    return c * std::pow(a, e) * std::expm1(e * log_ratio) / e;
  }

  double operator()(const ic::SmearedPointMass& s) const {
    const double scale = std::numbers::sqrt2 * s.width;
    const double za = (a - s.x0) / scale;
    const double zb = (b - s.x0) / scale;
    const double diff = (za > 0.0) ? std::erfc(za) - std::erfc(zb) : std::erf(zb) - std::erf(za);
    return 0.5 * std::sqrt(std::numbers::pi) * scale * diff;
  }

  double operator()(const ic::Tabulated& t) const { return t.profile.integral(a, b); }
};

}  // namespace

bool InitialCondition::has_finite_moment(double m) const {
  return std::visit(
      [m](const auto& fam) -> bool {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, ic::PowerCutoff>) {
          return m - fam.p > -1.0;
        } else if constexpr (std::is_same_v<T, ic::Tabulated>) {
          return true;  // compact support away from 0
        } else {
          return m > -1.0;  // bounded positive density at 0
        }
      },
      family);
}

void validate(const InitialCondition& ic) {
  if (ic.mass && !(*ic.mass > 0.0)) throw ConfigError("initial: mass must be positive");
  std::visit(
      [](const auto& fam) {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, ic::Exponential>) {
          if (!(fam.lambda > 0.0)) throw ConfigError("initial: exponential lambda must be positive");
        } else if constexpr (std::is_same_v<T, ic::PowerCutoff>) {
          if (!(fam.p < 2.0)) throw ConfigError("initial: power_cutoff requires p < 2 (finite mass)");
          if (!(fam.x_cut > 0.0)) throw ConfigError("initial: power_cutoff x_cut must be positive");
        } else if constexpr (std::is_same_v<T, ic::SmearedPointMass>) {
          if (!(fam.x0 > 0.0) || !(fam.width > 0.0)) {
            throw ConfigError("initial: smeared_point_mass needs x0 > 0 and width > 0");
          }
        }
      },
      ic.family);
}

State sample_initial(const InitialCondition& ic, GridPtr grid) {
  validate(ic);
  State state = zero_state(grid, 0.0);
  const auto edges = grid->edges();
  const auto widths = grid->widths();
  for (std::size_t i = 0; i < grid->cells(); ++i) {
    const double cell = std::visit(CellIntegral{edges[i], edges[i + 1]}, ic.family);
    state.density[i] = std::max(cell, 0.0) / widths[i];
  }

  const bool tabulated = std::holds_alternative<ic::Tabulated>(ic.family);
  if (tabulated && !ic.mass) return state;

  const double discrete = mass(state);
  if (!(discrete > 0.0)) {
    throw ConfigError("initial: profile has no mass on the grid; cannot normalize to the configured mass");
  }
  const double scale = target_mass(ic) / discrete;
  for (double& f : state.density) f *= scale;
  return state;
}

double moment(const State& state, double m) {
  const auto c = state.grid->centers();
  const auto dx = state.grid->widths();
  double sum = 0.0;
  if (m == 0.0) {
    for (std::size_t i = 0; i < state.density.size(); ++i) sum += state.density[i] * dx[i];
  } else if (m == 1.0) {
    for (std::size_t i = 0; i < state.density.size(); ++i) sum += c[i] * state.density[i] * dx[i];
  } else {
    for (std::size_t i = 0; i < state.density.size(); ++i) {
      sum += std::pow(c[i], m) * state.density[i] * dx[i];
    }
  }
  return sum;
}

}  // namespace breakcoag
