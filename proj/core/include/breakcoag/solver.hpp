#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "breakcoag/daughter.hpp"
#include "breakcoag/grid.hpp"
#include "breakcoag/kernels.hpp"

namespace breakcoag {

// Two-point placement of a created particle of volume v onto cell centers.
// Number `weight_lo` goes to `cell`, `weight_hi` to `cell + 1`, so that
// weight_lo + weight_hi = 1 and weight_lo c_cell + weight_hi c_{cell+1} = v.
// Above the last center the whole mass v goes to the last cell
// (weight_lo = v / c_{N-1}, weight_hi = 0). `lost` marks volumes beyond the
// grid in outflow mode.
struct CoagTarget {
  std::uint32_t cell = 0;
  double weight_lo = 0.0;
  double weight_hi = 0.0;
  bool lost = false;
};

// Number deposit of at most three entries.
struct Deposit {
  std::uint32_t cell[3] = {0, 0, 0};
  double weight[3] = {0.0, 0.0, 0.0};
  std::uint8_t count = 0;

  void add(std::uint32_t c, double w);
};

struct RhsTotals {
  // Collision rate (pairs per unit time) ending in breakup.
  double breakage_rate = 0.0;
  double coagulation_rate = 0.0;
  // First moment leaving the grid per unit time (outflow mode).
  double outflow_rate = 0.0;
};

struct TableOptions {
  // Truncation level; defaults to the grid's x_max.
  std::optional<double> level;
  TruncationMode mode = TruncationMode::conservative;
};

// Precomputed operator data on one grid. Immutable after construction.
class OperatorTables {
public:
  const Grid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::size_t cells() const noexcept { return cells_; }
  double level() const noexcept { return level_; }
  TruncationMode mode() const noexcept { return mode_; }
  const KernelSpec& kernel() const noexcept { return kernel_; }
  const DaughterSpec& daughter() const noexcept { return daughter_; }
  const ProbSpec& prob() const noexcept { return prob_; }

  double K(std::size_t i, std::size_t j) const { return K_[i * cells_ + j]; }
  double E(std::size_t i, std::size_t j) const { return E_[i * cells_ + j]; }
  const CoagTarget& coag_target(std::size_t i, std::size_t j) const { return coag_[i * cells_ + j]; }

  // Exact number of fragments of a (c_i, c_j) breakup landing in cell k:
  // integral of b(z, c_i, c_j) over (e_k, e_{k+1}).
  double frag_number(std::size_t i, std::size_t j, std::size_t k) const;

  // Per-cell number deposit actually used by the right-hand side for one
  // (c_i, c_j) breakup, after remapping onto cell centers. Conserves the
  // first moment c_i + c_j for products inside the grid.
  std::vector<double> frag_deposit(std::size_t i, std::size_t j) const;

  // max_i sum_j K_ij N_j with N_j = f_j dx_j; the stability scale of the
  // collision loss.
  double loss_rate_bound(const std::vector<double>& numbers) const;

private:
  friend OperatorTables build_tables(GridPtr, const KernelSpec&, const DaughterSpec&, const ProbSpec&,
                                     const TableOptions&);
  friend void apply_rhs_numbers(const OperatorTables&, const std::vector<double>&, std::vector<double>&,
                                RhsTotals*);

  struct Pair {
    std::uint32_t i, j;
    double K, E;
    CoagTarget coag;
    // Fragment source data for s = c_i + c_j (power_total only).
    std::uint32_t top_cell;
    double scale;
    Deposit top;
  };

  // Deposit of fragments below x_min plus the top partial cell for a source
  // of total volume s.
  void source_deposit(double s, std::uint32_t& top_cell, double& scale, Deposit& top) const;
  void remap(double centroid, double number, Deposit& out) const;

  GridPtr grid_;
  std::size_t cells_ = 0;
  double level_ = 0.0;
  TruncationMode mode_ = TruncationMode::conservative;
  KernelSpec kernel_;
  DaughterSpec daughter_;
  ProbSpec prob_;
  double nu_ = 0.0;
  bool each_ = false;

  std::vector<double> K_;
  std::vector<double> E_;
  std::vector<CoagTarget> coag_;
  std::vector<Pair> pairs_;
  // Remapped deposit of one full cell k, per unit s^{-(nu+1)}.
  std::vector<Deposit> full_cell_;
  // Number placed in cell 0 for the fragments below x_min, per unit s^{-(nu+1)}.
  double below_grid_ = 0.0;
  // power_each: per-cell source data for s = c_i.
  std::vector<std::uint32_t> cell_top_;
  std::vector<double> cell_scale_;
  std::vector<Deposit> cell_deposit_;
};

// Throws ConfigError for an invalid level or incompatible daughter/kernel
// pair (power_each with alpha > 0).
OperatorTables build_tables(GridPtr grid, const KernelSpec& kernel, const DaughterSpec& daughter,
                            const ProbSpec& prob, const TableOptions& options = {});

// Rate of change of cell numbers N_i = f_i dx_i.
void apply_rhs_numbers(const OperatorTables& tables, const std::vector<double>& numbers, std::vector<double>& rate,
                       RhsTotals* totals = nullptr);

// Rate of change of the density f per cell.
std::vector<double> apply_rhs(const OperatorTables& tables, const State& state, RhsTotals* totals = nullptr);

enum class Method { rk4, heun_adaptive };

struct StepControl {
  Method method = Method::heun_adaptive;
  // Fixed step for rk4; initial guess for the adaptive method.
  double dt = 1e-3;
  double rtol = 1e-6;
  // Per-cell mass tolerance; negative means 1e-12 times the initial mass.
  double atol = -1.0;
  double dt_min = 1e-12;
  double dt_max = 0.1;
  double t_end = 1.0;
  // Ascending, in (0, t_end]; t_end is always appended.
  std::vector<double> output_times;
  // Clipped negative mass tolerated per accepted step, relative to mass.
  double clip_tolerance = 1e-10;
};

// Throws ConfigError for inconsistent settings.
void validate(const StepControl& control);

// Equally spaced output times every `every` up to t_end.
std::vector<double> uniform_outputs(double t_end, double every);

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
  double clipped_mass = 0.0;
  double max_clipped_fraction = 0.0;
  double min_dt = 0.0;
  double max_dt = 0.0;
};

struct StepResult {
  State state;
  double dt_taken = 0.0;
  // Suggested next step.
  double dt_next = 0.0;
  double clipped_mass = 0.0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

// One accepted step of at most `dt_try`, never passing `t_stop`. Step size is
// reduced until the positivity bound and the clipping tolerance hold (and the
// error estimate, for the adaptive method). Throws IntegrationError when the
// step would fall below dt_min.
StepResult step(const OperatorTables& tables, const State& state, const StepControl& control, double dt_try,
                double t_stop);

struct Trajectory {
  // states[0] is the initial state; then one per output time.
  std::vector<State> states;
  StepStats stats;

  std::vector<double> times() const;
};

Trajectory integrate(const OperatorTables& tables, const State& initial, const StepControl& control);

// Test function sampled at cell centers.
using TestFunction = std::function<double(double)>;

// d/dt sum_q phi(c_q) N_q on the discrete system, i.e. the discrete version of
// (1/2) sum sum zeta_phi K f f.
double weak_form_rate(const OperatorTables& tables, const State& state, const TestFunction& phi);

struct WeakFormInterval {
  double t0 = 0.0;
  double t1 = 0.0;
  double lhs = 0.0;  // change of sum phi f dx
  double rhs = 0.0;  // trapezoid integral of weak_form_rate
  double absolute = 0.0;
  double relative = 0.0;
};

struct WeakFormResidual {
  std::vector<WeakFormInterval> intervals;
  double max_relative = 0.0;
  double max_absolute = 0.0;
};

// Requires at least three states. The relative residual divides by the larger
// side, or by |sum phi f dx| when both sides are below 1e-12 of it.
WeakFormResidual weak_form_residual(const OperatorTables& tables, const Trajectory& trajectory,
                                    const TestFunction& phi);

}  // namespace breakcoag
