#include "breakcoag/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "breakcoag/errors.hpp"

namespace breakcoag {

void Deposit::add(std::uint32_t c, double w) {
  if (w == 0.0) return;
  for (std::uint8_t k = 0; k < count; ++k) {
    if (cell[k] == c) {
      weight[k] += w;
      return;
    }
  }
  cell[count] = c;
  weight[count] = w;
  ++count;
}

namespace {

// a^p ((b/a)^p - 1), accurate when b/a is close to 1.
double power_difference(double a, double b, double p) {
  return std::pow(a, p) * std::expm1(p * std::log(b / a));
}

CoagTarget place(const Grid& grid, double v, TruncationMode mode) {
  const auto c = grid.centers();
  const std::size_t n = c.size();
  CoagTarget t;
  if (v >= grid.x_max() && mode == TruncationMode::outflow) {
    t.lost = true;
    return t;
  }
  if (v >= c[n - 1]) {
    t.cell = static_cast<std::uint32_t>(n - 1);
    t.weight_lo = v / c[n - 1];
    return t;
  }
  if (v <= c[0]) {
    t.cell = 0;
    t.weight_lo = v / c[0];
    return t;
  }
  const auto q = static_cast<std::size_t>(std::upper_bound(c.begin(), c.end(), v) - c.begin()) - 1;
  const double w_hi = (v - c[q]) / (c[q + 1] - c[q]);
  t.cell = static_cast<std::uint32_t>(q);
  t.weight_lo = 1.0 - w_hi;
  t.weight_hi = w_hi;
  return t;
}

}  // namespace

void OperatorTables::remap(double centroid, double number, Deposit& out) const {
  if (!(number > 0.0)) return;
  const auto c = grid_->centers();
  const std::size_t n = c.size();
  if (centroid <= c[0]) {
    out.add(0, number * centroid / c[0]);
    return;
  }
  if (centroid >= c[n - 1]) {
    out.add(static_cast<std::uint32_t>(n - 1), number * centroid / c[n - 1]);
    return;
  }
  const auto q = static_cast<std::size_t>(std::upper_bound(c.begin(), c.end(), centroid) - c.begin()) - 1;
  const double w_hi = (centroid - c[q]) / (c[q + 1] - c[q]);
  out.add(static_cast<std::uint32_t>(q), number * (1.0 - w_hi));
  out.add(static_cast<std::uint32_t>(q + 1), number * w_hi);
}

void OperatorTables::source_deposit(double s, std::uint32_t& top_cell, double& scale, Deposit& top) const {
  scale = std::pow(s, -(nu_ + 1.0));
  top = Deposit{};
  if (s >= grid_->x_max()) {
    top_cell = static_cast<std::uint32_t>(cells_);
    return;
  }
  const auto kt = grid_->locate(s).value_or(0);
  top_cell = static_cast<std::uint32_t>(kt);
  const double a = grid_->edges()[kt];
  if (!(s > a)) return;
  const double log_ratio = std::log(a / s);
  const double number = (nu_ + 2.0) / (nu_ + 1.0) * -std::expm1((nu_ + 1.0) * log_ratio);
  const double mass = s * -std::expm1((nu_ + 2.0) * log_ratio);
  remap(mass / number, number, top);
}

OperatorTables build_tables(GridPtr grid, const KernelSpec& kernel, const DaughterSpec& daughter,
                            const ProbSpec& prob, const TableOptions& options) {
  if (!grid) throw ConfigError("build_tables: no grid");
  validate(kernel);
  validate(daughter);
  validate(prob);
  const bool each = std::holds_alternative<daughter::PowerEach>(daughter.family);
  if (each && kernel.alpha > 0.0) {
    throw ConfigError("power_each requires alpha = 0 (kernel " + kernel.name() + " has alpha = " +
                      std::to_string(kernel.alpha) + ")");
  }
  const double level = options.level.value_or(grid->x_max());
  if (!(level > 0.0) || level > grid->x_max() * (1.0 + 1e-12)) {
    throw ConfigError("truncation level must lie in (0, x_max]");
  }

  OperatorTables t;
  t.grid_ = grid;
  t.cells_ = grid->cells();
  t.level_ = level;
  t.mode_ = options.mode;
  t.kernel_ = kernel;
  t.daughter_ = daughter;
  t.prob_ = prob;
  t.nu_ = daughter.nu();
  t.each_ = each;

  const std::size_t n = t.cells_;
  const auto c = grid->centers();
  const auto e = grid->edges();
  const TruncatedKernel kn(kernel, level, options.mode);

  t.K_.resize(n * n);
  t.E_.resize(n * n);
  t.coag_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double k = kn(c[i], c[j]);
      const double ep = eval_E(prob, c[i], c[j]);
      const CoagTarget target = place(*grid, c[i] + c[j], options.mode);
      t.K_[i * n + j] = t.K_[j * n + i] = k;
      t.E_[i * n + j] = t.E_[j * n + i] = ep;
      t.coag_[i * n + j] = t.coag_[j * n + i] = target;
    }
  }

  const double nu = t.nu_;
  t.full_cell_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double number = (nu + 2.0) / (nu + 1.0) * power_difference(e[k], e[k + 1], nu + 1.0);
    const double mass = power_difference(e[k], e[k + 1], nu + 2.0);
    t.remap(mass / number, number, t.full_cell_[k]);
  }
  t.below_grid_ = std::pow(e[0], nu + 2.0) / c[0];

  if (each) {
    t.cell_top_.resize(n);
    t.cell_scale_.resize(n);
    t.cell_deposit_.resize(n);
    for (std::size_t i = 0; i < n; ++i) t.source_deposit(c[i], t.cell_top_[i], t.cell_scale_[i], t.cell_deposit_[i]);
  }

  t.pairs_.reserve(n * (n + 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double k = t.K_[i * n + j];
      if (!(k > 0.0)) continue;
      OperatorTables::Pair p{};
      p.i = static_cast<std::uint32_t>(i);
      p.j = static_cast<std::uint32_t>(j);
      p.K = k;
      p.E = t.E_[i * n + j];
      p.coag = t.coag_[i * n + j];
      if (!each && p.E < 1.0) t.source_deposit(c[i] + c[j], p.top_cell, p.scale, p.top);
      t.pairs_.push_back(p);
    }
  }
  return t;
}

double OperatorTables::frag_number(std::size_t i, std::size_t j, std::size_t k) const {
  const auto c = grid_->centers();
  const auto e = grid_->edges();
  return partial_moment_integral(daughter_, 0.0, e[k + 1], c[i], c[j]) -
         partial_moment_integral(daughter_, 0.0, e[k], c[i], c[j]);
}

std::vector<double> OperatorTables::frag_deposit(std::size_t i, std::size_t j) const {
  std::vector<double> out(cells_, 0.0);
  const auto c = grid_->centers();
  auto add_source = [&](double s) {
    std::uint32_t top_cell = 0;
    double scale = 0.0;
    Deposit top;
    source_deposit(s, top_cell, scale, top);
    for (std::size_t k = 0; k < top_cell; ++k) {
      const auto& d = full_cell_[k];
      for (std::uint8_t q = 0; q < d.count; ++q) out[d.cell[q]] += scale * d.weight[q];
    }
    out[0] += scale * below_grid_;
    for (std::uint8_t q = 0; q < top.count; ++q) out[top.cell[q]] += top.weight[q];
  };
  if (each_) {
    add_source(c[i]);
    add_source(c[j]);
  } else {
    add_source(c[i] + c[j]);
  }
  return out;
}

double OperatorTables::loss_rate_bound(const std::vector<double>& numbers) const {
  double worst = 0.0;
  for (std::size_t i = 0; i < cells_; ++i) {
    const double* row = &K_[i * cells_];
    double sum = 0.0;
    for (std::size_t j = 0; j < cells_; ++j) sum += row[j] * numbers[j];
    worst = std::max(worst, sum);
  }
  return worst;
}

void apply_rhs_numbers(const OperatorTables& t, const std::vector<double>& numbers, std::vector<double>& rate,
                       RhsTotals* totals) {
  const std::size_t n = t.cells_;
  rate.assign(n, 0.0);
  std::vector<double> top_weight(n + 1, 0.0);
  std::vector<double> source(t.each_ ? n : 0, 0.0);
  double below = 0.0;
  double breakage = 0.0, coagulation = 0.0, outflow = 0.0;
  const auto c = t.grid_->centers();

  for (const auto& p : t.pairs_) {
    const double ni = numbers[p.i];
    const double nj = numbers[p.j];
    if (ni == 0.0 || nj == 0.0) continue;
    double r = p.K * ni * nj;
    if (p.i == p.j) {
      r *= 0.5;
      rate[p.i] -= 2.0 * r;
    } else {
      rate[p.i] -= r;
      rate[p.j] -= r;
    }

    const double rc = p.E * r;
    if (rc > 0.0) {
      coagulation += rc;
      if (p.coag.lost) {
        outflow += rc * (c[p.i] + c[p.j]);
      } else {
        rate[p.coag.cell] += rc * p.coag.weight_lo;
        if (p.coag.weight_hi != 0.0) rate[p.coag.cell + 1] += rc * p.coag.weight_hi;
      }
    }

    const double rb = r - rc;
    if (rb > 0.0) {
      breakage += rb;
      if (t.each_) {
        source[p.i] += rb;
        source[p.j] += rb;
      } else {
        const double a = rb * p.scale;
        top_weight[p.top_cell] += a;
        below += a;
        for (std::uint8_t q = 0; q < p.top.count; ++q) rate[p.top.cell[q]] += rb * p.top.weight[q];
        if (p.top_cell == n) {
          const double s = c[p.i] + c[p.j];
          outflow += rb * (s - p.scale * std::pow(t.grid_->x_max(), t.nu_ + 2.0));
        }
      }
    }
  }

  if (t.each_) {
    for (std::size_t i = 0; i < n; ++i) {
      if (source[i] == 0.0) continue;
      const double a = source[i] * t.cell_scale_[i];
      top_weight[t.cell_top_[i]] += a;
      below += a;
      const auto& d = t.cell_deposit_[i];
      for (std::uint8_t q = 0; q < d.count; ++q) rate[d.cell[q]] += source[i] * d.weight[q];
    }
  }

  // Cell k is fully covered by every source whose top cell lies above k.
  double covering = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    covering += top_weight[k + 1];
    if (covering == 0.0) continue;
    const auto& d = t.full_cell_[k];
    for (std::uint8_t q = 0; q < d.count; ++q) rate[d.cell[q]] += covering * d.weight[q];
  }
  rate[0] += below * t.below_grid_;

  if (totals) {
    totals->breakage_rate = breakage;
    totals->coagulation_rate = coagulation;
    totals->outflow_rate = outflow;
  }
}

std::vector<double> apply_rhs(const OperatorTables& tables, const State& state, RhsTotals* totals) {
  if (state.density.size() != tables.cells()) throw DomainError("apply_rhs: state does not match the tables' grid");
  const auto dx = tables.grid().widths();
  std::vector<double> numbers(state.density.size());
  for (std::size_t i = 0; i < numbers.size(); ++i) numbers[i] = state.density[i] * dx[i];
  std::vector<double> rate;
  apply_rhs_numbers(tables, numbers, rate, totals);
  for (std::size_t i = 0; i < rate.size(); ++i) rate[i] /= dx[i];
  return rate;
}

void validate(const StepControl& control) {
  if (!(control.t_end > 0.0) || !std::isfinite(control.t_end)) throw ConfigError("control: t_end must be positive");
  if (!(control.dt > 0.0)) throw ConfigError("control: dt must be positive");
  if (!(control.rtol > 0.0)) throw ConfigError("control: rtol must be positive");
  if (!(control.dt_min > 0.0) || !(control.dt_max > 0.0)) throw ConfigError("control: dt_min and dt_max must be positive");
  if (control.dt_min > control.dt_max) throw ConfigError("control: dt_min must not exceed dt_max");
  if (!(control.clip_tolerance >= 0.0)) throw ConfigError("control: clip_tolerance must be non-negative");
  double prev = 0.0;
  for (double t : control.output_times) {
    if (!(t > prev) || t > control.t_end) {
      throw ConfigError("control: output times must increase strictly within (0, t_end]");
    }
    prev = t;
  }
}

std::vector<double> uniform_outputs(double t_end, double every) {
  if (!(every > 0.0)) throw ConfigError("control: output spacing must be positive");
  std::vector<double> out;
  const auto count = static_cast<std::size_t>(std::floor(t_end / every + 1e-9));
  for (std::size_t k = 1; k <= count; ++k) out.push_back(std::min(t_end, static_cast<double>(k) * every));
  if (out.empty() || out.back() < t_end * (1.0 - 1e-12)) out.push_back(t_end);
  out.back() = t_end;
  return out;
}

namespace {

double first_moment(const std::vector<double>& numbers, std::span<const double> c) {
  double m = 0.0;
  for (std::size_t i = 0; i < numbers.size(); ++i) m += c[i] * numbers[i];
  return m;
}

nlohmann::json failure_payload(const State& state, double dt, double dt_min, const std::string& reason) {
  return nlohmann::json{{"time", state.time}, {"dt", dt},         {"dt_min", dt_min},
                        {"mass", mass(state)}, {"reason", reason}, {"cells", state.density.size()}};
}

}  // namespace

StepResult step(const OperatorTables& tables, const State& state, const StepControl& control, double dt_try,
                double t_stop) {
  const std::size_t n = tables.cells();
  const auto c = tables.grid().centers();
  const auto dx = tables.grid().widths();

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = state.density[i] * dx[i];
  const double mass0 = first_moment(y, c);
  const double atol = control.atol >= 0.0 ? control.atol : 1e-12 * std::max(mass0, std::numeric_limits<double>::min());

  StepResult res;
  const double remaining = t_stop - state.time;
  if (!(remaining > 0.0)) {
    res.state = state;
    res.dt_next = dt_try;
    return res;
  }

  double h = std::min(dt_try, remaining);
  if (control.method == Method::heun_adaptive) h = std::min(h, control.dt_max);
  const double lambda = tables.loss_rate_bound(y);
  if (lambda > 0.0) h = std::min(h, 0.95 / lambda);

  std::vector<double> k1, k2, k3, k4, tmp(n), next(n);
  apply_rhs_numbers(tables, y, k1);
  ++res.rhs_evaluations;

  for (;;) {
    const bool final_piece = h >= remaining * (1.0 - 1e-12);
    if (h < control.dt_min && !(final_piece && remaining < control.dt_min)) {
      throw IntegrationError("step size fell below dt_min at t = " + std::to_string(state.time),
                             failure_payload(state, h, control.dt_min, "step size underflow"));
    }

    double err = 0.0;
    if (control.method == Method::rk4) {
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
      apply_rhs_numbers(tables, tmp, k2);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
      apply_rhs_numbers(tables, tmp, k3);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
      apply_rhs_numbers(tables, tmp, k4);
      res.rhs_evaluations += 3;
      for (std::size_t i = 0; i < n; ++i) next[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    } else {
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k1[i];
      apply_rhs_numbers(tables, tmp, k2);
      ++res.rhs_evaluations;
      for (std::size_t i = 0; i < n; ++i) {
        next[i] = y[i] + 0.5 * h * (k1[i] + k2[i]);
        const double scale = atol + control.rtol * std::max(std::abs(c[i] * y[i]), std::abs(c[i] * next[i]));
        err = std::max(err, std::abs(c[i] * (next[i] - tmp[i])) / scale);
      }
      if (!std::isfinite(err) || err > 1.0) {
        h *= std::isfinite(err) ? std::clamp(0.9 / std::sqrt(err), 0.2, 0.9) : 0.2;
        ++res.rejected;
        continue;
      }
    }

    double clipped = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(next[i])) finite = false;
      if (next[i] < 0.0) clipped -= c[i] * next[i];
    }
    if (!finite || clipped > control.clip_tolerance * std::max(mass0, std::numeric_limits<double>::min())) {
      h *= 0.5;
      ++res.rejected;
      continue;
    }

    for (std::size_t i = 0; i < n; ++i) next[i] = std::max(next[i], 0.0);
    res.state.grid = state.grid;
    res.state.density.resize(n);
    for (std::size_t i = 0; i < n; ++i) res.state.density[i] = next[i] / dx[i];
    res.state.time = final_piece ? t_stop : state.time + h;
    res.dt_taken = final_piece ? remaining : h;
    res.clipped_mass = clipped;
    if (control.method == Method::rk4) {
      res.dt_next = control.dt;
    } else {
      const double factor = err > 0.0 ? std::clamp(0.9 / std::sqrt(err), 0.2, 5.0) : 5.0;
      // A step shortened only to land on t_stop says nothing about the next one.
      res.dt_next = final_piece ? std::max(h * factor, dt_try) : h * factor;
    }
    return res;
  }
}

std::vector<double> Trajectory::times() const {
  std::vector<double> t;
  t.reserve(states.size());
  for (const auto& s : states) t.push_back(s.time);
  return t;
}

Trajectory integrate(const OperatorTables& tables, const State& initial, const StepControl& control) {
  validate(control);
  validate(initial);
  if (initial.density.size() != tables.cells()) throw DomainError("integrate: state does not match the tables' grid");

  std::vector<double> outputs = control.output_times;
  if (outputs.empty() || outputs.back() < control.t_end) outputs.push_back(control.t_end);

  Trajectory traj;
  traj.states.reserve(outputs.size() + 1);
  traj.states.push_back(initial);
  traj.stats.min_dt = std::numeric_limits<double>::infinity();

  State current = initial;
  const double mass0 = mass(initial);
  double dt = control.dt;
  for (double t_out : outputs) {
    while (current.time < t_out) {
      auto res = step(tables, current, control, dt, t_out);
      ++traj.stats.accepted;
      traj.stats.rejected += res.rejected;
      traj.stats.rhs_evaluations += res.rhs_evaluations;
      traj.stats.clipped_mass += res.clipped_mass;
      if (mass0 > 0.0) {
        traj.stats.max_clipped_fraction = std::max(traj.stats.max_clipped_fraction, res.clipped_mass / mass0);
      }
      if (res.dt_taken < t_out - current.time || res.state.time < t_out) {
        traj.stats.min_dt = std::min(traj.stats.min_dt, res.dt_taken);
      }
      traj.stats.max_dt = std::max(traj.stats.max_dt, res.dt_taken);
      dt = res.dt_next;
      current = std::move(res.state);
    }
    current.time = t_out;
    traj.states.push_back(current);
  }
  if (!std::isfinite(traj.stats.min_dt)) traj.stats.min_dt = traj.stats.max_dt;
  return traj;
}

double weak_form_rate(const OperatorTables& tables, const State& state, const TestFunction& phi) {
  const auto c = tables.grid().centers();
  const auto dx = tables.grid().widths();
  std::vector<double> numbers(tables.cells());
  for (std::size_t i = 0; i < numbers.size(); ++i) numbers[i] = state.density[i] * dx[i];
  std::vector<double> rate;
  apply_rhs_numbers(tables, numbers, rate);
  double sum = 0.0;
  for (std::size_t i = 0; i < rate.size(); ++i) sum += phi(c[i]) * rate[i];
  return sum;
}

WeakFormResidual weak_form_residual(const OperatorTables& tables, const Trajectory& trajectory,
                                    const TestFunction& phi) {
  if (trajectory.states.size() < 3) throw DomainError("weak_form_residual: need at least three output times");
  const auto c = tables.grid().centers();
  auto integral = [&](const State& s) {
    double sum = 0.0;
    for (std::size_t i = 0; i < s.density.size(); ++i) sum += phi(c[i]) * s.density[i] * s.grid->widths()[i];
    return sum;
  };

  WeakFormResidual out;
  double prev_value = integral(trajectory.states.front());
  double prev_rate = weak_form_rate(tables, trajectory.states.front(), phi);
  for (std::size_t k = 1; k < trajectory.states.size(); ++k) {
    const State& s = trajectory.states[k];
    const double value = integral(s);
    const double rate = weak_form_rate(tables, s, phi);
    WeakFormInterval iv;
    iv.t0 = trajectory.states[k - 1].time;
    iv.t1 = s.time;
    iv.lhs = value - prev_value;
    iv.rhs = 0.5 * (iv.t1 - iv.t0) * (prev_rate + rate);
    iv.absolute = std::abs(iv.lhs - iv.rhs);
    double denom = std::max(std::abs(iv.lhs), std::abs(iv.rhs));
    const double size = std::abs(value);
    if (denom < 1e-12 * size) denom = size;
    iv.relative = denom > 0.0 ? iv.absolute / denom : 0.0;
    out.max_relative = std::max(out.max_relative, iv.relative);
    out.max_absolute = std::max(out.max_absolute, iv.absolute);
    out.intervals.push_back(iv);
    prev_value = value;
    prev_rate = rate;
  }
  return out;
}

}  // namespace breakcoag
