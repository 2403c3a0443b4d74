#include "breakcoag/dlvp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "breakcoag/errors.hpp"

namespace breakcoag {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();

double tail_mass(const TabulatedProfile& h, std::int64_t j) { return h.integral(0.0, 1.0 / static_cast<double>(j)); }

// Smallest j >= lower with int_0^{1/j} h <= target.
std::int64_t smallest_meeting(const TabulatedProfile& h, std::int64_t lower, double target) {
  if (tail_mass(h, lower) <= target) return lower;
  std::int64_t bad = lower;
  std::int64_t good = lower;
  constexpr std::int64_t cap = std::int64_t{1} << 62;
  do {
    if (good >= cap / 2) throw DataError("profile is not integrable at 0 at the tabulated resolution");
    bad = good;
    good *= 2;
  } while (tail_mass(h, good) > target);
  while (good - bad > 1) {
    const std::int64_t mid = bad + (good - bad) / 2;
    (tail_mass(h, mid) <= target ? good : bad) = mid;
  }
  return good;
}

}  // namespace

std::vector<std::int64_t> build_j_sequence(const TabulatedProfile& h, int max_m) {
  if (max_m < 2) throw ConfigError("dlvp: max_m must be at least 2");
  const TabulatedProfile profile = h.tail() ? h : h.with_fitted_tail();
  std::vector<std::int64_t> j{1};
  for (int m = 0; m < max_m; ++m) {
    const double growth = std::ceil(std::exp(static_cast<double>(m + 1)));
    const std::int64_t lower = std::max<std::int64_t>(2 * j.back(), static_cast<std::int64_t>(growth));
    const double target = 1.0 / (static_cast<double>(m + 1) * (m + 1));
    j.push_back(smallest_meeting(profile, lower, target));
  }
  return j;
}

PhiConstruction make_phi(std::vector<std::int64_t> j, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("dlvp: theta must lie in (0, 1)");
  if (j.size() < 3 || j[0] != 1) throw ConfigError("dlvp: sequence must start at 1 and have at least two steps");
  for (std::size_t m = 1; m < j.size(); ++m) {
    if (j[m] < 2 * j[m - 1]) throw ConfigError("dlvp: sequence must at least double at every step");
  }
  PhiConstruction pc;
  pc.j = std::move(j);
  pc.theta = theta;
  const double first_gap = static_cast<double>(pc.j[1] - pc.j[0]);
  // Piece 0 is [0, j_1]; piece m is [j_m, j_{m+1}].
  const std::size_t pieces = pc.j.size() - 1;
  double value = 0.0;
  for (std::size_t m = 0; m < pieces; ++m) {
    const double a = m == 0 ? 0.0 : static_cast<double>(pc.j[m]);
    const double b = static_cast<double>(pc.j[m + 1]);
    const double d = m == 0 ? 0.0 : static_cast<double>(m) + 1.0 / first_gap;
    const double s = m == 0 ? 1.0 / first_gap : 1.0 / (b - a);
    pc.start.push_back(a);
    pc.value.push_back(value);
    pc.slope_start.push_back(d);
    pc.curvature.push_back(s);
    const double w = b - a;
    value += d * w + 0.5 * s * w * w;
  }
  return pc;
}

PhiConstruction build_phi(const TabulatedProfile& h, double theta, int max_m) {
  return make_phi(build_j_sequence(h, max_m), theta);
}

namespace {

std::size_t piece_of(const PhiConstruction& pc, double xi) {
  if (xi < 0.0 || std::isnan(xi)) throw DomainError("Phi0: argument must be non-negative");
  // 1/(1/j) may round just past j.
  if (xi > pc.last_breakpoint() * (1.0 + 4.0 * eps) && !pc.extrapolate) {
    throw DomainError("Phi0: argument beyond the last breakpoint");
  }
  const auto it = std::upper_bound(pc.start.begin(), pc.start.end(), xi);
  return static_cast<std::size_t>(it - pc.start.begin()) - 1;
}

}  // namespace

Phi0Value eval_phi0(const PhiConstruction& pc, double xi) {
  const std::size_t m = piece_of(pc, xi);
  const double t = xi - pc.start[m];
  return {pc.value[m] + pc.slope_start[m] * t + 0.5 * pc.curvature[m] * t * t,
          pc.slope_start[m] + pc.curvature[m] * t};
}

double eval_phi0_curvature(const PhiConstruction& pc, double xi) { return pc.curvature[piece_of(pc, xi)]; }

double eval_phi(const PhiConstruction& pc, double x) {
  if (!(x > 0.0)) throw DomainError("Phi: x must be positive");
  return x * eval_phi0(pc, 1.0 / x).value + 2.0 / pc.theta;
}

namespace {

// Simpson in u = log x of Phi(x) h(x) x over [log a, log b].
double log_simpson(const PhiConstruction& pc, const TabulatedProfile& h, double a, double b, int n) {
  if (n % 2) ++n;
  const double ua = std::log(a);
  const double step = (std::log(b) - ua) / n;
  double sum = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double x = k == 0 ? a : (k == n ? b : std::exp(ua + k * step));
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    sum += w * eval_phi(pc, x) * h(x) * x;
  }
  return sum * step / 3.0;
}

double weighted_integral(const PhiConstruction& pc, const TabulatedProfile& h, int per_segment) {
  const auto& xs = h.x();
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) total += log_simpson(pc, h, xs[k], xs[k + 1], per_segment);
  // Below the table: down to the last breakpoint, then bound the remainder
  // by Phi(x) <= Phi0'(1/x) + 2/theta.
  const double floor = 1.0 / pc.last_breakpoint();
  if (floor < xs.front() && h.tail()) {
    const int decades = static_cast<int>(std::ceil(std::log10(xs.front() / floor)));
    total += log_simpson(pc, h, floor, xs.front(), per_segment * std::max(decades, 1));
    const double rest = h.integral(0.0, floor);
    total += rest * (eval_phi0(pc, pc.last_breakpoint()).derivative + 2.0 / pc.theta);
  }
  return total;
}

}  // namespace

DlvpReport verify_dlvp(const PhiConstruction& pc, const TabulatedProfile& h, int samples) {
  if (samples < 10) throw ConfigError("verify_dlvp: need at least 10 samples");
  const TabulatedProfile profile = h.tail() ? h : h.with_fitted_tail();
  DlvpReport r;
  const double theta = pc.theta;

  r.integral = weighted_integral(pc, profile, 16);
  r.integral_refined = weighted_integral(pc, profile, 32);
  r.integrable = std::isfinite(r.integral) && std::isfinite(r.integral_refined) &&
                 std::abs(r.integral_refined - r.integral) <= 1e-2 * std::abs(r.integral_refined);

  const double lo = 1.0 / pc.last_breakpoint();
  const double hi = std::max(1e3, 10.0 * profile.x().back());
  std::vector<double> xs(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) xs[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (samples - 1));
  std::vector<double> phi(xs.size()), slope(xs.size() - 1), err(xs.size() - 1);
  for (std::size_t k = 0; k < xs.size(); ++k) phi[k] = eval_phi(pc, xs[k]);
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double dx = xs[k + 1] - xs[k];
    slope[k] = (phi[k + 1] - phi[k]) / dx;
    err[k] = 4.0 * eps * std::max(std::abs(phi[k]), std::abs(phi[k + 1])) / dx;
  }
  r.nonincreasing = true;
  r.convex = true;
  for (std::size_t k = 0; k < slope.size(); ++k) {
    if (slope[k] > err[k]) r.nonincreasing = false;
    if (k > 0 && slope[k] - slope[k - 1] < -(err[k] + err[k - 1])) r.convex = false;
  }

  r.min_theta_slope = INFINITY;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double v0 = std::pow(xs[k], theta) * phi[k];
    const double v1 = std::pow(xs[k + 1], theta) * phi[k + 1];
    r.min_theta_slope = std::min(r.min_theta_slope, (v1 - v0) / (xs[k + 1] - xs[k]));
  }
  const double at_one = eval_phi(pc, 1.0);
  r.theta_limit_ratio = std::pow(lo, theta) * eval_phi(pc, lo) / at_one;
  bool decreasing = true;
  double previous = at_one;
  for (double x = 0.1; x >= lo; x *= 0.1) {
    const double v = std::pow(x, theta) * eval_phi(pc, x);
    if (!(v < previous)) decreasing = false;
    previous = v;
  }
  r.theta_monotone = r.min_theta_slope >= -1e-12 && decreasing && r.theta_limit_ratio < 1e-2;

  const double bound = 2.0 * (theta - 1.0);
  const double j1 = static_cast<double>(pc.j[1]);
  r.first_piece_value = (theta - 1.0) * j1 / (j1 - 1.0);
  r.first_piece_bound = bound;
  r.min_curvature_margin = INFINITY;
  r.min_integrated_margin = INFINITY;
  auto probe = [&](double xi, bool interior) {
    const auto v = eval_phi0(pc, xi);
    const double scale = eps * 16.0 * (1.0 + std::abs(v.value) + xi * std::abs(v.derivative));
    if (interior) {
      const double lhs = theta * v.derivative - xi * eval_phi0_curvature(pc, xi);
      r.min_curvature_margin = std::min(r.min_curvature_margin, lhs - bound + scale);
    }
    const double lhs = (1.0 + theta) * v.value - xi * v.derivative;
    r.min_integrated_margin = std::min(r.min_integrated_margin, lhs - bound * xi + scale);
  };
  for (std::size_t m = 0; m < pc.start.size(); ++m) {
    const double a = pc.start[m];
    const double b = m + 1 < pc.start.size() ? pc.start[m + 1] : pc.last_breakpoint();
    probe(a, false);
    for (int q = 1; q < 8; ++q) probe(a + (b - a) * q / 8.0, true);
    probe(std::nextafter(b, a), true);
  }
  probe(pc.last_breakpoint(), false);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double xi = 1.0 / xs[k];
    if (xi > pc.last_breakpoint()) continue;
    const bool at_break = std::binary_search(pc.start.begin(), pc.start.end(), xi);
    probe(xi, !at_break);
  }
  r.inequalities = r.min_curvature_margin >= 0.0 && r.min_integrated_margin >= 0.0 &&
                   r.first_piece_value >= r.first_piece_bound;
  return r;
}

}  // namespace breakcoag
