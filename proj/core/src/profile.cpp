#include "breakcoag/profile.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "breakcoag/csv.hpp"
#include "breakcoag/errors.hpp"

namespace breakcoag {

namespace {

// a^{s+1}-weighted difference (v^{s+1} - u^{s+1}) / (s+1), stable near s = -1.
double power_integral(double u, double v, double s) {
  const double e = s + 1.0;
  const double log_ratio = std::log(v / u);
  if (std::abs(e * log_ratio) < 1e-12) return log_ratio * (1.0 + 0.5 * e * log_ratio);
  return std::pow(u, e) * std::expm1(e * log_ratio) / e;
}

}  // namespace

TabulatedProfile::TabulatedProfile(std::vector<double> x, std::vector<double> f)
    : x_(std::move(x)), f_(std::move(f)) {
  if (x_.size() != f_.size()) throw DataError("profile: x and f differ in length");
  if (x_.size() < 2) throw DataError("profile: need at least two points");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!(x_[i] > 0.0) || !std::isfinite(x_[i])) throw DataError("profile: x must be positive");
    if (!(f_[i] >= 0.0) || !std::isfinite(f_[i])) throw DataError("profile: f must be non-negative");
    if (i > 0 && !(x_[i] > x_[i - 1])) throw DataError("profile: x must be strictly increasing");
  }
}

TabulatedProfile TabulatedProfile::from_csv(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const auto ix = table.column("x");
  const auto jf = table.column("f");
  std::vector<double> x, f;
  for (const auto& row : table.rows) {
    x.push_back(row[ix]);
    f.push_back(row[jf]);
  }
  return TabulatedProfile(std::move(x), std::move(f));
}

TabulatedProfile TabulatedProfile::with_fitted_tail() const {
  if (!(f_[0] > 0.0) || !(f_[1] > 0.0)) {
    // Vanishing at the first point: the profile is zero near 0.
    TabulatedProfile out = *this;
    out.tail_ = PowerTail{0.0, 0.0};
    return out;
  }
  const double q = std::log(f_[1] / f_[0]) / std::log(x_[1] / x_[0]);
  if (!(q > -1.0)) {
    throw DataError("profile is not integrable near 0 at the tabulated resolution (fitted exponent " +
                    std::to_string(q) + ")");
  }
  TabulatedProfile out = *this;
  out.tail_ = PowerTail{f_[0] / std::pow(x_[0], q), q};
  return out;
}

double TabulatedProfile::operator()(double x) const {
  if (x < x_.front()) {
    if (tail_ && x > 0.0) return tail_->coefficient * std::pow(x, tail_->exponent);
    return 0.0;
  }
  if (x > x_.back()) return 0.0;
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t k = (it == x_.end()) ? x_.size() - 2 : static_cast<std::size_t>(it - x_.begin()) - 1;
  const double xa = x_[k], xb = x_[k + 1], fa = f_[k], fb = f_[k + 1];
  if (fa > 0.0 && fb > 0.0) {
    const double s = std::log(fb / fa) / std::log(xb / xa);
    return fa * std::pow(x / xa, s);
  }
  return fa + (fb - fa) * (x - xa) / (xb - xa);
}

double TabulatedProfile::segment_integral(std::size_t k, double a, double b) const {
  const double xa = x_[k], xb = x_[k + 1], fa = f_[k], fb = f_[k + 1];
  if (fa > 0.0 && fb > 0.0) {
    const double s = std::log(fb / fa) / std::log(xb / xa);
    // fa (x/xa)^s integrated over [a,b].
    return fa * std::pow(xa, -s) * power_integral(a, b, s);
  }
  const double slope = (fb - fa) / (xb - xa);
  const double fa_ = fa + slope * (a - xa);
  const double fb_ = fa + slope * (b - xa);
  return 0.5 * (fa_ + fb_) * (b - a);
}

double TabulatedProfile::tail_integral(double a, double b) const {
  if (!tail_ || tail_->coefficient == 0.0 || b <= a) return 0.0;
  const double e = tail_->exponent + 1.0;
  const double upper = std::pow(b, e);
  const double lower = a > 0.0 ? std::pow(a, e) : 0.0;
  return tail_->coefficient * (upper - lower) / e;
}

double TabulatedProfile::integral(double a, double b) const {
  if (!(b > a)) return 0.0;
  double total = 0.0;
  if (a < x_.front()) {
    total += tail_integral(std::max(a, 0.0), std::min(b, x_.front()));
    a = x_.front();
    if (!(b > a)) return total;
  }
  b = std::min(b, x_.back());
  if (!(b > a)) return total;
  auto it = std::upper_bound(x_.begin(), x_.end(), a);
  std::size_t k = static_cast<std::size_t>(it - x_.begin()) - 1;
  for (; k + 1 < x_.size() && x_[k] < b; ++k) {
    const double lo = std::max(a, x_[k]);
    const double hi = std::min(b, x_[k + 1]);
    if (hi > lo) total += segment_integral(k, lo, hi);
  }
  return total;
}

}  // namespace breakcoag
