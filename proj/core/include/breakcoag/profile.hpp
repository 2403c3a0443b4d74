#pragma once

#include <filesystem>
#include <optional>
#include <vector>

namespace breakcoag {

// Power-law model h(x) = coefficient * x^exponent used below the first
// tabulated abscissa.
struct PowerTail {
  double coefficient = 0.0;
  double exponent = 0.0;
};

// Non-negative profile tabulated at strictly increasing abscissae and
// interpolated log-log (piecewise power law). Segments with a zero endpoint
// are interpolated linearly. Outside the table the profile is zero, except
// below the first point when a power tail is attached.
class TabulatedProfile {
public:
  TabulatedProfile(std::vector<double> x, std::vector<double> f);

  // Reads a two-column `x,f` CSV with header.
  static TabulatedProfile from_csv(const std::filesystem::path& path);

  // Returns a copy with a power tail fitted through the first two tabulated
  // points. Throws DataError when the fitted exponent is <= -1 (the profile
  // would not be integrable at 0).
  TabulatedProfile with_fitted_tail() const;

  double operator()(double x) const;

  // Exact integral of the interpolant over [a, b] (a <= b, a >= 0).
  double integral(double a, double b) const;

  const std::vector<double>& x() const noexcept { return x_; }
  const std::vector<double>& f() const noexcept { return f_; }
  const std::optional<PowerTail>& tail() const noexcept { return tail_; }

private:
  double segment_integral(std::size_t k, double a, double b) const;
  double tail_integral(double a, double b) const;

  std::vector<double> x_;
  std::vector<double> f_;
  std::optional<PowerTail> tail_;
};

}  // namespace breakcoag
