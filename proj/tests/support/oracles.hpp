#pragma once

// Independent reference values for the tests: adaptive quadrature from
// Boost.Math and closed forms.

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

// Adaptive Gauss-Kronrod on [a, b] for smooth integrands.
inline double smooth(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, tol);
}

// tanh-sinh on [a, b]; tolerates integrable endpoint singularities.
inline double singular(const std::function<double(double)>& f, double a, double b, double tol = 1e-12) {
  thread_local boost::math::quadrature::tanh_sinh<double> rule(12);
  return rule.integrate(f, a, b, tol);
}

// int_0^inf x^m e^{-x} dx
inline double exponential_moment(double m) { return std::tgamma(m + 1.0); }

// Moments of the constant-kernel, pure-coagulation solution from
// f(0) = e^{-x}: M_0(t) = 2 / (2 + t).
inline double constant_kernel_number(double t) { return 2.0 / (2.0 + t); }

// Product kernel, pure coagulation, e^{-x} data: M_2(t) = 2 / (1 - 2t), t < 1/2.
inline double product_kernel_second_moment(double t) { return 2.0 / (1.0 - 2.0 * t); }

// Additive kernel, pure coagulation, M_1 = 1: M_0(t) = e^{-t}.
inline double additive_kernel_number(double t) { return std::exp(-t); }

inline double relative(double value, double reference) {
  return std::abs(value - reference) / std::max(std::abs(reference), std::numeric_limits<double>::min());
}

inline std::string data(const std::string& name) { return std::string(BREAKCOAG_TEST_DATA) + "/" + name; }

}  // namespace oracle
