#include "ratmin/special.hpp"

#include <cmath>
#include <numbers>

namespace ratmin {

namespace {

constexpr double kSeriesLimit = 2.5;
constexpr int kFractionDepth = 120;

// erf(x) = 2/sqrt(pi) exp(-x^2) sum_n 2^n x^(2n+1) / (1*3*...*(2n+1)).
// All terms share the sign of x, so there is no cancellation.
double erf_series(double x) noexcept {
  const double two_x2 = 2.0 * x * x;
  double term = x;
  double sum = x;
  for (int n = 1; n < 200; ++n) {
    term *= two_x2 / (2.0 * n + 1.0);
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return 2.0 * std::numbers::inv_sqrtpi * std::exp(-x * x) * sum;
}

// erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))),
// x > 0, evaluated bottom-up.
double erfc_fraction(double x) noexcept {
  double f = x;
  for (int k = kFractionDepth; k >= 1; --k) f = x + 0.5 * k / f;
  return std::numbers::inv_sqrtpi * std::exp(-x * x) / f;
}

}  // namespace

double erf(double x) noexcept {
  if (std::isnan(x)) return x;
  const double ax = std::abs(x);
  if (ax <= kSeriesLimit) return erf_series(x);
  const double r = 1.0 - erfc_fraction(ax);
  return x < 0.0 ? -r : r;
}

double erfc(double x) noexcept {
  if (std::isnan(x)) return x;
  if (x > kSeriesLimit) return erfc_fraction(x);
  if (x < -kSeriesLimit) return 2.0 - erfc_fraction(-x);
  return 1.0 - erf_series(x);
}

}  // namespace ratmin
