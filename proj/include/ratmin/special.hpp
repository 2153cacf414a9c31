#pragma once

namespace ratmin {

/// Gauss error function, absolute error below 1e-12 everywhere.
/// Power series for |x| <= 2.5, continued fraction for erfc beyond.
double erf(double x) noexcept;

/// 1 - erf(x), accurate in relative terms for large positive x.
double erfc(double x) noexcept;

}  // namespace ratmin
