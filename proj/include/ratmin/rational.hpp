#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include "ratmin/cheb.hpp"

namespace ratmin {

/// Side constraints on a fit: lower <= q(x_i) <= upper at every fit point,
/// and optionally p(x_i) >= 0.
struct BoundSpec {
  double lower = 1.0;
  double upper = 1e6;
  bool positive = false;

  /// Throws InvalidArgument unless 0 < lower <= upper, both finite.
  void validate() const;
  double cond_bound() const noexcept { return upper / lower; }

  friend bool operator==(const BoundSpec&, const BoundSpec&) = default;
};

/// r(x) = p(t)/q(t), t = map_to_ref(domain, x), with p and q given by
/// Chebyshev coefficients (plain-sum convention).
class RationalApproximant {
 public:
  RationalApproximant(Domain domain, ChebCoeffs num, ChebCoeffs den,
                      std::optional<BoundSpec> bounds = std::nullopt);

  const Domain& domain() const noexcept { return domain_; }
  const ChebCoeffs& num() const noexcept { return num_; }
  const ChebCoeffs& den() const noexcept { return den_; }
  /// Bounds the approximant was fitted under, when known.
  const std::optional<BoundSpec>& bounds() const noexcept { return bounds_; }

  std::size_t num_degree() const noexcept { return num_.degree(); }
  std::size_t den_degree() const noexcept { return den_.degree(); }

  double numerator(double x) const noexcept;
  double denominator(double x) const noexcept;

  friend bool operator==(const RationalApproximant&,
                         const RationalApproximant&) = default;

 private:
  Domain domain_;
  ChebCoeffs num_;
  ChebCoeffs den_;
  std::optional<BoundSpec> bounds_;
};

struct Evaluation {
  double value;
  double numerator;
  double denominator;
  /// False when q(x) <= 0, i.e. x lies outside the region the fit certified.
  bool certified() const noexcept { return denominator > 0.0; }
};

Evaluation evaluate(const RationalApproximant& r, double x) noexcept;

inline double eval(const RationalApproximant& r, double x) noexcept {
  return evaluate(r, x).value;
}

using ScalarFunction = std::function<double(double)>;

/// max_i |f(x_i) - r(x_i)|.
double uniform_error(const RationalApproximant& r, const ScalarFunction& f,
                     const Grid& g);

/// Same, against tabulated values f_i at the grid points.
double uniform_error(const RationalApproximant& r, std::span<const double> f,
                     const Grid& g);

/// C_r = max_i |q(x_i)| / min_i |q(x_i)|. Throws NumericalError when the
/// denominator vanishes somewhere on the grid.
double denominator_change(const RationalApproximant& r, const Grid& g);

struct BoundReport {
  double lower_violation = 0.0;     ///< max_i (lower - q(x_i))^+
  double upper_violation = 0.0;     ///< max_i (q(x_i) - upper)^+
  double positivity_violation = 0.0;///< max_i (-p(x_i))^+, when positivity set
  std::size_t worst_index = 0;
  bool ok() const noexcept {
    return lower_violation == 0.0 && upper_violation == 0.0 &&
           positivity_violation == 0.0;
  }
  double worst() const noexcept;
};

/// Violations smaller than 1e-8 * upper are reported as zero.
BoundReport verify_bounds(const RationalApproximant& r, const Grid& g,
                          const BoundSpec& b);

}  // namespace ratmin
