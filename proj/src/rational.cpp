#include "ratmin/rational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ratmin/errors.hpp"

namespace ratmin {

void BoundSpec::validate() const {
  if (!std::isfinite(lower) || !std::isfinite(upper) || !(lower > 0.0) ||
      !(lower <= upper)) {
    throw InvalidArgument("denominator bounds require 0 < lower <= upper");
  }
}

RationalApproximant::RationalApproximant(Domain domain, ChebCoeffs num,
                                         ChebCoeffs den,
                                         std::optional<BoundSpec> bounds)
    : domain_(domain),
      num_(std::move(num)),
      den_(std::move(den)),
      bounds_(bounds) {
  if (bounds_) bounds_->validate();
}

double RationalApproximant::numerator(double x) const noexcept {
  return clenshaw(num_, map_to_ref(domain_, x));
}

double RationalApproximant::denominator(double x) const noexcept {
  return clenshaw(den_, map_to_ref(domain_, x));
}

Evaluation evaluate(const RationalApproximant& r, double x) noexcept {
  const double t = map_to_ref(r.domain(), x);
  const double p = clenshaw(r.num(), t);
  const double q = clenshaw(r.den(), t);
  return {p / q, p, q};
}

double uniform_error(const RationalApproximant& r, const ScalarFunction& f,
                     const Grid& g) {
  double worst = 0.0;
  for (double x : g) worst = std::max(worst, std::abs(f(x) - eval(r, x)));
  return worst;
}

double uniform_error(const RationalApproximant& r, std::span<const double> f,
                     const Grid& g) {
  if (f.size() != g.size()) {
    throw InvalidArgument("value count does not match grid size");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    worst = std::max(worst, std::abs(f[i] - eval(r, g[i])));
  }
  return worst;
}

double denominator_change(const RationalApproximant& r, const Grid& g) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double x : g) {
    const double q = std::abs(r.denominator(x));
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  if (!(lo > 0.0)) throw NumericalError("denominator vanishes on the grid");
  return hi / lo;
}

double BoundReport::worst() const noexcept {
  return std::max({lower_violation, upper_violation, positivity_violation});
}

BoundReport verify_bounds(const RationalApproximant& r, const Grid& g,
                          const BoundSpec& b) {
  const double slack = 1e-8 * b.upper;
  BoundReport rep;
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double q = r.denominator(g[i]);
    const double lo = std::max(0.0, b.lower - q);
    const double hi = std::max(0.0, q - b.upper);
    const double pos = b.positive ? std::max(0.0, -r.numerator(g[i])) : 0.0;
    rep.lower_violation = std::max(rep.lower_violation, lo);
    rep.upper_violation = std::max(rep.upper_violation, hi);
    rep.positivity_violation = std::max(rep.positivity_violation, pos);
    const double w = std::max({lo, hi, pos});
    if (w > worst) {
      worst = w;
      rep.worst_index = i;
    }
  }
  for (double* v : {&rep.lower_violation, &rep.upper_violation,
                    &rep.positivity_violation}) {
    if (*v <= slack) *v = 0.0;
  }
  return rep;
}

}  // namespace ratmin
