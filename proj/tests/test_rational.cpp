#include <cmath>
#include <limits>

#include "doctest.h"
#include "ratmin/errors.hpp"
#include "ratmin/random.hpp"
#include "ratmin/rational.hpp"
#include "ratmin/serialize.hpp"

using namespace ratmin;
using doctest::Approx;

namespace {
const Domain kRef(-1.0, 1.0);
}

TEST_CASE("eval examples") {
  CHECK(eval(RationalApproximant(kRef, {3.0}, {1.0}), 0.77) == 3.0);
  CHECK(eval(RationalApproximant(kRef, {0.0, 1.0}, {1.0}), 0.25) == Approx(0.25));
  CHECK(eval(RationalApproximant(kRef, {1.0}, {1.5, 0.5}), 1.0) == Approx(0.5));
}

TEST_CASE("evaluation outside the certified region is reported") {
  const RationalApproximant r(kRef, {1.0}, {0.0, 1.0});
  CHECK_FALSE(evaluate(r, -0.5).certified());
  CHECK(evaluate(r, 0.5).certified());
  CHECK(evaluate(r, 0.5).value == Approx(2.0));
}

TEST_CASE("uniform_error examples") {
  const Grid g = equidistant_grid(kRef, 3);
  const RationalApproximant c(kRef, {2.0}, {1.0});
  CHECK(uniform_error(c, [](double) { return 2.0; }, g) == 0.0);
  const RationalApproximant zero(kRef, {0.0}, {1.0});
  CHECK(uniform_error(zero, [](double x) { return x; }, g) == 1.0);
  const std::vector<double> tab{-1.0, 0.0, 1.0};
  CHECK(uniform_error(zero, tab, g) == 1.0);
}

TEST_CASE("denominator_change examples") {
  const Grid g = equidistant_grid(kRef, 3);
  CHECK(denominator_change(RationalApproximant(kRef, {1.0}, {4.0}), g) == 1.0);
  CHECK(denominator_change(RationalApproximant(kRef, {1.0}, {1.5, 0.5}), g) == Approx(2.0));
  CHECK_THROWS_AS(denominator_change(RationalApproximant(kRef, {1.0}, {0.0, 1.0}), g),
                  NumericalError);
}

TEST_CASE("denominator_change is at least one") {
  CounterRng rng(21);
  const Grid g = equidistant_grid(kRef, 50);
  for (int s = 0; s < 100; ++s) {
    const RationalApproximant r(kRef, {1.0},
                                {3.0, rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
    CHECK(denominator_change(r, g) >= 1.0);
  }
}

TEST_CASE("verify_bounds examples") {
  const Grid g = equidistant_grid(kRef, 5);
  const BoundSpec b{1.0, 2.0, false};
  CHECK(verify_bounds(RationalApproximant(kRef, {1.0}, {1.0}), g, b).ok());
  const BoundReport over = verify_bounds(RationalApproximant(kRef, {1.0}, {3.0}), g, b);
  CHECK_FALSE(over.ok());
  CHECK(over.upper_violation == Approx(1.0));
  CHECK(over.lower_violation == 0.0);
  const BoundReport neg = verify_bounds(RationalApproximant(kRef, {0.0, 1.0}, {1.5}), g,
                                        BoundSpec{1.0, 2.0, true});
  CHECK(neg.positivity_violation == Approx(1.0));
  // tiny violations inside the 1e-8 * u slack are not reported
  CHECK(verify_bounds(RationalApproximant(kRef, {1.0}, {2.0 + 1e-9}), g, b).ok());
}

TEST_CASE("bound spec validation") {
  CHECK_THROWS_AS((BoundSpec{0.0, 1.0, false}.validate()), InvalidArgument);
  CHECK_THROWS_AS((BoundSpec{2.0, 1.0, false}.validate()), InvalidArgument);
  CHECK_NOTHROW((BoundSpec{1.0, 1.0, false}.validate()));
  CHECK(BoundSpec{2.0, 8.0, false}.cond_bound() == 4.0);
}

TEST_CASE("value is invariant under common scaling") {
  CounterRng rng(22);
  for (int s = 0; s < 100; ++s) {
    std::vector<double> num(4), den{2.5, 0.0, 0.0};
    for (double& x : num) x = rng.uniform(-1.0, 1.0);
    den[1] = rng.uniform(-1.0, 1.0);
    den[2] = rng.uniform(-0.5, 0.5);
    const double c = std::exp(rng.uniform(-5.0, 5.0));
    const RationalApproximant r(kRef, ChebCoeffs(num), ChebCoeffs(den));
    const RationalApproximant rc(kRef, ChebCoeffs(num).scaled(c), ChebCoeffs(den).scaled(c));
    const double x = rng.uniform(-1.0, 1.0);
    const double v = eval(r, x);
    CHECK(std::abs(eval(rc, x) - v) <= 1e-12 * std::max(1.0, std::abs(v)));
  }
}

TEST_CASE("approximant JSON round trip is bit exact") {
  CounterRng rng(23);
  for (int s = 0; s < 200; ++s) {
    std::vector<double> num(1 + s % 7), den(1 + s % 5);
    for (double& x : num) x = std::ldexp(rng.uniform(-1.0, 1.0), static_cast<int>(rng.uniform() * 60.0) - 30);
    for (double& x : den) x = rng.uniform(-1.0, 1.0);
    den[0] = 10.0 + rng.uniform();
    std::optional<BoundSpec> b;
    if (s % 2 == 0) b = BoundSpec{1.0, 1.0 + rng.uniform() * 1e3, s % 4 == 0};
    const RationalApproximant r(Domain(-rng.uniform(), 1.0 + rng.uniform()),
                                ChebCoeffs(num), ChebCoeffs(den), b);
    const RationalApproximant back = parse_approximant(dump_approximant(r));
    CHECK(back == r);
  }
}

TEST_CASE("approximant JSON schema") {
  const RationalApproximant r(Domain(0.0, 3.0), {1.0, 2.0}, {1.0});
  const nlohmann::json j = to_json(r);
  CHECK(j["basis"] == "chebyshev-T");
  CHECK(j["convention"] == "plain-sum");
  CHECK(j["domain"].size() == 2);
  CHECK_FALSE(j.contains("bounds"));

  nlohmann::json bad = j;
  bad["convention"] = "dashed-sum";
  CHECK_THROWS_AS(approximant_from_json(bad), InvalidArgument);
  bad = j;
  bad["basis"] = "monomial";
  CHECK_THROWS_AS(approximant_from_json(bad), InvalidArgument);
  bad = j;
  bad.erase("den");
  CHECK_THROWS_AS(approximant_from_json(bad), InvalidArgument);
  bad = j;
  bad["num"] = {1.0, "x"};
  CHECK_THROWS_AS(approximant_from_json(bad), InvalidArgument);
  CHECK_THROWS_AS(parse_approximant("{not json"), InvalidArgument);
}
