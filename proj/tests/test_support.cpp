#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ratmin/builtins.hpp"
#include "ratmin/errors.hpp"
#include "ratmin/special.hpp"

using namespace ratmin;
using doctest::Approx;

namespace {

// Maclaurin series in long double; fine for |x| <= 3 where the largest term
// is about e^9 and the extra precision absorbs the cancellation.
double erf_series(double xd) {
  const long double x = xd;
  long double term = x, sum = x;
  for (int n = 1; n < 200; ++n) {
    term *= -x * x / n;
    const long double add = term / (2 * n + 1);
    sum += add;
    if (std::fabs(add) < 1e-30L) break;
  }
  return static_cast<double>(sum * 2.0L / std::sqrt(std::numbers::pi_v<long double>));
}

}  // namespace

TEST_CASE("erf basic values") {
  CHECK(ratmin::erf(0.0) == 0.0);
  CHECK(ratmin::erf(6.0) == Approx(1.0).epsilon(1e-15));
  CHECK(ratmin::erf(-6.0) == Approx(-1.0).epsilon(1e-15));
  CHECK(ratmin::erf(1.0) == Approx(0.8427007929497149).epsilon(1e-14));
  for (double x : {0.1, 0.7, 1.9, 2.5, 2.51, 4.0}) CHECK(ratmin::erf(-x) == -ratmin::erf(x));
  CHECK(ratmin::erfc(5.0) == Approx(1.5374597944280349e-12).epsilon(1e-10));
}

TEST_CASE("erf against independent references") {
  double worst_series = 0.0, worst_std = 0.0;
  for (int i = -3000; i <= 3000; ++i) {
    const double x = i * 1e-3;
    worst_series = std::max(worst_series, std::abs(ratmin::erf(x) - erf_series(x)));
  }
  for (int i = -8000; i <= 8000; ++i) {
    const double x = i * 1e-3;
    worst_std = std::max(worst_std, std::abs(ratmin::erf(x) - std::erf(x)));
  }
  CHECK(worst_series <= 1e-12);
  CHECK(worst_std <= 1e-12);
}

TEST_CASE("erf is monotone") {
  double prev = ratmin::erf(-6.0);
  int violations = 0;
  for (int i = 1; i <= 10000; ++i) {
    const double v = ratmin::erf(-6.0 + 12.0 * i / 10000.0);
    if (v < prev) ++violations;
    prev = v;
  }
  CHECK(violations == 0);
}

TEST_CASE("builtin function values") {
  CHECK(spline_f1(1.0) == 1.0);
  CHECK(spline_f1(std::nextafter(1.0, 0.0)) == Approx(1.0).epsilon(1e-14));
  CHECK(spline_f1(0.0) == 2.0);
  CHECK(spline_f1(2.0) == 8.0);
  CHECK(shifted_abs_f4(0.1) == 0.0);
  CHECK(cusp_f2(0.0) == 0.0);
  CHECK(cusp_f2(-1.0) == Approx(1.0));
  CHECK(relu(-0.3) == 0.0);
  CHECK(relu(0.0) == 0.0);
  CHECK(relu(0.3) == 0.3);
  const TestFunction filter = builtin("filter");
  CHECK(filter(0.4) == Approx(0.39999999).epsilon(1e-8));
  CHECK(std::abs(filter(-0.6)) < 1e-12);
  CHECK(builtin("bell")(0.4) == Approx(0.5 * (1.0 + std::erf(2.0))).epsilon(1e-13));
  CHECK(builtin("f2").domain.a() == -1.0);
  CHECK(builtin("f2").domain.b() == 2.0);
}

TEST_CASE("builtin registry") {
  for (const std::string& id : builtin_ids()) CHECK(builtin(id).id == id);
  CHECK_THROWS_AS(builtin("f5"), InvalidArgument);
  CHECK_THROWS_AS(builtin("filter", FilterParams{0.4, 0.2, 0.0}), InvalidArgument);
  const TestFunction custom = builtin("filter", FilterParams{0.0, 0.5, 0.1});
  CHECK(custom.params->width == 0.5);
}

TEST_CASE("custom table") {
  const TestFunction t = custom_table({1.0, 0.0, 2.0}, {3.0, 1.0, 5.0});
  CHECK(t.domain.a() == 0.0);
  CHECK(t.domain.b() == 2.0);
  CHECK(t(0.5) == Approx(2.0));
  CHECK(t(2.0) == 5.0);
  CHECK(t.sample_x.size() == 3);
  CHECK_THROWS_AS(custom_table({0.0}, {1.0}), InvalidArgument);
  CHECK_THROWS_AS(custom_table({0.0, 0.0}, {1.0, 2.0}), InvalidArgument);
  CHECK_THROWS_AS(custom_table({0.0, 1.0}, {1.0, NAN}), InvalidArgument);
  CHECK_THROWS_AS(custom_table({0.0, 1.0}, {1.0}), InvalidArgument);
}
