#include "ratmin/builtins.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ratmin/errors.hpp"
#include "ratmin/special.hpp"

namespace ratmin {

void FilterParams::validate() const {
  if (!(rise > 0.0) || !(width >= 0.0) || !std::isfinite(center)) {
    throw InvalidArgument("filter requires rise > 0 and width >= 0");
  }
}

double band_bell(double x, const FilterParams& p) noexcept {
  return 0.5 * (1.0 - erf((2.0 * std::abs(x - p.center) - p.width) / p.rise));
}

double band_filter(double x, const FilterParams& p) noexcept {
  return x * band_bell(x, p);
}

double spline_f1(double x) noexcept {
  if (x < 1.0) return ((-x + 6.0) * x - 6.0) * x + 2.0;
  return x * x * x;
}

double cusp_f2(double x) noexcept { return std::cbrt(x * x); }

double oscillatory_f3(double x) noexcept {
  return std::cos(9.0 * x) + std::sin(11.0 * x);
}

double shifted_abs_f4(double x) noexcept { return std::abs(x - 0.1); }

double relu(double x) noexcept { return x > 0.0 ? x : 0.0; }

FilterParams default_filter_params() { return {0.4, 0.2, 0.05}; }
FilterParams default_bell_params() { return {0.4, 0.2, 0.1}; }

std::vector<std::string> builtin_ids() {
  return {"f1", "f2", "f3", "f4", "filter", "bell", "relu"};
}

TestFunction builtin(std::string_view id, std::optional<FilterParams> params) {
  if (id == "f1") return {"f1", Domain(0.0, 3.0), spline_f1, {}, {}, {}};
  if (id == "f2") return {"f2", Domain(-1.0, 2.0), cusp_f2, {}, {}, {}};
  if (id == "f3") return {"f3", Domain(-1.0, 1.0), oscillatory_f3, {}, {}, {}};
  if (id == "f4") return {"f4", Domain(-0.5, 0.5), shifted_abs_f4, {}, {}, {}};
  if (id == "relu") return {"relu", Domain(-1.0, 1.0), relu, {}, {}, {}};
  if (id == "filter" || id == "bell") {
    const bool bell = id == "bell";
    FilterParams p =
        params.value_or(bell ? default_bell_params() : default_filter_params());
    p.validate();
    ScalarFunction f = bell ? ScalarFunction([p](double x) { return band_bell(x, p); })
                            : ScalarFunction([p](double x) { return band_filter(x, p); });
    return {std::string(id), Domain(-1.0, 1.0), std::move(f), p, {}, {}};
  }
  throw InvalidArgument("unknown function id '" + std::string(id) + "'");
}

TestFunction custom_table(std::vector<double> x, std::vector<double> f) {
  if (x.size() != f.size() || x.size() < 2) {
    throw InvalidArgument("custom table needs at least two (x, f) samples");
  }
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
  std::vector<double> xs, fs;
  for (std::size_t i : order) {
    if (!std::isfinite(x[i]) || !std::isfinite(f[i])) {
      throw InvalidArgument("custom table contains a non-finite value");
    }
    if (!xs.empty() && xs.back() == x[i]) {
      throw InvalidArgument("custom table has duplicate abscissae");
    }
    xs.push_back(x[i]);
    fs.push_back(f[i]);
  }
  Domain d(xs.front(), xs.back());
  ScalarFunction interp = [xs, fs](double t) {
    if (t <= xs.front()) return fs.front();
    if (t >= xs.back()) return fs.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), t);
    const auto i = static_cast<std::size_t>(it - xs.begin());
    const double w = (t - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return (1.0 - w) * fs[i - 1] + w * fs[i];
  };
  return {"custom-table", d, std::move(interp), std::nullopt, xs, fs};
}

}  // namespace ratmin
