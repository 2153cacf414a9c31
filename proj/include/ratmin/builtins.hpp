#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ratmin/cheb.hpp"
#include "ratmin/rational.hpp"

namespace ratmin {

/// Smoothed band filter parameters: center, width, rise rate.
struct FilterParams {
  double center = 0.4;
  double width = 0.2;
  double rise = 0.05;

  void validate() const;
};

/// F(x) = (x/2) (1 - erf((2|x - c| - R) / rr)).
double band_filter(double x, const FilterParams& p) noexcept;

/// B(x) = (1/2) (1 - erf((2|x - c| - R) / rr)).
double band_bell(double x, const FilterParams& p) noexcept;

double spline_f1(double x) noexcept;
double cusp_f2(double x) noexcept;
double oscillatory_f3(double x) noexcept;
double shifted_abs_f4(double x) noexcept;
double relu(double x) noexcept;

struct TestFunction {
  std::string id;
  Domain domain;
  ScalarFunction f;
  std::optional<FilterParams> params;
  /// Raw samples for custom-table; empty for the analytic functions.
  std::vector<double> sample_x;
  std::vector<double> sample_f;

  double operator()(double x) const { return f(x); }
};

/// One of f1, f2, f3, f4, filter, bell, relu. Throws InvalidArgument for an
/// unknown id. Filter parameters default per function when not given.
TestFunction builtin(std::string_view id,
                     std::optional<FilterParams> params = std::nullopt);

/// Samples (x_i, f_i); x need not be sorted but must be distinct. Between
/// samples the function interpolates linearly.
TestFunction custom_table(std::vector<double> x, std::vector<double> f);

std::vector<std::string> builtin_ids();

FilterParams default_filter_params();
FilterParams default_bell_params();

}  // namespace ratmin
