#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace ratmin {

enum class Relation { LessEqual, GreaterEqual };

struct LpRow {
  std::vector<double> coeffs;
  Relation relation;
  double rhs;
};

/// minimize objective . y  subject to rows, y free (no sign restriction).
struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<LpRow> rows;

  LinearProgram() = default;
  explicit LinearProgram(std::size_t n) : num_vars(n), objective(n, 0.0) {}

  void add_row(std::vector<double> coeffs, Relation rel, double rhs);
  /// Throws InvalidArgument on size mismatch or non-finite data.
  void validate() const;
};

enum class LpStatus {
  Optimal,
  Infeasible,
  Unbounded,
  /// Only with an early-exit threshold: the optimum is certified to exceed
  /// the threshold. objective_value holds the certifying lower bound.
  AboveThreshold,
};

std::string_view to_string(LpStatus s) noexcept;

struct LpOutcome {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> solution;  ///< set when Optimal
  double objective_value = 0.0;
  std::size_t iterations = 0;
  /// Worst row violation of `solution` on the unscaled rows (Optimal only).
  double max_violation = 0.0;
};

struct LpOptions {
  /// Stop once the optimum is known to be above this value.
  std::optional<double> early_exit_threshold;
  /// 0 selects the default cap 50 * (num_vars + rows).
  std::size_t max_iterations = 0;
};

/// Feasibility tolerance used for the Optimal certificate: 1e-8 * (1 + |rhs|).
double lp_feasibility_tolerance(double rhs) noexcept;

/// Dense simplex solve. Throws LpCyclingError when the iteration cap is hit
/// and NumericalError when an Optimal point fails its feasibility re-check.
LpOutcome solve_lp(const LinearProgram& lp, const LpOptions& opts = {});

/// Plain-text row list, one constraint per line, for offline inspection.
void dump_lp(std::ostream& os, const LinearProgram& lp);

}  // namespace ratmin
