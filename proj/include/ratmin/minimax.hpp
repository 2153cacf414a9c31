#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ratmin/cheb.hpp"
#include "ratmin/lp.hpp"
#include "ratmin/rational.hpp"

namespace ratmin {

/// Discrete constrained minimax problem: find p/q with deg p <= num_degree,
/// deg q <= den_degree minimizing max_i |values_i - p(x_i)/q(x_i)| subject to
/// the BoundSpec at the grid points.
struct FitProblem {
  Domain domain;
  Grid grid;
  std::vector<double> values;
  std::size_t num_degree = 0;  ///< n
  std::size_t den_degree = 0;  ///< m
  BoundSpec bounds;
  double epsilon = 1e-12;

  /// Samples f on grid; domain defaults to the grid hull.
  static FitProblem sample(const ScalarFunction& f, const Domain& domain,
                           const Grid& grid, std::size_t num_degree,
                           std::size_t den_degree, BoundSpec bounds,
                           double epsilon = 1e-12);

  std::size_t num_lp_vars() const noexcept {
    return num_degree + den_degree + 3;
  }
  /// Throws InvalidArgument when an invariant fails.
  void validate() const;
};

/// An LP is declared feasible when min theta <= this.
inline constexpr double kThetaTolerance = 1e-9;

/// Variables (alpha_0..alpha_n, beta_0..beta_m, theta); minimize theta.
/// Per grid point: (f-z) q - p <= theta, p - (f+z) q <= theta, q >= lower,
/// q <= upper, and p >= 0 when positivity is requested.
LinearProgram assemble_feasibility(const FitProblem& p, double z);

struct LevelResult {
  bool feasible = false;
  std::optional<RationalApproximant> witness;
  /// Optimal theta, or a certified lower bound when the LP exited early.
  double theta = 0.0;
  std::size_t lp_iterations = 0;
};

/// Decides whether error level z is attainable. LpCyclingError from the
/// solver is rethrown with z in the message.
LevelResult check_level(const FitProblem& p, double z);

struct LevelCheck {
  double z;
  bool feasible;
  double theta;
};

struct FitReport {
  RationalApproximant approximant;
  double z_lower = 0.0;
  double z_upper = 0.0;
  double z_initial = 0.0;  ///< starting upper level, before any doubling
  std::size_t iterations = 0;  ///< bisection steps
  std::size_t doublings = 0;
  std::size_t lp_iterations = 0;
  std::vector<LevelCheck> level_trace;
};

/// Bisection over the error level. Throws UnsatisfiableError when no level
/// up to z_initial * 2^50 is feasible.
FitReport fit(const FitProblem& p);

}  // namespace ratmin
