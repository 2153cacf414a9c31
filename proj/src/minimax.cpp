#include "ratmin/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ratmin/errors.hpp"

namespace ratmin {

namespace {

constexpr std::size_t kMaxDoublings = 50;

RationalApproximant witness_from(const FitProblem& p,
                                 const std::vector<double>& y) {
  const std::size_t n = p.num_degree;
  const std::size_t m = p.den_degree;
  std::vector<double> num(y.begin(), y.begin() + static_cast<long>(n + 1));
  std::vector<double> den(y.begin() + static_cast<long>(n + 1),
                          y.begin() + static_cast<long>(n + m + 2));
  return RationalApproximant(p.domain, ChebCoeffs(std::move(num)),
                             ChebCoeffs(std::move(den)), p.bounds);
}

}  // namespace

FitProblem FitProblem::sample(const ScalarFunction& f, const Domain& domain,
                              const Grid& grid, std::size_t num_degree,
                              std::size_t den_degree, BoundSpec bounds,
                              double epsilon) {
  std::vector<double> values;
  values.reserve(grid.size());
  for (double x : grid) values.push_back(f(x));
  return FitProblem{domain,     grid,       std::move(values), num_degree,
                    den_degree, bounds,     epsilon};
}

void FitProblem::validate() const {
  bounds.validate();
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidArgument("bisection precision must be positive");
  }
  if (values.size() != grid.size()) {
    throw InvalidArgument("value count does not match grid size");
  }
  if (grid.size() < num_degree + den_degree + 2) {
    throw InvalidArgument("grid needs at least n+m+2 points (have " +
                          std::to_string(grid.size()) + ")");
  }
  if (!grid.inside(domain)) {
    throw InvalidArgument("grid points lie outside the domain");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidArgument("non-finite target value");
  }
}

LinearProgram assemble_feasibility(const FitProblem& p, double z) {
  if (!(z >= 0.0)) throw InvalidArgument("error level must be nonnegative");
  const std::size_t n = p.num_degree;
  const std::size_t m = p.den_degree;
  const std::size_t nv = p.num_lp_vars();
  const std::size_t theta = nv - 1;

  LinearProgram lp(nv);
  lp.objective[theta] = 1.0;
  lp.rows.reserve(p.grid.size() * (p.bounds.positive ? 5 : 4));

  std::vector<double> g(n + 1);
  std::vector<double> h(m + 1);
  for (std::size_t i = 0; i < p.grid.size(); ++i) {
    const double t = map_to_ref(p.domain, p.grid[i]);
    cheb_vector_into(t, g);
    cheb_vector_into(t, h);
    const double f = p.values[i];

    // (f - z) q - p - theta <= 0
    std::vector<double> below(nv, 0.0);
    // p - (f + z) q - theta <= 0
    std::vector<double> above(nv, 0.0);
    std::vector<double> q_row(nv, 0.0);
    for (std::size_t j = 0; j <= n; ++j) {
      below[j] = -g[j];
      above[j] = g[j];
    }
    for (std::size_t j = 0; j <= m; ++j) {
      below[n + 1 + j] = (f - z) * h[j];
      above[n + 1 + j] = -(f + z) * h[j];
      q_row[n + 1 + j] = h[j];
    }
    below[theta] = -1.0;
    above[theta] = -1.0;
    lp.add_row(std::move(below), Relation::LessEqual, 0.0);
    lp.add_row(std::move(above), Relation::LessEqual, 0.0);
    lp.add_row(q_row, Relation::GreaterEqual, p.bounds.lower);
    lp.add_row(std::move(q_row), Relation::LessEqual, p.bounds.upper);
    if (p.bounds.positive) {
      std::vector<double> p_row(nv, 0.0);
      std::copy(g.begin(), g.end(), p_row.begin());
      lp.add_row(std::move(p_row), Relation::GreaterEqual, 0.0);
    }
  }
  return lp;
}

LevelResult check_level(const FitProblem& p, double z) {
  const LinearProgram lp = assemble_feasibility(p, z);
  LpOptions opts;
  opts.early_exit_threshold = kThetaTolerance;
  LpOutcome out;
  try {
    out = solve_lp(lp, opts);
  } catch (const LpCyclingError& e) {
    throw LpCyclingError(std::string(e.what()) + " at level z=" +
                             std::to_string(z),
                         e.iterations());
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(e.what()) + " at level z=" +
                         std::to_string(z));
  }

  LevelResult res;
  res.lp_iterations = out.iterations;
  res.theta = out.objective_value;
  switch (out.status) {
    case LpStatus::Optimal:
      res.feasible = out.objective_value <= kThetaTolerance;
      if (res.feasible) res.witness = witness_from(p, out.solution);
      break;
    case LpStatus::AboveThreshold:
      res.feasible = false;
      break;
    case LpStatus::Infeasible:
    case LpStatus::Unbounded:
      // theta is free and the bound rows are consistent, so neither status
      // is possible for a valid problem.
      throw NumericalError("feasibility LP reported " +
                           std::string(to_string(out.status)) +
                           " at level z=" + std::to_string(z));
  }
  return res;
}

FitReport fit(const FitProblem& p) {
  p.validate();
  const auto [lo_it, hi_it] = std::minmax_element(p.values.begin(), p.values.end());
  double z_hi = 0.5 * (*hi_it - *lo_it);
  if (p.bounds.positive) {
    z_hi = std::max(std::abs(*lo_it), std::abs(*hi_it));
  }

  std::vector<LevelCheck> trace;
  std::size_t lp_iterations = 0;
  auto probe = [&](double z) {
    LevelResult r = check_level(p, z);
    trace.push_back({z, r.feasible, r.theta});
    lp_iterations += r.lp_iterations;
    return r;
  };

  const double z_initial = z_hi;
  LevelResult top = probe(z_hi);
  std::size_t doublings = 0;
  if (!top.feasible && z_hi == 0.0) {
    // Only reachable with side constraints that forbid an exact fit of a
    // constant; restart the doubling from epsilon.
    z_hi = p.epsilon;
    top = probe(z_hi);
  }
  while (!top.feasible) {
    if (doublings == kMaxDoublings) {
      throw UnsatisfiableError(
          "no feasible error level found after " +
          std::to_string(kMaxDoublings) + " doublings; constraints are "
          "unsatisfiable on this grid");
    }
    z_hi *= 2.0;
    ++doublings;
    top = probe(z_hi);
  }

  RationalApproximant best = *top.witness;
  double lo = 0.0;
  double hi = z_hi;
  std::size_t iterations = 0;
  while (hi - lo > p.epsilon) {
    const double z = lo + 0.5 * (hi - lo);
    LevelResult r = probe(z);
    if (r.feasible) {
      hi = z;
      best = std::move(*r.witness);
    } else {
      lo = z;
    }
    ++iterations;
  }

  return FitReport{std::move(best), lo,         hi,
                   z_initial,       iterations, doublings,
                   lp_iterations,   std::move(trace)};
}

}  // namespace ratmin
