// Brute-force reference for two-variable LPs, shared by the unit and
// acceptance tests.
#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "ratmin/lp.hpp"
#include "ratmin/random.hpp"

namespace ratmin::testing {

struct OracleResult {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
};

inline bool row_holds(const LpRow& r, double x, double y, double tol) {
  const double lhs = r.coeffs[0] * x + r.coeffs[1] * y;
  const double slack = tol * (1.0 + std::abs(r.rhs));
  return r.relation == Relation::LessEqual ? lhs <= r.rhs + slack : lhs >= r.rhs - slack;
}

inline bool direction_recedes(const LpRow& r, double dx, double dy) {
  const double lhs = r.coeffs[0] * dx + r.coeffs[1] * dy;
  const double tol = 1e-12 * (std::abs(r.coeffs[0]) + std::abs(r.coeffs[1]));
  return r.relation == Relation::LessEqual ? lhs <= tol : lhs >= -tol;
}

// Candidates: pairwise line intersections (the vertices), the projection of
// the origin onto every line (covers regions without vertices) and the origin.
// Unboundedness: a feasible region plus an improving direction among +-a_i,
// +-perp(a_i) and -c that lies in the recession cone.
inline OracleResult vertex_oracle(const LinearProgram& lp) {
  const auto& rows = lp.rows;
  const double c0 = lp.objective[0];
  const double c1 = lp.objective[1];
  std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double a = rows[i].coeffs[0], b = rows[i].coeffs[1], r = rows[i].rhs;
    const double nn = a * a + b * b;
    if (nn > 0.0) pts.emplace_back(a * r / nn, b * r / nn);
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      const double c = rows[j].coeffs[0], d = rows[j].coeffs[1], s = rows[j].rhs;
      const double det = a * d - b * c;
      if (std::abs(det) < 1e-12 * (1.0 + nn)) continue;
      pts.emplace_back((r * d - b * s) / det, (a * s - r * c) / det);
    }
  }
  bool feasible = false;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [x, y] : pts) {
    bool ok = true;
    for (const LpRow& row : rows) ok = ok && row_holds(row, x, y, 1e-9);
    if (ok) {
      feasible = true;
      best = std::min(best, c0 * x + c1 * y);
    }
  }
  if (!feasible) return {LpStatus::Infeasible, 0.0};

  std::vector<std::pair<double, double>> dirs{{-c0, -c1}};
  for (const LpRow& row : rows) {
    const double a = row.coeffs[0], b = row.coeffs[1];
    dirs.emplace_back(a, b);
    dirs.emplace_back(-a, -b);
    dirs.emplace_back(-b, a);
    dirs.emplace_back(b, -a);
  }
  for (const auto& [dx, dy] : dirs) {
    const double len = std::hypot(dx, dy);
    if (len == 0.0) continue;
    if ((c0 * dx + c1 * dy) / len >= -1e-12) continue;
    bool recedes = true;
    for (const LpRow& row : rows) recedes = recedes && direction_recedes(row, dx / len, dy / len);
    if (recedes) return {LpStatus::Unbounded, 0.0};
  }
  return {LpStatus::Optimal, best};
}

// Random LP with num_vars variables and num_rows rows. Integer data makes
// degenerate vertices and parallel rows common.
inline LinearProgram random_lp(CounterRng& rng, std::size_t num_vars,
                               std::size_t num_rows, bool integer_data) {
  auto draw = [&](double lo, double hi) {
    const double v = rng.uniform(lo, hi);
    return integer_data ? std::round(v) : v;
  };
  LinearProgram lp(num_vars);
  for (double& c : lp.objective) c = draw(-3.0, 3.0);
  for (std::size_t i = 0; i < num_rows; ++i) {
    std::vector<double> a(num_vars);
    for (double& v : a) v = draw(-3.0, 3.0);
    const Relation rel = rng.uniform() < 0.5 ? Relation::LessEqual : Relation::GreaterEqual;
    lp.add_row(std::move(a), rel, draw(-5.0, 5.0));
  }
  return lp;
}

/// Largest row violation of y, each scaled by 1 + |rhs|.
inline double scaled_violation(const LinearProgram& lp, const std::vector<double>& y) {
  double worst = 0.0;
  for (const LpRow& r : lp.rows) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < lp.num_vars; ++j) lhs += r.coeffs[j] * y[j];
    const double v = r.relation == Relation::LessEqual ? lhs - r.rhs : r.rhs - lhs;
    worst = std::max(worst, v / (1.0 + std::abs(r.rhs)));
  }
  return worst;
}

}  // namespace ratmin::testing
