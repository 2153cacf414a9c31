#include "ratmin/lp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <ostream>
#include <sstream>
#include <string>

#include "ratmin/errors.hpp"

// The programs handed to this solver have few free variables (tens) and many
// inequality rows (thousands). Running the simplex method on the primal in
// standard form would carry one slack per row in the basis. Instead we run a
// two-phase revised simplex on the dual
//
//     minimize  b . lambda   s.t.  A^T lambda = -c,  lambda >= 0,
//
// whose basis has only num_vars columns. The simplex multipliers of an
// optimal dual basis are an optimal primal point, and every dual-feasible
// basis yields a lower bound on the primal optimum, which is what the
// early-exit threshold uses.

namespace ratmin {

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kHarrisTol = 1e-11;
constexpr double kPhaseOneTol = 1e-9;
constexpr double kDriveOutTol = 1e-9;

// All rows as a . y <= b, each scaled so max |a_j| = 1. All-zero rows are
// dropped (or flag infeasibility).
struct Standardized {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  // Reduced-cost threshold per row that keeps the unscaled violation well
  // inside lp_feasibility_tolerance.
  Eigen::VectorXd price_tol;
  bool trivially_infeasible = false;
};

Standardized standardize(const LinearProgram& lp) {
  const auto nv = static_cast<Eigen::Index>(lp.num_vars);
  std::vector<std::size_t> keep;
  std::vector<double> scale;
  std::vector<double> magnitude;
  Standardized out;
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    const LpRow& row = lp.rows[i];
    double s = 0.0;
    for (double v : row.coeffs) s = std::max(s, std::abs(v));
    const double sign = row.relation == Relation::LessEqual ? 1.0 : -1.0;
    if (s == 0.0) {
      if (sign * row.rhs < -lp_feasibility_tolerance(row.rhs)) {
        out.trivially_infeasible = true;
      }
      continue;
    }
    keep.push_back(i);
    scale.push_back(sign / s);
    magnitude.push_back(s);
  }
  out.a.resize(static_cast<Eigen::Index>(keep.size()), nv);
  out.b.resize(static_cast<Eigen::Index>(keep.size()));
  out.price_tol.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const LpRow& row = lp.rows[keep[k]];
    const auto r = static_cast<Eigen::Index>(k);
    for (Eigen::Index j = 0; j < nv; ++j) {
      out.a(r, j) = row.coeffs[static_cast<std::size_t>(j)] * scale[k];
    }
    out.b(r) = row.rhs * scale[k];
    out.price_tol(r) = 0.05 * lp_feasibility_tolerance(row.rhs) / magnitude[k];
  }
  return out;
}

enum class CoreResult { Optimal, DualInfeasible, DualUnbounded, AboveThreshold };

struct CoreOutcome {
  CoreResult result;
  Eigen::VectorXd y;
  double lower_bound = 0.0;
};

class DualSimplex {
 public:
  DualSimplex(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
              const Eigen::VectorXd& price_tol, const Eigen::VectorXd& c,
              std::optional<double> threshold,
              std::size_t max_iterations, std::size_t& iterations)
      : a_(a),
        b_(b),
        price_tol_(price_tol),
        c_(c),
        threshold_(threshold),
        max_iterations_(max_iterations),
        iterations_(iterations),
        rows_(a.rows()),
        eqs_(a.cols()) {
    sign_.resize(eqs_);
    h_.resize(eqs_);
    for (Eigen::Index r = 0; r < eqs_; ++r) {
      sign_(r) = -c_(r) < 0.0 ? -1.0 : 1.0;
      h_(r) = std::abs(c_(r));
    }
    basis_.resize(static_cast<std::size_t>(eqs_));
    is_basic_.assign(static_cast<std::size_t>(rows_ + eqs_), false);
    for (Eigen::Index r = 0; r < eqs_; ++r) {
      basis_[static_cast<std::size_t>(r)] = rows_ + r;
      is_basic_[static_cast<std::size_t>(rows_ + r)] = true;
    }
  }

  CoreOutcome run() {
    if (!iterate(/*phase=*/1)) {
      return {CoreResult::DualUnbounded, {}, 0.0};  // unreachable in phase 1
    }
    factor();
    double infeas = 0.0;
    for (std::size_t k = 0; k < basis_.size(); ++k) {
      if (basis_[k] >= rows_) infeas += std::max(0.0, x_(static_cast<Eigen::Index>(k)));
    }
    if (infeas > kPhaseOneTol * std::max(1.0, h_.lpNorm<Eigen::Infinity>())) {
      return {CoreResult::DualInfeasible, {}, 0.0};
    }
    drive_out_artificials();
    above_threshold_ = false;
    if (!iterate(/*phase=*/2)) return {CoreResult::DualUnbounded, {}, 0.0};
    if (above_threshold_) {
      return {CoreResult::AboveThreshold, {}, lower_bound_};
    }
    return {CoreResult::Optimal, y_, lower_bound_};
  }

 private:
  Eigen::VectorXd column(Eigen::Index j) const {
    if (j < rows_) return sign_.cwiseProduct(a_.row(j).transpose());
    Eigen::VectorXd e = Eigen::VectorXd::Zero(eqs_);
    e(j - rows_) = 1.0;
    return e;
  }

  double cost(Eigen::Index j, int phase) const {
    if (phase == 1) return j >= rows_ ? 1.0 : 0.0;
    return j >= rows_ ? 0.0 : b_(j);
  }

  void factor() {
    Eigen::MatrixXd basis_matrix(eqs_, eqs_);
    for (Eigen::Index k = 0; k < eqs_; ++k) {
      basis_matrix.col(k) = column(basis_[static_cast<std::size_t>(k)]);
    }
    lu_.compute(basis_matrix);
    x_ = lu_.solve(h_);
  }

  void price(int phase) {
    Eigen::VectorXd cb(eqs_);
    for (Eigen::Index k = 0; k < eqs_; ++k) {
      cb(k) = cost(basis_[static_cast<std::size_t>(k)], phase);
    }
    const Eigen::VectorXd pi = lu_.transpose().solve(cb);
    y_ = sign_.cwiseProduct(pi);
    objective_ = cb.dot(x_.cwiseMax(0.0));
    if (phase == 1) {
      d_ = -(a_ * y_);
    } else {
      d_ = b_ - a_ * y_;
    }
  }

  // Runs simplex iterations for one phase. Returns false on dual
  // unboundedness.
  bool iterate(int phase) {
    std::size_t degenerate_run = 0;
    const std::size_t bland_after = 10 * static_cast<std::size_t>(eqs_);
    for (;;) {
      factor();
      if (lu_.rcond() < 1e-14) {
        throw NumericalError("simplex basis became singular");
      }
      price(phase);
      if (phase == 2 && threshold_) {
        // Any dual-feasible basis bounds the primal optimum from below.
        lower_bound_ = -objective_;
        const double noise = 1e-12 * (1.0 + std::abs(objective_));
        if (lower_bound_ - noise > *threshold_) {
          above_threshold_ = true;
          return true;
        }
      }
      const double opt_tol =
          1e-11 * std::max(1.0, y_.lpNorm<Eigen::Infinity>());
      const bool bland = degenerate_run >= bland_after;
      Eigen::Index entering = -1;
      double best = 0.0;
      for (Eigen::Index j = 0; j < rows_; ++j) {
        if (is_basic_[static_cast<std::size_t>(j)]) continue;
        if (d_(j) >= -std::min(opt_tol, price_tol_(j))) continue;
        if (entering < 0 || d_(j) < best) {
          entering = j;
          if (bland) break;
          best = d_(j);
        }
      }
      if (entering < 0) {
        if (phase == 2) lower_bound_ = -objective_;
        return true;
      }

      if (++iterations_ > max_iterations_) {
        throw LpCyclingError("simplex iteration cap exceeded (" +
                                 std::to_string(max_iterations_) + ")",
                             iterations_);
      }

      const Eigen::VectorXd u = lu_.solve(column(entering));
      // Harris two-pass ratio test.
      double step_cap = std::numeric_limits<double>::infinity();
      for (Eigen::Index k = 0; k < eqs_; ++k) {
        const bool fixed_artificial =
            phase == 2 && basis_[static_cast<std::size_t>(k)] >= rows_;
        if (fixed_artificial) {
          if (std::abs(u(k)) > kPivotTol) step_cap = 0.0;
          continue;
        }
        if (u(k) > kPivotTol) {
          step_cap = std::min(step_cap, (std::max(0.0, x_(k)) + kHarrisTol) / u(k));
        }
      }
      if (!std::isfinite(step_cap)) {
        if (phase == 1) throw NumericalError("phase one became unbounded");
        return false;
      }
      Eigen::Index leave = -1;
      double leave_ratio = 0.0;
      for (Eigen::Index k = 0; k < eqs_; ++k) {
        const bool fixed_artificial =
            phase == 2 && basis_[static_cast<std::size_t>(k)] >= rows_;
        double ratio;
        double mag = std::abs(u(k));
        if (fixed_artificial) {
          if (mag <= kPivotTol) continue;
          ratio = 0.0;
        } else {
          if (u(k) <= kPivotTol) continue;
          ratio = std::max(0.0, x_(k)) / u(k);
        }
        if (ratio > step_cap) continue;
        bool take = leave < 0;
        if (!take) {
          if (bland) {
            take = basis_[static_cast<std::size_t>(k)] <
                   basis_[static_cast<std::size_t>(leave)];
          } else {
            take = mag > std::abs(u(leave));
          }
        }
        if (take) {
          leave = k;
          leave_ratio = ratio;
        }
      }
      if (leave_ratio * std::abs(d_(entering)) <= 1e-14) {
        ++degenerate_run;
      } else {
        degenerate_run = 0;
      }
      auto& slot = basis_[static_cast<std::size_t>(leave)];
      is_basic_[static_cast<std::size_t>(slot)] = false;
      slot = entering;
      is_basic_[static_cast<std::size_t>(entering)] = true;
    }
  }

  // Replaces zero-level artificials by real columns where the basis allows;
  // the rest sit on redundant equations and stay pinned at zero.
  void drive_out_artificials() {
    for (std::size_t k = 0; k < basis_.size(); ++k) {
      if (basis_[k] < rows_) continue;
      factor();
      Eigen::VectorXd e = Eigen::VectorXd::Zero(eqs_);
      e(static_cast<Eigen::Index>(k)) = 1.0;
      const Eigen::VectorXd rho = lu_.transpose().solve(e);
      const Eigen::VectorXd row = a_ * sign_.cwiseProduct(rho);
      Eigen::Index best = -1;
      double best_mag = kDriveOutTol;
      for (Eigen::Index j = 0; j < rows_; ++j) {
        if (is_basic_[static_cast<std::size_t>(j)]) continue;
        if (std::abs(row(j)) > best_mag) {
          best_mag = std::abs(row(j));
          best = j;
        }
      }
      if (best < 0) continue;
      is_basic_[static_cast<std::size_t>(basis_[k])] = false;
      basis_[k] = best;
      is_basic_[static_cast<std::size_t>(best)] = true;
    }
  }

  const Eigen::MatrixXd& a_;
  const Eigen::VectorXd& b_;
  const Eigen::VectorXd& price_tol_;
  const Eigen::VectorXd& c_;
  std::optional<double> threshold_;
  std::size_t max_iterations_;
  std::size_t& iterations_;
  Eigen::Index rows_;
  Eigen::Index eqs_;

  Eigen::VectorXd sign_;
  Eigen::VectorXd h_;
  std::vector<Eigen::Index> basis_;
  std::vector<bool> is_basic_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  Eigen::VectorXd x_;
  Eigen::VectorXd y_;
  Eigen::VectorXd d_;
  double objective_ = 0.0;
  double lower_bound_ = 0.0;
  bool above_threshold_ = false;
};

double row_violation(const LpRow& row, std::span<const double> y) {
  double lhs = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) lhs += row.coeffs[j] * y[j];
  return row.relation == Relation::LessEqual ? lhs - row.rhs : row.rhs - lhs;
}

}  // namespace

void LinearProgram::add_row(std::vector<double> coeffs, Relation rel,
                            double rhs) {
  rows.push_back({std::move(coeffs), rel, rhs});
}

void LinearProgram::validate() const {
  if (num_vars == 0) throw InvalidArgument("linear program has no variables");
  if (objective.size() != num_vars) {
    throw InvalidArgument("objective length does not match num_vars");
  }
  for (double v : objective) {
    if (!std::isfinite(v)) throw InvalidArgument("non-finite objective entry");
  }
  for (const auto& row : rows) {
    if (row.coeffs.size() != num_vars) {
      throw InvalidArgument("row length does not match num_vars");
    }
    if (!std::isfinite(row.rhs)) throw InvalidArgument("non-finite rhs");
    for (double v : row.coeffs) {
      if (!std::isfinite(v)) throw InvalidArgument("non-finite row entry");
    }
  }
}

std::string_view to_string(LpStatus s) noexcept {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::AboveThreshold: return "above-threshold";
  }
  return "unknown";
}

double lp_feasibility_tolerance(double rhs) noexcept {
  return 1e-8 * (1.0 + std::abs(rhs));
}

LpOutcome solve_lp(const LinearProgram& lp, const LpOptions& opts) {
  lp.validate();
  const std::size_t cap = opts.max_iterations != 0
                              ? opts.max_iterations
                              : 50 * (lp.num_vars + lp.rows.size());
  LpOutcome out;
  const Standardized st = standardize(lp);
  if (st.trivially_infeasible) {
    out.status = LpStatus::Infeasible;
    return out;
  }
  const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(
      lp.objective.data(), static_cast<Eigen::Index>(lp.num_vars));

  DualSimplex main(st.a, st.b, st.price_tol, c, opts.early_exit_threshold, cap,
                   out.iterations);
  const CoreOutcome core = main.run();
  switch (core.result) {
    case CoreResult::DualUnbounded:
      out.status = LpStatus::Infeasible;
      return out;
    case CoreResult::AboveThreshold:
      out.status = LpStatus::AboveThreshold;
      out.objective_value = core.lower_bound;
      return out;
    case CoreResult::DualInfeasible: {
      // The primal is unbounded or infeasible. Decide by minimizing the
      // uniform slack t in a . y - t <= b, t >= 0, whose dual is feasible.
      const Eigen::Index nv = st.a.cols();
      Eigen::MatrixXd aux(st.a.rows() + 1, nv + 1);
      aux.setZero();
      aux.topLeftCorner(st.a.rows(), nv) = st.a;
      aux.col(nv).head(st.a.rows()).setConstant(-1.0);
      aux(st.a.rows(), nv) = -1.0;
      Eigen::VectorXd aux_b(st.a.rows() + 1);
      aux_b.head(st.a.rows()) = st.b;
      aux_b(st.a.rows()) = 0.0;
      Eigen::VectorXd aux_c = Eigen::VectorXd::Zero(nv + 1);
      aux_c(nv) = 1.0;
      Eigen::VectorXd aux_tol(aux_b.size());
      for (Eigen::Index i = 0; i < aux_b.size(); ++i) {
        aux_tol(i) = 0.05 * lp_feasibility_tolerance(aux_b(i));
      }
      DualSimplex phase(aux, aux_b, aux_tol, aux_c, std::nullopt, cap,
                        out.iterations);
      const CoreOutcome slack = phase.run();
      if (slack.result != CoreResult::Optimal) {
        throw NumericalError("auxiliary feasibility problem did not solve");
      }
      out.status = slack.y(nv) <= kPhaseOneTol ? LpStatus::Unbounded
                                              : LpStatus::Infeasible;
      return out;
    }
    case CoreResult::Optimal:
      break;
  }

  out.status = LpStatus::Optimal;
  out.solution.assign(core.y.data(), core.y.data() + core.y.size());
  out.objective_value = 0.0;
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    out.objective_value += lp.objective[j] * out.solution[j];
  }
  for (const auto& row : lp.rows) {
    const double v = row_violation(row, out.solution);
    out.max_violation = std::max(out.max_violation, v);
    if (v > lp_feasibility_tolerance(row.rhs)) {
      std::ostringstream msg;
      msg << "optimal point violates a row by " << v;
      throw NumericalError(msg.str());
    }
  }
  return out;
}

void dump_lp(std::ostream& os, const LinearProgram& lp) {
  os.precision(17);
  os << "vars " << lp.num_vars << "\nminimize";
  for (double v : lp.objective) os << ' ' << v;
  os << '\n';
  for (const auto& row : lp.rows) {
    for (double v : row.coeffs) os << v << ' ';
    os << (row.relation == Relation::LessEqual ? "<=" : ">=") << ' '
       << row.rhs << '\n';
  }
}

}  // namespace ratmin
