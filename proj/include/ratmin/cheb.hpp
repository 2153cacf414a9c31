#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ratmin {

/// Closed interval [a, b] with a < b, both finite.
class Domain {
 public:
  Domain(double a, double b);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double width() const noexcept { return b_ - a_; }
  bool contains(double x) const noexcept { return a_ <= x && x <= b_; }

  friend bool operator==(const Domain&, const Domain&) = default;

 private:
  double a_;
  double b_;
};

/// Chebyshev coefficients c_0..c_k in plain-sum convention:
/// value(t) = sum_j c_j T_j(t). The first coefficient is NOT halved.
class ChebCoeffs {
 public:
  explicit ChebCoeffs(std::vector<double> coeffs);
  ChebCoeffs(std::initializer_list<double> coeffs);

  std::size_t size() const noexcept { return c_.size(); }
  std::size_t degree() const noexcept { return c_.size() - 1; }
  double operator[](std::size_t j) const { return c_[j]; }
  std::span<const double> values() const noexcept { return c_; }
  const std::vector<double>& vec() const noexcept { return c_; }

  /// Every coefficient multiplied by s.
  ChebCoeffs scaled(double s) const;

  friend bool operator==(const ChebCoeffs&, const ChebCoeffs&) = default;

 private:
  std::vector<double> c_;
};

/// Strictly increasing sample points.
class Grid {
 public:
  explicit Grid(std::vector<double> points);

  std::size_t size() const noexcept { return pts_.size(); }
  double operator[](std::size_t i) const { return pts_[i]; }
  std::span<const double> points() const noexcept { return pts_; }
  auto begin() const noexcept { return pts_.begin(); }
  auto end() const noexcept { return pts_.end(); }

  /// True when every point lies inside d.
  bool inside(const Domain& d) const noexcept;

 private:
  std::vector<double> pts_;
};

/// Affine map [a, b] -> [-1, 1]. Points outside [a, b] map outside [-1, 1].
double map_to_ref(const Domain& d, double x) noexcept;

/// Inverse of map_to_ref.
double map_from_ref(const Domain& d, double t) noexcept;

/// (T_0(t), ..., T_k(t)) by the three-term recurrence.
std::vector<double> cheb_vector(double t, std::size_t k);

/// Same as cheb_vector, writing into out (size k+1).
void cheb_vector_into(double t, std::span<double> out) noexcept;

/// sum_j c_j T_j(t) by Clenshaw's backward recurrence.
double clenshaw(const ChebCoeffs& c, double t) noexcept;
double clenshaw(std::span<const double> c, double t) noexcept;

/// The N roots of T_N, ascending.
Grid cheb_nodes(std::size_t n);

/// Chebyshev roots mapped onto d, ascending.
Grid cheb_nodes(const Domain& d, std::size_t n);

/// N equally spaced points on d, endpoints included exactly.
Grid equidistant_grid(const Domain& d, std::size_t n);

/// Coefficients of the degree-k truncated Chebyshev expansion of the function
/// whose values at cheb_nodes(N) are given (ascending node order). Uses the
/// discrete orthogonality of T_0..T_{N-1} on the roots of T_N. Requires k < N.
ChebCoeffs cheb_expand(std::span<const double> values, std::size_t k);

}  // namespace ratmin
