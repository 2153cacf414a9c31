#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace ratmin {

using Vector = std::vector<double>;

/// Square real matrix, row-major.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t dim, double fill = 0.0);
  DenseMatrix(std::size_t dim, std::vector<double> row_major);

  static DenseMatrix identity(std::size_t dim);
  static DenseMatrix diagonal(std::span<const double> diag);

  std::size_t dim() const noexcept { return dim_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * dim_ + j];
  }
  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  DenseMatrix transpose() const;
  Vector column(std::size_t j) const;
  double frobenius_norm() const noexcept;
  double max_abs() const noexcept;
  bool all_finite() const noexcept;

  DenseMatrix& operator+=(const DenseMatrix& o);
  DenseMatrix& operator-=(const DenseMatrix& o);
  DenseMatrix& operator*=(double s) noexcept;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator*(double s, DenseMatrix a);

/// out = a * b. `out` must not alias `a` or `b`.
void multiply_into(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);
DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);

Vector operator*(const DenseMatrix& a, std::span<const double> v);

double norm2(std::span<const double> v) noexcept;

/// LU factorization with partial pivoting.
class LuFactorization {
 public:
  explicit LuFactorization(const DenseMatrix& a);
  ~LuFactorization();
  LuFactorization(LuFactorization&&) noexcept;
  LuFactorization& operator=(LuFactorization&&) noexcept;

  std::size_t dim() const noexcept { return dim_; }
  /// min_i |U_ii|.
  double min_pivot() const noexcept { return min_pivot_; }
  /// True when min |U_ii| < rel_tol * ||A||_inf.
  bool singular(double rel_tol = 1e-14) const noexcept;

  Vector solve(std::span<const double> b) const;
  DenseMatrix solve(const DenseMatrix& b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::size_t dim_ = 0;
  double min_pivot_ = 0.0;
  double norm_inf_ = 0.0;
};

}  // namespace ratmin
