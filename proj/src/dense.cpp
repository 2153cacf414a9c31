#include "ratmin/dense.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "ratmin/errors.hpp"

namespace ratmin {

namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMatrix>;
using MutMap = Eigen::Map<RowMatrix>;

ConstMap view(const DenseMatrix& m) {
  const auto k = static_cast<Eigen::Index>(m.dim());
  return ConstMap(m.data().data(), k, k);
}

MutMap view(DenseMatrix& m) {
  const auto k = static_cast<Eigen::Index>(m.dim());
  return MutMap(m.data().data(), k, k);
}

void require_same_dim(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("matrix dimension mismatch");
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t dim, double fill)
    : dim_(dim), data_(dim * dim, fill) {}

DenseMatrix::DenseMatrix(std::size_t dim, std::vector<double> row_major)
    : dim_(dim), data_(std::move(row_major)) {
  if (data_.size() != dim * dim) {
    throw InvalidArgument("matrix data size is not dim*dim");
  }
}

DenseMatrix DenseMatrix::identity(std::size_t dim) {
  DenseMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> diag) {
  DenseMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

Vector DenseMatrix::column(std::size_t j) const {
  Vector c(dim_);
  for (std::size_t i = 0; i < dim_; ++i) c[i] = (*this)(i, j);
  return c;
}

double DenseMatrix::frobenius_norm() const noexcept {
  return norm2(data_);
}

double DenseMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool DenseMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& o) {
  require_same_dim(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& o) {
  require_same_dim(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) noexcept {
  for (double& v : data_) v *= s;
  return *this;
}

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }

void multiply_into(const DenseMatrix& a, const DenseMatrix& b,
                   DenseMatrix& out) {
  require_same_dim(a, b);
  if (out.dim() != a.dim()) out = DenseMatrix(a.dim());
  view(out).noalias() = view(a) * view(b);
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.dim());
  multiply_into(a, b, out);
  return out;
}

Vector operator*(const DenseMatrix& a, std::span<const double> v) {
  if (v.size() != a.dim()) throw InvalidArgument("vector dimension mismatch");
  Vector out(a.dim());
  const auto k = static_cast<Eigen::Index>(a.dim());
  Eigen::Map<Eigen::VectorXd>(out.data(), k).noalias() =
      view(a) * Eigen::Map<const Eigen::VectorXd>(v.data(), k);
  return out;
}

double norm2(std::span<const double> v) noexcept {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()))
      .norm();
}

struct LuFactorization::Impl {
  Eigen::PartialPivLU<RowMatrix> lu;
};

LuFactorization::LuFactorization(const DenseMatrix& a)
    : impl_(std::make_unique<Impl>()), dim_(a.dim()) {
  if (dim_ == 0) throw InvalidArgument("cannot factor an empty matrix");
  norm_inf_ = view(a).cwiseAbs().rowwise().sum().maxCoeff();
  impl_->lu.compute(view(a));
  min_pivot_ = impl_->lu.matrixLU().diagonal().cwiseAbs().minCoeff();
}

LuFactorization::~LuFactorization() = default;
LuFactorization::LuFactorization(LuFactorization&&) noexcept = default;
LuFactorization& LuFactorization::operator=(LuFactorization&&) noexcept =
    default;

bool LuFactorization::singular(double rel_tol) const noexcept {
  return !(min_pivot_ >= rel_tol * norm_inf_) || norm_inf_ == 0.0;
}

Vector LuFactorization::solve(std::span<const double> b) const {
  if (b.size() != dim_) throw InvalidArgument("rhs dimension mismatch");
  Vector x(dim_);
  const auto k = static_cast<Eigen::Index>(dim_);
  Eigen::Map<Eigen::VectorXd>(x.data(), k) =
      impl_->lu.solve(Eigen::Map<const Eigen::VectorXd>(b.data(), k));
  return x;
}

DenseMatrix LuFactorization::solve(const DenseMatrix& b) const {
  if (b.dim() != dim_) throw InvalidArgument("rhs dimension mismatch");
  DenseMatrix x(dim_);
  view(x) = impl_->lu.solve(view(b));
  return x;
}

}  // namespace ratmin
