#include "ratmin/matfun.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "ratmin/errors.hpp"
#include "ratmin/random.hpp"

namespace ratmin {

namespace {

void add_scaled_identity(DenseMatrix& m, double s) {
  for (std::size_t i = 0; i < m.dim(); ++i) m(i, i) += s;
}

// A_hat v without forming A_hat.
void mapped_product(const DenseMatrix& a, const Domain& d,
                    std::span<const double> v, Vector& out) {
  out = a * v;
  const double scale = 2.0 / d.width();
  const double shift = (d.a() + d.b()) / d.width();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = scale * out[i] - shift * v[i];
  }
}

std::optional<double> bound_of(const RationalApproximant& r) {
  if (r.bounds()) return r.bounds()->cond_bound();
  return std::nullopt;
}

LuFactorization factor_denominator(const DenseMatrix& q,
                                   const MatApplyOptions& opts) {
  if (!q.all_finite()) {
    throw NumericalError("denominator matrix has non-finite entries");
  }
  LuFactorization lu(q);
  if (lu.singular(opts.singular_tol)) {
    throw NumericalError(
        "denominator matrix q(A) is singular to working precision; the "
        "spectrum lies outside the region where q was certified positive");
  }
  return lu;
}

}  // namespace

DenseMatrix map_matrix(const Domain& d, const DenseMatrix& a) {
  DenseMatrix out = a;
  out *= 2.0 / d.width();
  add_scaled_identity(out, -(d.a() + d.b()) / d.width());
  return out;
}

DenseMatrix matrix_cheb_poly(const ChebCoeffs& c, const DenseMatrix& a,
                             const Domain& d) {
  const std::size_t k = a.dim();
  const std::size_t deg = c.degree();
  if (deg == 0) {
    DenseMatrix out(k);
    add_scaled_identity(out, c[0]);
    return out;
  }
  const DenseMatrix ah = map_matrix(d, a);
  if (deg == 1) {
    DenseMatrix out = c[1] * ah;
    add_scaled_identity(out, c[0]);
    return out;
  }

  // b_j = c_j I + 2 A_hat b_{j+1} - b_{j+2}; result = c_0 I + A_hat b_1 - b_2.
  // b_deg = c_deg I, so b_{deg-1} needs no product.
  DenseMatrix b2(k);
  add_scaled_identity(b2, c[deg]);
  DenseMatrix b1 = (2.0 * c[deg]) * ah;
  add_scaled_identity(b1, c[deg - 1]);
  DenseMatrix work(k);
  for (std::size_t j = deg - 1; j-- > 1;) {
    multiply_into(ah, b1, work);
    work *= 2.0;
    work -= b2;
    add_scaled_identity(work, c[j]);
    std::swap(b2, b1);
    std::swap(b1, work);
  }
  multiply_into(ah, b1, work);
  work -= b2;
  add_scaled_identity(work, c[0]);
  return work;
}

Vector matrix_cheb_poly_vec(const ChebCoeffs& c, const DenseMatrix& a,
                            std::span<const double> v, const Domain& d) {
  const std::size_t k = a.dim();
  if (v.size() != k) throw InvalidArgument("vector dimension mismatch");
  const std::size_t deg = c.degree();
  Vector b1(k, 0.0), b2(k, 0.0), work(k);
  for (std::size_t j = deg; j >= 1; --j) {
    mapped_product(a, d, b1, work);
    for (std::size_t i = 0; i < k; ++i) {
      work[i] = c[j] * v[i] + 2.0 * work[i] - b2[i];
    }
    std::swap(b2, b1);
    std::swap(b1, work);
  }
  mapped_product(a, d, b1, work);
  for (std::size_t i = 0; i < k; ++i) {
    work[i] = c[0] * v[i] + work[i] - b2[i];
  }
  return work;
}

MatApplyReport rational_apply(const RationalApproximant& r,
                              const DenseMatrix& a,
                              const MatApplyOptions& opts) {
  const DenseMatrix p = matrix_cheb_poly(r.num(), a, r.domain());
  const DenseMatrix q = matrix_cheb_poly(r.den(), a, r.domain());
  const LuFactorization lu = factor_denominator(q, opts);
  DenseMatrix x = lu.solve(p);
  if (opts.refine) x += lu.solve(p - q * x);

  MatApplyReport rep{std::move(x), 0.0, bound_of(r)};
  if (opts.compute_residual) {
    const double pn = p.frobenius_norm();
    if (pn > 0.0) rep.residual = (q * rep.result - p).frobenius_norm() / pn;
  }
  return rep;
}

VecApplyReport rational_apply_vec(const RationalApproximant& r,
                                  const DenseMatrix& a,
                                  std::span<const double> v,
                                  const MatApplyOptions& opts) {
  const Vector w = matrix_cheb_poly_vec(r.num(), a, v, r.domain());
  const DenseMatrix q = matrix_cheb_poly(r.den(), a, r.domain());
  const LuFactorization lu = factor_denominator(q, opts);
  Vector x = lu.solve(w);
  if (opts.refine) {
    Vector res = q * x;
    for (std::size_t i = 0; i < res.size(); ++i) res[i] = w[i] - res[i];
    const Vector dx = lu.solve(res);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
  }

  VecApplyReport rep{std::move(x), 0.0, bound_of(r)};
  if (opts.compute_residual) {
    const double wn = norm2(w);
    if (wn > 0.0) {
      Vector res = q * rep.result;
      for (std::size_t i = 0; i < res.size(); ++i) res[i] -= w[i];
      rep.residual = norm2(res) / wn;
    }
  }
  return rep;
}

NormalMatrix make_normal_matrix_with_basis(const SpectrumSpec& s) {
  const std::size_t k = s.eigenvalues.size();
  if (k == 0) throw InvalidArgument("spectrum must be nonempty");
  for (double l : s.eigenvalues) {
    if (!std::isfinite(l)) throw InvalidArgument("non-finite eigenvalue");
  }
  const auto n = static_cast<Eigen::Index>(k);
  CounterRng rng(s.seed, 0);
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = rng.gaussian();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (qr.matrixQR()(j, j) < 0.0) q.col(j) *= -1.0;
  }
  const Eigen::Map<const Eigen::VectorXd> lam(s.eigenvalues.data(), n);
  Eigen::MatrixXd a = (q * lam.asDiagonal()) * q.transpose();
  a = 0.5 * (a + a.transpose()).eval();

  NormalMatrix out{DenseMatrix(k), DenseMatrix(k), s.eigenvalues};
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      out.a(i, j) = a(ii, jj);
      out.q(i, j) = q(ii, jj);
    }
  }
  return out;
}

DenseMatrix make_normal_matrix(const SpectrumSpec& s) {
  return make_normal_matrix_with_basis(s).a;
}

DenseMatrix exact_function(const NormalMatrix& m, const ScalarFunction& f) {
  const std::size_t k = m.q.dim();
  DenseMatrix qf = m.q;
  for (std::size_t j = 0; j < k; ++j) {
    const double fj = f(m.eigenvalues[j]);
    for (std::size_t i = 0; i < k; ++i) qf(i, j) *= fj;
  }
  return qf * m.q.transpose();
}

Vector exact_function_vec(const NormalMatrix& m, const ScalarFunction& f,
                          std::span<const double> v) {
  Vector w = m.q.transpose() * v;
  for (std::size_t j = 0; j < w.size(); ++j) w[j] *= f(m.eigenvalues[j]);
  return m.q * w;
}

double cond_check(const RationalApproximant& r, const BoundSpec& b,
                  const SpectrumSpec& s) {
  b.validate();
  if (s.eigenvalues.empty()) throw InvalidArgument("spectrum must be nonempty");
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double l : s.eigenvalues) {
    const double q = std::abs(r.denominator(l));
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

double cond2(const DenseMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.dim());
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>>
      a(m.data().data(), n, n);
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  const double lo = s(n - 1);
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return s(0) / lo;
}

double frobenius_rel_error(const DenseMatrix& x, const DenseMatrix& y) {
  if (x.dim() != y.dim()) throw InvalidArgument("matrix dimension mismatch");
  const double yn = y.frobenius_norm();
  const double dn = (x - y).frobenius_norm();
  if (yn == 0.0) {
    if (dn == 0.0) return 0.0;
    throw InvalidArgument("relative error undefined for a zero reference");
  }
  return dn / yn;
}

std::vector<double> chebyshev_spectrum(std::size_t k) {
  const Grid g = cheb_nodes(k);
  return {g.begin(), g.end()};
}

std::vector<double> uniform_spectrum(std::size_t k, std::uint64_t seed) {
  CounterRng rng(seed, 1);
  std::vector<double> out(k);
  for (double& l : out) l = rng.uniform(-1.0, 1.0);
  return out;
}

std::vector<double> clustered_spectrum(std::size_t k, std::uint64_t seed) {
  CounterRng rng(seed, 1);
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    out[i] = i < k / 2 ? rng.uniform(-0.31, -0.29) : rng.uniform(0.29, 0.31);
  }
  return out;
}

Vector random_unit_vector(std::size_t k, std::uint64_t seed) {
  CounterRng rng(seed, 2);
  Vector v(k);
  for (double& x : v) x = rng.gaussian();
  const double n = norm2(v);
  for (double& x : v) x /= n;
  return v;
}

}  // namespace ratmin
