#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ratmin/cheb.hpp"
#include "ratmin/dense.hpp"
#include "ratmin/rational.hpp"

namespace ratmin {

/// (2A - (a+b) I) / (b - a): the matrix analogue of map_to_ref.
DenseMatrix map_matrix(const Domain& d, const DenseMatrix& a);

/// sum_j c_j T_j(A_hat) by the matrix Clenshaw recurrence. Uses three k x k
/// workspaces besides A_hat and costs deg(c) - 1 matrix products.
DenseMatrix matrix_cheb_poly(const ChebCoeffs& c, const DenseMatrix& a,
                             const Domain& d);

/// (sum_j c_j T_j(A_hat)) v using matrix-vector products only.
Vector matrix_cheb_poly_vec(const ChebCoeffs& c, const DenseMatrix& a,
                            std::span<const double> v, const Domain& d);

struct MatApplyOptions {
  /// One step of iterative refinement after the LU solve.
  bool refine = false;
  /// Skip the residual (an extra product) when timing.
  bool compute_residual = true;
  /// q(A) counts as singular when min |U_ii| < singular_tol * ||q(A)||_inf.
  double singular_tol = 1e-14;
};

template <typename T>
struct ApplyReport {
  T result;
  /// ||q(A) X - p(A)||_F / ||p(A)||_F (0 when p(A) = 0 or not computed).
  double residual = 0.0;
  /// u / l of the approximant's bounds, when it carries them.
  std::optional<double> cond_bound;
};

using MatApplyReport = ApplyReport<DenseMatrix>;
using VecApplyReport = ApplyReport<Vector>;

/// r(A) = q(A)^{-1} p(A). Throws NumericalError when q(A) is singular to
/// working precision, which signals a spectrum outside the certified region.
MatApplyReport rational_apply(const RationalApproximant& r,
                              const DenseMatrix& a,
                              const MatApplyOptions& opts = {});

/// r(A) v: p(A) v by vector Clenshaw, then one solve with q(A).
VecApplyReport rational_apply_vec(const RationalApproximant& r,
                                  const DenseMatrix& a,
                                  std::span<const double> v,
                                  const MatApplyOptions& opts = {});

struct SpectrumSpec {
  std::vector<double> eigenvalues;
  std::uint64_t seed = 7;
};

/// A = Q diag(lambda) Q^T with Q the eigenvector basis.
struct NormalMatrix {
  DenseMatrix a;
  DenseMatrix q;
  std::vector<double> eigenvalues;
};

/// Q from the QR factorization of a seeded standard-Gaussian matrix, signs
/// normalized so R has a positive diagonal; A re-symmetrized as (A + A^T)/2.
NormalMatrix make_normal_matrix_with_basis(const SpectrumSpec& s);
DenseMatrix make_normal_matrix(const SpectrumSpec& s);

/// Q f(D) Q^T.
DenseMatrix exact_function(const NormalMatrix& m, const ScalarFunction& f);
/// Q f(D) Q^T v using three matrix-vector products.
Vector exact_function_vec(const NormalMatrix& m, const ScalarFunction& f,
                          std::span<const double> v);

/// cond_2(q(A)) for normal A with the given spectrum:
/// max_i |q(lambda_i)| / min_i |q(lambda_i)|.
double cond_check(const RationalApproximant& r, const BoundSpec& b,
                  const SpectrumSpec& s);

/// sigma_max / sigma_min from a full SVD; infinity for a singular matrix.
double cond2(const DenseMatrix& m);

/// ||X - Y||_F / ||Y||_F; 0 when both vanish. Throws InvalidArgument when
/// Y = 0 and X != 0.
double frobenius_rel_error(const DenseMatrix& x, const DenseMatrix& y);

std::vector<double> chebyshev_spectrum(std::size_t k);
/// k values uniform on [-1, 1], drawn from stream 1 of the seed.
std::vector<double> uniform_spectrum(std::size_t k, std::uint64_t seed);
/// k/2 values uniform on [-0.31, -0.29], the rest on [0.29, 0.31].
std::vector<double> clustered_spectrum(std::size_t k, std::uint64_t seed);

/// Unit vector with Gaussian entries from stream 2 of the seed.
Vector random_unit_vector(std::size_t k, std::uint64_t seed);

}  // namespace ratmin
