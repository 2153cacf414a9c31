#include <cmath>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "ratmin/builtins.hpp"
#include "ratmin/errors.hpp"
#include "ratmin/harness.hpp"
#include "ratmin/matfun.hpp"
#include "ratmin/matrix_io.hpp"
#include "ratmin/random.hpp"

using namespace ratmin;
using doctest::Approx;

namespace {

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  return (a - b).max_abs();
}

DenseMatrix random_matrix(std::size_t k, std::uint64_t seed) {
  CounterRng rng(seed);
  DenseMatrix m(k);
  for (double& x : m.data()) x = rng.uniform(-1.0, 1.0);
  return m;
}

ChebCoeffs random_coeffs(std::size_t deg, std::uint64_t seed) {
  CounterRng rng(seed, 9);
  std::vector<double> c(deg + 1);
  for (double& x : c) x = rng.uniform(-1.0, 1.0);
  return ChebCoeffs(c);
}

const Domain kRef(-1.0, 1.0);

}  // namespace

TEST_CASE("dense matrix basics") {
  const DenseMatrix a(2, {1.0, 2.0, 3.0, 4.0});
  CHECK(a(1, 0) == 3.0);
  CHECK(a.transpose()(0, 1) == 3.0);
  CHECK((a * DenseMatrix::identity(2)) == a);
  const Vector v = a * std::vector<double>{1.0, 1.0};
  CHECK(v == Vector{3.0, 7.0});
  CHECK(a.frobenius_norm() == Approx(std::sqrt(30.0)));
  CHECK_THROWS_AS(DenseMatrix(2, {1.0, 2.0, 3.0}), InvalidArgument);
}

TEST_CASE("LU solve and singularity") {
  const DenseMatrix a = random_matrix(30, 1) + 5.0 * DenseMatrix::identity(30);
  CounterRng rng(2);
  Vector x(30);
  for (double& v : x) v = rng.uniform(-1.0, 1.0);
  const Vector b = a * x;
  const LuFactorization lu(a);
  CHECK_FALSE(lu.singular());
  const Vector y = lu.solve(b);
  for (std::size_t i = 0; i < 30; ++i) CHECK(y[i] == Approx(x[i]).epsilon(1e-12));
  DenseMatrix s(3, {1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 1.0, 1.0});
  CHECK(LuFactorization(s).singular());
}

TEST_CASE("map_matrix examples") {
  const DenseMatrix a = random_matrix(4, 3);
  CHECK(map_matrix(kRef, a) == a);
  CHECK(map_matrix(Domain(0.0, 3.0), 1.5 * DenseMatrix::identity(3)).max_abs() == 0.0);
  const DenseMatrix m = map_matrix(Domain(0.0, 3.0), DenseMatrix::diagonal(std::vector<double>{0.0, 3.0}));
  CHECK(m == DenseMatrix::diagonal(std::vector<double>{-1.0, 1.0}));
}

TEST_CASE("matrix Clenshaw examples") {
  const DenseMatrix a = random_matrix(5, 4);
  CHECK(matrix_cheb_poly(ChebCoeffs{1.0}, a, kRef) == DenseMatrix::identity(5));
  CHECK(max_abs_diff(matrix_cheb_poly(ChebCoeffs{0.0, 1.0}, a, kRef), a) <= 1e-15);
  const DenseMatrix d = DenseMatrix::diagonal(std::vector<double>{0.5, -0.5});
  CHECK(max_abs_diff(matrix_cheb_poly(ChebCoeffs{0.0, 0.0, 1.0}, d, kRef),
                     DenseMatrix::diagonal(std::vector<double>{-0.5, -0.5})) <= 1e-15);
}

TEST_CASE("matrix Clenshaw matches scalar Clenshaw on diagonals") {
  CounterRng rng(5);
  for (std::size_t deg = 0; deg <= 20; ++deg) {
    std::vector<double> t(12);
    for (double& x : t) x = rng.uniform(-1.0, 1.0);
    const ChebCoeffs c = random_coeffs(deg, deg);
    const DenseMatrix p = matrix_cheb_poly(c, DenseMatrix::diagonal(t), kRef);
    for (std::size_t i = 0; i < t.size(); ++i) {
      CHECK(std::abs(p(i, i) - clenshaw(c, t[i])) <= 1e-11);
      for (std::size_t j = 0; j < t.size(); ++j) {
        if (i != j) CHECK(p(i, j) == 0.0);
      }
    }
  }
}

TEST_CASE("matrix Clenshaw against the three-term matrix recurrence") {
  const Domain d(0.0, 3.0);
  const DenseMatrix a = 0.2 * random_matrix(8, 6) + 1.5 * DenseMatrix::identity(8);
  const ChebCoeffs c = random_coeffs(9, 7);
  const DenseMatrix ah = map_matrix(d, a);
  DenseMatrix t0 = DenseMatrix::identity(8), t1 = ah;
  DenseMatrix sum = c[0] * t0 + c[1] * t1;
  for (std::size_t j = 2; j <= 9; ++j) {
    DenseMatrix t2 = 2.0 * (ah * t1) - t0;
    sum += c[j] * t2;
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  CHECK(max_abs_diff(matrix_cheb_poly(c, a, d), sum) <= 1e-12);
}

TEST_CASE("matrix-vector Clenshaw") {
  const DenseMatrix a = random_matrix(20, 8);
  std::vector<double> v(20);
  for (std::size_t i = 0; i < 20; ++i) v[i] = 0.1 * static_cast<double>(i) - 1.0;
  CHECK(matrix_cheb_poly_vec(ChebCoeffs{1.0}, a, v, kRef) == v);
  const Vector av = matrix_cheb_poly_vec(ChebCoeffs{0.0, 1.0}, a, v, kRef);
  const Vector want = a * std::span<const double>(v);
  for (std::size_t i = 0; i < 20; ++i) CHECK(av[i] == Approx(want[i]).epsilon(1e-14));

  // spectrum inside the domain, where the polynomial stays O(1)
  const DenseMatrix b = make_normal_matrix({uniform_spectrum(20, 8), 8});
  const ChebCoeffs c = random_coeffs(10, 9);
  Vector e1(20, 0.0);
  e1[0] = 1.0;
  const Vector col = matrix_cheb_poly_vec(c, b, e1, kRef);
  const DenseMatrix full = matrix_cheb_poly(c, b, kRef);
  for (std::size_t i = 0; i < 20; ++i) CHECK(std::abs(col[i] - full(i, 0)) <= 1e-10);
  CHECK_THROWS_AS(matrix_cheb_poly_vec(c, a, std::vector<double>(3), kRef), InvalidArgument);
}

TEST_CASE("rational_apply on scalar and diagonal matrices") {
  const RationalApproximant r(Domain(0.0, 3.0), {1.0, 0.5, -0.2}, {2.0, 0.4, 0.1},
                              BoundSpec{1.0, 4.0, false});
  const MatApplyReport s = rational_apply(r, 1.2 * DenseMatrix::identity(6));
  CHECK(max_abs_diff(s.result, eval(r, 1.2) * DenseMatrix::identity(6)) <= 1e-12);
  CHECK(s.cond_bound.value() == 4.0);
  CHECK(s.residual >= 0.0);

  std::vector<double> lam(25);
  for (std::size_t i = 0; i < lam.size(); ++i) lam[i] = 3.0 * static_cast<double>(i) / 24.0;
  const MatApplyReport d = rational_apply(r, DenseMatrix::diagonal(lam));
  for (std::size_t i = 0; i < lam.size(); ++i) {
    for (std::size_t j = 0; j < lam.size(); ++j) {
      CHECK(std::abs(d.result(i, j) - (i == j ? eval(r, lam[i]) : 0.0)) <= 1e-10);
    }
  }
}

TEST_CASE("rational_apply commutes with the similarity") {
  const RationalApproximant r(kRef, {0.3, 1.0, -0.2, 0.05}, {3.0, 0.5, -0.3});
  for (std::size_t k : {10u, 80u, 200u}) {
    const NormalMatrix nm = make_normal_matrix_with_basis({uniform_spectrum(k, 5), 5});
    const MatApplyReport x = rational_apply(r, nm.a);
    const DenseMatrix y = exact_function(nm, [&](double t) { return eval(r, t); });
    CHECK((x.result - y).frobenius_norm() <= 1e-8 * y.frobenius_norm());
  }
}

TEST_CASE("rational_apply_vec") {
  const RationalApproximant r(kRef, {0.3, 1.0, -0.2, 0.05}, {3.0, 0.5, -0.3});
  const NormalMatrix nm = make_normal_matrix_with_basis({uniform_spectrum(100, 6), 6});
  CHECK(norm2(rational_apply_vec(r, nm.a, Vector(100, 0.0)).result) == 0.0);

  Vector v = random_unit_vector(100, 6);
  const Vector c = rational_apply_vec(r, 0.4 * DenseMatrix::identity(100), v).result;
  for (std::size_t i = 0; i < 100; ++i) CHECK(std::abs(c[i] - eval(r, 0.4) * v[i]) <= 1e-12);

  const Vector fast = rational_apply_vec(r, nm.a, v).result;
  const Vector slow = rational_apply(r, nm.a).result * std::span<const double>(v);
  Vector diff(100);
  for (std::size_t i = 0; i < 100; ++i) diff[i] = fast[i] - slow[i];
  CHECK(norm2(diff) <= 1e-8 * norm2(slow));
  MatApplyOptions refine;
  refine.refine = true;
  const Vector refined = rational_apply_vec(r, nm.a, v, refine).result;
  for (std::size_t i = 0; i < 100; ++i) CHECK(refined[i] == Approx(fast[i]).epsilon(1e-10));
}

TEST_CASE("a singular denominator matrix is a numerical error") {
  // q(t) = t vanishes at 0, an eigenvalue outside the certified region
  const RationalApproximant r(kRef, {1.0}, {0.0, 1.0});
  const DenseMatrix a = DenseMatrix::diagonal(std::vector<double>{0.0, 0.5, 0.9});
  CHECK_THROWS_AS(rational_apply(r, a), NumericalError);
  CHECK_THROWS_AS(rational_apply_vec(r, a, std::vector<double>{1.0, 1.0, 1.0}), NumericalError);
}

TEST_CASE("make_normal_matrix") {
  for (std::uint64_t seed : {1u, 7u, 99u}) {
    const DenseMatrix c = make_normal_matrix({std::vector<double>(12, 0.7), seed});
    CHECK(max_abs_diff(c, 0.7 * DenseMatrix::identity(12)) <= 1e-12);
  }
  const DenseMatrix a = make_normal_matrix({{1.0, -1.0}, 7});
  CHECK(std::abs(a(0, 0) + a(1, 1)) <= 1e-10);
  CHECK(a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) == Approx(-1.0).epsilon(1e-10));

  const SpectrumSpec s{uniform_spectrum(40, 3), 3};
  CHECK(make_normal_matrix(s) == make_normal_matrix(s));
  const NormalMatrix nm = make_normal_matrix_with_basis(s);
  CHECK(max_abs_diff(nm.a, nm.a.transpose()) == 0.0);
  CHECK(max_abs_diff(nm.q.transpose() * nm.q, DenseMatrix::identity(40)) <= 1e-13);
  CHECK(make_normal_matrix({s.eigenvalues, 4}) != make_normal_matrix(s));
}

TEST_CASE("cond_check") {
  const BoundSpec b{1.0, 2.0, false};
  CHECK(cond_check(RationalApproximant(kRef, {1.0}, {3.0}), b, {{-0.5, 0.1, 0.9}, 1}) == 1.0);
  CHECK(cond_check(RationalApproximant(kRef, {1.0}, {1.5, 0.5}), b, {{-1.0, 1.0}, 1}) ==
        Approx(2.0));
  // agrees with the SVD condition number of q(A) for a normal A
  const RationalApproximant r(kRef, {1.0}, {3.0, 1.0, 0.5});
  const SpectrumSpec s{uniform_spectrum(30, 8), 8};
  const DenseMatrix q = matrix_cheb_poly(r.den(), make_normal_matrix(s), kRef);
  CHECK(cond2(q) == Approx(cond_check(r, BoundSpec{1.0, 10.0, false}, s)).epsilon(1e-10));
}

TEST_CASE("cond_check on a bounded f1 fit stays below u/l") {
  const FitRun run = run_fit(builtin("f1"), 4, 5, BoundSpec{1.0, 8.0, false});
  const std::vector<double> pts(run.problem.grid.begin(), run.problem.grid.end());
  CHECK(cond_check(run.report.approximant, run.problem.bounds, {pts, 7}) <= 8.0);
}

TEST_CASE("frobenius_rel_error") {
  const DenseMatrix y = random_matrix(6, 10);
  CHECK(frobenius_rel_error(y, y) == 0.0);
  CHECK(frobenius_rel_error(2.0 * y, y) == Approx(1.0));
  DenseMatrix e = random_matrix(6, 11);
  e *= 0.1 * y.frobenius_norm() / e.frobenius_norm();
  CHECK(frobenius_rel_error(y + e, y) == Approx(0.1).epsilon(1e-12));
  CHECK(frobenius_rel_error(DenseMatrix(3), DenseMatrix(3)) == 0.0);
  CHECK_THROWS_AS(frobenius_rel_error(y, DenseMatrix(6)), InvalidArgument);
}

TEST_CASE("spectra and random vectors") {
  CHECK(chebyshev_spectrum(3).size() == 3);
  const auto u = uniform_spectrum(1000, 7);
  CHECK(*std::min_element(u.begin(), u.end()) >= -1.0);
  CHECK(*std::max_element(u.begin(), u.end()) < 1.0);
  const auto c = clustered_spectrum(100, 7);
  for (std::size_t i = 0; i < 100; ++i) {
    const double lo = i < 50 ? -0.31 : 0.29;
    CHECK(c[i] >= lo);
    CHECK(c[i] <= lo + 0.02);
  }
  CHECK(norm2(random_unit_vector(50, 7)) == Approx(1.0).epsilon(1e-14));
  CHECK(random_unit_vector(50, 7) == random_unit_vector(50, 7));
}

TEST_CASE("counter generator is a pure function of seed, stream and index") {
  CounterRng a(42, 1), b(42, 1), c(42, 2);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
  }
  CHECK(a.counter() == 100);
  // pinned values guard cross-platform reproducibility
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
  CounterRng g(7);
  double mean = 0.0, var = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double z = g.gaussian();
    mean += z;
    var += z * z;
  }
  CHECK(std::abs(mean / 20000.0) < 0.03);
  CHECK(std::abs(var / 20000.0 - 1.0) < 0.05);
}

TEST_CASE("matrix CSV and binary round trips") {
  const DenseMatrix m = make_normal_matrix({uniform_spectrum(17, 2), 2});
  std::stringstream csv;
  write_matrix_csv(csv, m);
  CHECK(read_matrix_csv(csv) == m);
  std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
  write_matrix_bin(bin, m);
  CHECK(bin.str().size() == 8 + 17 * 17 * 8);
  CHECK(read_matrix_bin(bin) == m);

  const auto dir = std::filesystem::temp_directory_path() / "ratmin_io_test";
  std::filesystem::create_directories(dir);
  save_matrix(dir / "m.bin", m);
  save_matrix(dir / "m.csv", m);
  CHECK(load_matrix(dir / "m.bin") == m);
  CHECK(load_matrix(dir / "m.csv") == m);
  std::filesystem::remove_all(dir);
}

TEST_CASE("malformed matrix files") {
  std::stringstream short_row("2\n1,2\n3\n");
  CHECK_THROWS_AS(read_matrix_csv(short_row), InvalidArgument);
  std::stringstream missing("3\n1,2,3\n");
  CHECK_THROWS_AS(read_matrix_csv(missing), InvalidArgument);
  std::stringstream junk("2\n1,x\n3,4\n");
  CHECK_THROWS_AS(read_matrix_csv(junk), InvalidArgument);
  std::stringstream trunc(std::string("\x02\0\0\0\0\0\0\0", 8));
  CHECK_THROWS_AS(read_matrix_bin(trunc), InvalidArgument);
  std::stringstream vec("1\n2, 3\n\n4\n");
  CHECK(read_vector_csv(vec) == Vector{1.0, 2.0, 3.0, 4.0});
}
