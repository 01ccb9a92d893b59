#include "doctest.h"

#include "collapse/errors.hpp"
#include "collapse/intlat.hpp"
#include "collapse/oracles.hpp"
#include "support.hpp"

#include <numbers>
#include <random>

using namespace collapse;
using namespace collapse::intlat;
using testing::mat;

namespace {

IntegerMatrix random_sl(std::mt19937_64& rng, int n, int steps) {
  IntegerMatrix a = IntegerMatrix::identity(n);
  std::uniform_int_distribution<int> idx(0, n - 1), q(-2, 2);
  for (int s = 0; s < steps; ++s) {
    const int i = idx(rng), j = idx(rng);
    if (i != j) a.add_row_multiple(i, j, q(rng));
  }
  return a;
}

IntegerMatrix random_integer(std::mt19937_64& rng, int r, int c, int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  IntegerMatrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = d(rng);
  return m;
}

void check_smith(const IntegerMatrix& M) {
  const SmithForm s = smith_normal_form(M);
  CHECK(s.U * M * s.V == s.D);
  CHECK(abs(determinant(s.U)) == 1);
  CHECK(abs(determinant(s.V)) == 1);
  for (int i = 0; i < s.D.rows(); ++i)
    for (int j = 0; j < s.D.cols(); ++j)
      if (i != j) CHECK(s.D(i, j) == 0);
  const auto diag = s.diagonal();
  for (std::size_t i = 0; i + 1 < diag.size(); ++i) {
    CHECK(diag[i] >= 0);
    if (diag[i] != 0) CHECK(diag[i + 1] % diag[i] == 0);
    else CHECK(diag[i + 1] == 0);
  }
  CHECK(s.rank() == oracle::bareiss_rank(M));
}

}  // namespace

TEST_CASE("smith normal form examples") {
  const SmithForm z = smith_normal_form(IntegerMatrix(2, 2));
  CHECK(z.D.is_zero());
  const IntegerMatrix I = IntegerMatrix::identity(2);
  CHECK(smith_normal_form(IntegerMatrix{{1, 1}, {0, 1}} - I).D == (IntegerMatrix{{1, 0}, {0, 0}}));
  CHECK(smith_normal_form(IntegerMatrix{{2, 1}, {1, 1}} - I).D == I);
  CHECK(smith_normal_form(IntegerMatrix{{2, 4, 4}, {-6, 6, 12}, {10, -4, -16}}).diagonal() ==
        std::vector<mpz_class>{2, 6, 12});
}

TEST_CASE("smith normal form on random matrices") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 40; ++t) check_smith(random_integer(rng, 1 + t % 4, 1 + (t / 4) % 4, -9, 9));
  // Rank deficient: product of thin factors.
  for (int t = 0; t < 10; ++t) check_smith(random_integer(rng, 4, 2, -5, 5) * random_integer(rng, 2, 4, -5, 5));
  // Large entries stay exact.
  IntegerMatrix big{{1000000007, 998244353}, {1000000009, 998244359}};
  check_smith(big * big * big);
}

TEST_CASE("integer kernel") {
  const IntegerMatrix M{{3, 6}};
  const IntegerMatrix K = integer_kernel(M);
  REQUIRE(K.cols() == 1);
  CHECK((M * K).is_zero());
  CHECK(abs(K(0, 0)) == 2);
  CHECK(abs(K(1, 0)) == 1);
  CHECK(integer_kernel(IntegerMatrix::identity(3)).cols() == 0);
}

TEST_CASE("betti numbers of mapping tori") {
  CHECK(betti1_mapping_torus(IntegerMatrix::identity(2)).betti1 == 3);
  CHECK(betti1_mapping_torus(IntegerMatrix::identity(2)).torsion.empty());
  CHECK(betti1_mapping_torus(IntegerMatrix{{1, 1}, {0, 1}}).betti1 == 2);
  const auto cat = betti1_mapping_torus(IntegerMatrix{{2, 1}, {1, 1}});
  CHECK(cat.betti1 == 1);
  CHECK(cat.torsion.empty());
  const auto tor = betti1_mapping_torus(IntegerMatrix{{-1, 0}, {0, -1}});
  CHECK(tor.betti1 == 1);  // -I: A - I = -2I
  CHECK(tor.torsion == std::vector<mpz_class>{2, 2});
  CHECK_THROWS_AS(betti1_mapping_torus(IntegerMatrix{{2, 0}, {0, 1}}), NotUnimodular);

  std::mt19937_64 rng(17);
  for (int t = 0; t < 30; ++t) {
    const IntegerMatrix A = random_sl(rng, 2 + t % 3, 6);
    REQUIRE(determinant(A) == 1);
    CHECK(betti1_mapping_torus(A).betti1 == oracle::betti1_rational(A));
  }
}

TEST_CASE("gcd completion") {
  auto g = gcd_completion({1, 0, 0});
  CHECK(g.gcd == 1);
  CHECK(g.P == IntegerMatrix::identity(3));
  g = gcd_completion({3, 6});
  CHECK(g.gcd == 3);
  CHECK(g.P == (IntegerMatrix{{1, 0}, {2, 1}}));
  g = gcd_completion({4, 6});
  CHECK(g.gcd == 2);
  CHECK(g.P(0, 0) == 2);
  CHECK(g.P(1, 0) == 3);
  CHECK(abs(determinant(g.P)) == 1);
  CHECK_THROWS_AS(gcd_completion({0, 0}), ZeroVector);

  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> d(-30, 30);
  for (int t = 0; t < 30; ++t) {
    std::vector<mpz_class> a(2 + t % 3);
    for (auto& x : a) x = d(rng);
    if (std::all_of(a.begin(), a.end(), [](const mpz_class& x) { return x == 0; })) a[0] = 1;
    const auto c = gcd_completion(a);
    CHECK(abs(determinant(c.P)) == 1);
    // P^{-1} a = (d, 0, ..., 0)
    const RationalMatrix Pinv = inverse(RationalMatrix(c.P));
    RationalMatrix av(static_cast<int>(a.size()), 1);
    for (std::size_t i = 0; i < a.size(); ++i) av(i, 0) = a[i];
    const RationalMatrix r = Pinv * av;
    CHECK(r(0, 0) == c.gcd);
    for (int i = 1; i < r.rows(); ++i) CHECK(r(i, 0) == 0);
  }
}

TEST_CASE("matrix exponential") {
  CHECK(matrix_exp(Matrix::Zero(3, 3)) == Matrix::Identity(3, 3));
  CHECK(max_abs(matrix_exp(mat({{0, 1}, {0, 0}})) - mat({{1, 1}, {0, 1}})) < 1e-15);
  const double tp = 2 * std::numbers::pi;
  CHECK(max_abs(matrix_exp(mat({{0, tp}, {-tp, 0}})) - Matrix::Identity(2, 2)) < 1e-10);
  const Matrix D = mat({{1, 0}, {0, -2}});
  CHECK(max_abs(matrix_exp(D) - mat({{std::exp(1.0), 0}, {0, std::exp(-2.0)}})) < 1e-14);
  // Large norm goes through scaling and squaring.
  const Matrix R = mat({{0, 30}, {-30, 0}});
  CHECK(max_abs(matrix_exp(R) - mat({{std::cos(30.0), std::sin(30.0)}, {-std::sin(30.0), std::cos(30.0)}})) < 1e-12);
}

TEST_CASE("principal logarithm") {
  CHECK(principal_log(Matrix::Identity(2, 2)).isZero(1e-14));
  const Matrix A = mat({{2, 1}, {1, 1}});
  CHECK(max_abs(matrix_exp(principal_log(A)) - A) < 1e-10);
  CHECK_THROWS_AS(principal_log(-Matrix::Identity(2, 2)), BranchUnavailable);

  std::mt19937_64 rng(29);
  for (int t = 0; t < 20; ++t) {
    const int n = 1 + t % 5;
    const Matrix Q = random_orthogonal(rng, n);
    Vector ev(n);
    std::uniform_real_distribution<double> u(0.2, 5.0);
    for (int i = 0; i < n; ++i) ev(i) = u(rng);
    const Matrix S = Q * ev.asDiagonal() * Q.transpose();
    CHECK(max_abs(matrix_exp(principal_log(S)) - S) <= 1e-9);
  }
}

TEST_CASE("verify log") {
  const double tp = 2 * std::numbers::pi;
  CHECK(verify_log(Matrix::Identity(2, 2), Matrix::Zero(2, 2), 1e-12));
  CHECK(verify_log(Matrix::Identity(2, 2), mat({{0, tp}, {-tp, 0}}), 1e-10));
  CHECK(verify_log(mat({{1, 1}, {0, 1}}), mat({{0, 1}, {0, 0}}), 1e-12));
  CHECK_FALSE(verify_log(mat({{1, 1}, {0, 1}}), Matrix::Zero(2, 2), 1e-12));
}

TEST_CASE("integer matrix text format") {
  const IntegerMatrix m{{1, -2, 3}, {4, 5, -6}};
  CHECK(parse_integer_matrix(to_text(m)) == m);
  CHECK(parse_integer_matrix("2 2\n1 0\n0 1\n") == IntegerMatrix::identity(2));
  CHECK_THROWS_AS(parse_integer_matrix("2 2\n1 0 0\n"), ParseError);
  CHECK_THROWS_AS(parse_integer_matrix("2 2\n1 0 0 1 7\n"), ParseError);
  CHECK_THROWS_AS(parse_integer_matrix("1 1\n1.5\n"), ParseError);
}

TEST_CASE("rational linear algebra") {
  const RationalMatrix M(IntegerMatrix{{1, 2}, {2, 4}});
  CHECK(rank(M) == 1);
  const RationalMatrix N = nullspace(M);
  REQUIRE(N.cols() == 1);
  CHECK((M * N)(0, 0) == 0);
  CHECK_THROWS_AS(inverse(M), SingularFrame);
  const RationalMatrix A(IntegerMatrix{{2, 1}, {1, 1}});
  const RationalMatrix Ai = inverse(A);
  CHECK((A * Ai)(0, 0) == 1);
  CHECK((A * Ai)(0, 1) == 0);
}
