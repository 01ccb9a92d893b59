#include "doctest.h"

#include "collapse/errors.hpp"
#include "collapse/euler_bound.hpp"
#include "support.hpp"

#include <limits>

using namespace collapse;
using namespace collapse::euler;
using testing::mat;

namespace {

Matrix random_integer(std::mt19937_64& rng, int r, int c, int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = d(rng);
  return m;
}

Matrix random_gram(std::mt19937_64& rng, int k) {
  const Matrix A = random_frame(rng, k, 0.5);
  return A.transpose() * A;
}

// Product of the nonzero singular values.
double pseudo_det(const Matrix& A) {
  const auto sv = singular_values(A);
  double p = 1.0;
  for (double s : sv)
    if (s > 1e-9 * std::max(1.0, sv.front())) p *= s;
  return p;
}

// |ω|² on 2-forms through the full antisymmetric tensor: ½ Σ ω_ij ω_kl h^ik h^jl.
double two_form_norm2(const std::vector<int>& c, const Matrix& h) {
  const int m = static_cast<int>(h.rows());
  Matrix w = Matrix::Zero(m, m);
  int a = 0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j, ++a) w(i, j) = c[a], w(j, i) = -c[a];
  return 0.5 * (h * w * h * w.transpose()).trace();
}

double brute_rho(const flat_torus::FlatTorus& N, int r) {
  const int m = N.dim();
  const int q = m * (m - 1) / 2;
  std::vector<int> g(q, -r);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    if (std::any_of(g.begin(), g.end(), [](int x) { return x != 0; }))
      best = std::min(best, N.volume() * two_form_norm2(g, N.dual_gram()));
    int a = q - 1;
    while (a >= 0 && g[a] == r) g[a] = -r, --a;
    if (a < 0) break;
    ++g[a];
  }
  return std::sqrt(best);
}

}  // namespace

TEST_CASE("euler map data") {
  const EulerMap e(mat({{1, 0}, {0, 2}}), mat({{4, 0}, {0, 1}}));
  CHECK(e.fiber_dim() == 2);
  CHECK(e.fiber_volume() == doctest::Approx(0.5));
  CHECK_THROWS(EulerMap(mat({{0.5, 0}}), Matrix::Identity(2, 2)));
  CHECK_THROWS_AS(EulerMap(mat({{1, 0}}), mat({{1, 2}, {2, 1}})), NotPositiveDefinite);
  CHECK_THROWS(EulerMap(mat({{1, 0, 0}}), Matrix::Identity(2, 2)));
}

TEST_CASE("e e* in orthonormal frames") {
  CHECK(max_abs(ee_star(mat({{1, 0}, {0, 2}}), Matrix::Identity(2, 2)) - mat({{1, 0}, {0, 4}})) < 1e-15);
  CHECK(max_abs(ee_star(mat({{1, 0}, {0, 2}}), mat({{4, 0}, {0, 1}})) - mat({{0.25, 0}, {0, 4}})) < 1e-15);
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const int k = 1 + t % 3;
    const Matrix G = random_gram(rng, k);
    const Matrix E = random_integer(rng, k + 1, k, -3, 3);
    const Matrix M = ee_star(E, G);
    // The dual gram inverted gives e e* directly in the lattice basis.
    const Matrix direct = E.transpose() * E;
    CHECK(std::abs(M.determinant() - direct.determinant() / G.determinant()) <=
          1e-10 * std::max(1.0, std::abs(M.determinant())));
    CHECK(std::abs(M.trace() - (G.inverse() * direct).trace()) <= 1e-10 * std::max(1.0, M.trace()));
  }
}

TEST_CASE("eigenvalue to determinant chain") {
  const auto one = bound_chain(mat({{3}, {4}}), mat({{1}}));
  CHECK(one.lambda_min == doctest::Approx(25));
  CHECK(one.det_ratio == doctest::Approx(25));
  CHECK(one.det_bound == doctest::Approx(25));
  CHECK(one.ok);

  const auto d = bound_chain(mat({{1, 0}, {0, 3}}), Matrix::Identity(2, 2));
  CHECK(d.lambda_min == doctest::Approx(1));
  CHECK(d.det_ratio == doctest::Approx(1));
  CHECK(d.det_bound == doctest::Approx(1));
  CHECK(d.ok);

  CHECK_THROWS_AS(bound_chain(mat({{1, 2}, {2, 4}}), Matrix::Identity(2, 2)), NotInjective);
  CHECK_THROWS_AS(bound_chain(mat({{1, 2}}), Matrix::Identity(2, 2)), NotInjective);

  std::mt19937_64 rng(5);
  int checked = 0;
  for (int t = 0; t < 50; ++t) {
    const int k = 1 + t % 4;
    const Matrix E = random_integer(rng, k + t % 2, k, -4, 4);
    if (singular_values(E).back() < 1e-6) continue;
    const Matrix G = random_gram(rng, k);
    const auto c = bound_chain(E, G);
    CHECK(c.ok);
    const double smin = singular_values(orthonormal_matrix(E, G)).back();
    CHECK(c.lambda_min == doctest::Approx(smin * smin).epsilon(1e-10));
    ++checked;
  }
  CHECK(checked > 35);
}

TEST_CASE("determinant factors through the fiber volume") {
  auto f = det_factorization(Matrix::Identity(2, 2), Matrix::Identity(2, 2));
  CHECK(f.det_lattice == doctest::Approx(1));
  CHECK(f.fiber_volume == doctest::Approx(1));
  CHECK(f.det_orth == doctest::Approx(1));
  f = det_factorization(Matrix::Identity(2, 2), mat({{4, 0}, {0, 4}}));
  CHECK(f.fiber_volume == doctest::Approx(0.25));
  CHECK(f.det_orth == doctest::Approx(0.25));
  f = det_factorization(Matrix::Identity(2, 2), mat({{0.25, 0}, {0, 0.25}}));
  CHECK(f.fiber_volume == doctest::Approx(4));
  CHECK(f.det_orth == doctest::Approx(4));
  CHECK_THROWS_AS(det_factorization(mat({{1, 1}, {1, 1}}), Matrix::Identity(2, 2)), NotInjective);

  std::mt19937_64 rng(7);
  for (int t = 0; t < 30; ++t) {
    const int k = 1 + t % 3;
    const Matrix E = random_integer(rng, k + 1, k, -3, 3);
    if (singular_values(E).back() < 1e-6) continue;
    const Matrix G = random_gram(rng, k);
    const auto r = det_factorization(E, G);
    CHECK(r.rel_err <= 1e-12);
    CHECK(r.fiber_volume == doctest::Approx(1.0 / std::sqrt(G.determinant())).epsilon(1e-12));
    CHECK(r.det_orth == doctest::Approx(pseudo_det(orthonormal_matrix(E, G))).epsilon(1e-10));
  }
}

TEST_CASE("non-injective euler maps") {
  auto z = noninjective_reduce(Matrix::Zero(2, 3), Matrix::Identity(3, 3));
  CHECK(z.trivial);
  CHECK(z.kernel_dim == 3);

  auto r = noninjective_reduce(mat({{3, 6}}), Matrix::Identity(2, 2));
  CHECK_FALSE(r.trivial);
  CHECK(r.kernel_dim == 1);
  CHECK(abs(r.kernel(0, 0)) == 2);
  CHECK(abs(r.kernel(1, 0)) == 1);
  CHECK(r.det_A == doctest::Approx(std::sqrt(45.0)));
  CHECK(r.quotient_volume == doctest::Approx(1 / std::sqrt(5.0)));
  CHECK(r.identity_rel_err <= 1e-12);
  CHECK(r.chain.ok);

  // A row of zeros leaves the kernel unchanged.
  const auto r0 = noninjective_reduce(mat({{3, 6}, {0, 0}}), Matrix::Identity(2, 2));
  CHECK(r0.kernel_dim == 1);
  CHECK(r0.det_A == doctest::Approx(r.det_A));

  CHECK_THROWS(noninjective_reduce(Matrix::Identity(2, 2), Matrix::Identity(2, 2)));

  std::mt19937_64 rng(11);
  for (int t = 0; t < 10; ++t) {
    const int k = 2 + t % 3, rank = 1 + t % (k - 1);
    const Matrix E = random_integer(rng, rank + 1, rank, -3, 3) * random_integer(rng, rank, k, -3, 3);
    const Matrix G = random_gram(rng, k);
    const auto n = noninjective_reduce(E, G);
    if (n.trivial) continue;
    const Matrix K = n.kernel.to_real();
    CHECK(max_abs(E * K) == 0.0);
    CHECK(n.kernel_dim == k - numeric_rank(E, 1e-9));
    CHECK(n.identity_rel_err <= 1e-10);
    CHECK(n.det_P1 == doctest::Approx(std::sqrt((K.transpose() * G * K).determinant())).epsilon(1e-10));
    CHECK(n.det_A == doctest::Approx(pseudo_det(orthonormal_matrix(E, G))).epsilon(1e-9));
    CHECK(n.chain.ok);
  }
}

TEST_CASE("smallest integral 2-form") {
  using flat_torus::FlatTorus;
  CHECK(rho_flat(FlatTorus(Matrix::Identity(2, 2))).rho == doctest::Approx(1));
  CHECK(rho_flat(FlatTorus(mat({{9, 0}, {0, 1.0 / 9}}))).rho == doctest::Approx(1));
  CHECK(rho_flat(FlatTorus(Matrix::Identity(3, 3))).rho == doctest::Approx(1));
  CHECK(rho_flat(FlatTorus(mat({{4, 0}, {0, 4}}))).rho == doctest::Approx(0.5));
  CHECK_THROWS(rho_flat(FlatTorus(mat({{1}}))));

  std::mt19937_64 rng(13);
  for (int t = 0; t < 12; ++t) {
    const int m = 2 + t % 3;
    const FlatTorus N(random_gram(rng, m));
    const auto a = rho_flat(N), b = rho_flat(N, 2);
    CHECK(a.rho == b.rho);
    CHECK(a.rho == doctest::Approx(brute_rho(N, m == 4 ? 2 : 4)).epsilon(1e-12));
    CHECK(std::sqrt(N.volume() * two_form_norm2(a.coefficients, N.dual_gram())) == doctest::Approx(a.rho));
  }
}

TEST_CASE("eigenvalue over squared fiber volume") {
  const double grid[] = {1.0, 0.5, 0.1, 0.01};
  const torus_bundle::TorusBundleOverT2 b({1, 1});
  auto h = vol_bound_experiment(b, {1, 1}, grid);
  CHECK(h.homothety);
  CHECK(h.bounded_below);
  REQUIRE(h.rows.size() == 4);
  for (const auto& r : h.rows) {
    CHECK(r.eigenvalue == doctest::Approx(2 * r.eps * r.eps));
    CHECK(r.fiber_volume == doctest::Approx(r.eps * r.eps));
  }
  CHECK(h.min_ratio == doctest::Approx(2.0));

  auto s = vol_bound_experiment(b, {1, 0}, grid);
  CHECK_FALSE(s.homothety);
  CHECK(s.bounded_below);
  CHECK(s.rows.back().eigenvalue == doctest::Approx(1.0001));

  const torus_bundle::TorusBundleOverT2 wide({1}, 2.0);
  const auto w = vol_bound_experiment(wide, {0}, grid);
  for (const auto& r : w.rows) CHECK(r.eigenvalue == doctest::Approx(0.25));
  CHECK_THROWS(vol_bound_experiment(b, {1}, grid));
  CHECK(h.to_csv().rfind("eps,eigenvalue,fiber_volume,ratio\n", 0) == 0);
}
