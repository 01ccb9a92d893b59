#include "doctest.h"

#include "collapse/curvature.hpp"
#include "collapse/errors.hpp"
#include "collapse/mapping_torus.hpp"
#include "collapse/oracles.hpp"
#include "collapse/torus_bundle.hpp"
#include "support.hpp"

#include <cmath>
#include <numbers>

using namespace collapse;
using testing::mat;
using testing::vec;

namespace {

Vector unit(int n, int i) { return Vector::Unit(n, i); }

std::pair<Vector, Vector> random_plane(std::mt19937_64& rng, int n) {
  const Matrix Q = random_orthogonal(rng, n);
  return {Q.col(0), Q.col(1)};
}

}  // namespace

TEST_CASE("ad star is the adjoint of ad") {
  const auto L = mapping_torus::solvable_algebra(mat({{1, 2}, {-3, -1}}));
  const int n = L.dim();
  for (int u = 0; u < n; ++u) {
    const Matrix s = curvature::ad_star(L, unit(n, u)), a = curvature::ad(L, unit(n, u));
    for (int v = 0; v < n; ++v)
      for (int w = 0; w < n; ++w) CHECK(unit(n, v).dot(s * unit(n, w)) == doctest::Approx(unit(n, w).dot(a * unit(n, v))));
  }
  // ad*_{V_i} V_j = -c_ji Y with [Y, V_i] = sum_j C(j,i) V_j
  const Matrix C = mat({{1, 2}, {-3, -1}});
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const Vector r = curvature::ad_star(L, unit(3, i)) * unit(3, j);
      CHECK(r(2) == doctest::Approx(-C(j, i)));
      CHECK(r.head(2).isZero());
    }
  CHECK(curvature::ad_star(lie::abelian(3), vec({1, 2, 3})).isZero());

  const double mu = 1.7;
  const auto N = torus_bundle::nil_algebra(vec({mu, 0}));
  CHECK(curvature::ad_star(N, unit(4, 2)) * unit(4, 0) == mu * unit(4, 3));
  CHECK(curvature::ad_star(N, unit(4, 3)) * unit(4, 0) == -mu * unit(4, 2));
}

TEST_CASE("sectional curvature special cases") {
  CHECK(curvature::sectional_curvature(lie::abelian(3), unit(3, 0), unit(3, 1)) == 0.0);
  const auto N = torus_bundle::nil_algebra(vec({1, 0}));
  CHECK(curvature::sectional_curvature(N, unit(4, 2), unit(4, 3)) == doctest::Approx(-0.75));
  const double tp = 2 * std::numbers::pi;
  const auto R = mapping_torus::solvable_algebra(mat({{0, tp}, {-tp, 0}}));
  CHECK(curvature::frame_curvature(R).max_abs() < 1e-12);
  CHECK_THROWS_AS(curvature::sectional_curvature(N, unit(4, 0), unit(4, 0)), NotOrthonormal);
  CHECK_THROWS_AS(curvature::sectional_curvature(N, 2 * unit(4, 0), unit(4, 1)), NotOrthonormal);
}

TEST_CASE("general formula agrees with the Levi-Civita oracle and is symmetric") {
  std::mt19937_64 rng(21);
  for (const auto& L : testing::random_algebras(30, 9)) {
    const auto [u, v] = random_plane(rng, L.dim());
    const double k = curvature::sectional_curvature(L, u, v);
    CHECK(k == doctest::Approx(oracle::levi_civita_curvature(L, u, v)).epsilon(1e-10).scale(1.0));
    CHECK(std::abs(k - curvature::sectional_curvature(L, v, u)) <= 1e-12 * std::max(1.0, std::abs(k)));
  }
}

TEST_CASE("solvable closed form") {
  const auto z = curvature::solvable_curvature_closed_form(Matrix::Zero(3, 3));
  CHECK(z.max_abs() == 0.0);
  const auto t = curvature::solvable_curvature_closed_form(mat({{0, 1}, {0, 0}}));
  // Y is the last frame vector.
  CHECK(t(2, 0) == doctest::Approx(0.25));
  CHECK(t(2, 1) == doctest::Approx(-0.75));
  CHECK(t(0, 1) == doctest::Approx(0.25));

  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 5;
    const Matrix C = random_gaussian(rng, n, n);
    const auto closed = curvature::solvable_curvature_closed_form(C);
    const auto general = curvature::frame_curvature(mapping_torus::solvable_algebra(C));
    CHECK(max_abs(closed.matrix() - general.matrix()) <= 1e-10);
  }
}

TEST_CASE("nil bundle closed form") {
  CHECK(curvature::nil_bundle_curvature_closed_form(2, 0.0).max_abs() == 0.0);
  const auto one = curvature::nil_bundle_curvature_closed_form(2, 1.0);
  CHECK(one(2, 3) == -0.75);
  CHECK(one(0, 2) == 0.25);
  CHECK(one(1, 2) == 0.0);
  for (int n = 1; n <= 3; ++n) {
    Vector b = Vector::Zero(n);
    b(0) = 2.0;
    const auto general = curvature::frame_curvature(torus_bundle::nil_algebra(b));
    CHECK(max_abs(general.matrix() - curvature::nil_bundle_curvature_closed_form(n, 2.0).matrix()) <= 1e-12);
  }
  for (double eta : {1.0, 2.0, 3.0}) {
    const double lam = 1.5;
    const auto scaled = curvature::frame_curvature(torus_bundle::nil_algebra(vec({lam * eta, 0})));
    const auto base = curvature::frame_curvature(torus_bundle::nil_algebra(vec({eta, 0})));
    CHECK(scaled(2, 3) == doctest::Approx(lam * lam * base(2, 3)));
  }
}

TEST_CASE("kappa invariant") {
  CHECK(curvature::kappa_invariant(Matrix::Zero(3, 3)) == 0.0);
  CHECK(curvature::kappa_invariant(mat({{0, 1}, {0, 0}})) == 0.0);
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 4;
    const Matrix C = random_gaussian(rng, n, n);
    const Matrix P = random_frame(rng, n, 0.5);
    const double k0 = curvature::kappa_invariant(C);
    CHECK(std::abs(curvature::kappa_invariant(P.inverse() * C * P) - k0) <= 1e-9 * std::max(1.0, std::abs(k0)));
  }
}

TEST_CASE("trace bounds") {
  auto r = curvature::trace_bounds_check(Matrix::Zero(2, 2), 0.0);
  CHECK(r.holds);
  CHECK(r.trace == 0.0);
  r = curvature::trace_bounds_check(mat({{0, 1}, {0, 0}}), 0.75);
  CHECK(r.trace == 1.0);
  CHECK(r.kappa == 0.0);
  CHECK(r.upper_bound == doctest::Approx(4.5));
  CHECK(r.holds);
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 5;
    const Matrix C = random_gaussian(rng, n, n);
    const double a = curvature::solvable_curvature_closed_form(C).max_abs();
    CHECK(curvature::trace_bounds_check(C, a).holds);
  }
}

TEST_CASE("O'Neill identity on submersions") {
  const curvature::SubmersionSplit split{{0, 1}, {2, 3}};
  const auto N = torus_bundle::nil_algebra(vec({1, 0}));
  CHECK(curvature::oneill_defect(N, split, Matrix::Zero(2, 2)) == doctest::Approx(0.0));
  CHECK(curvature::oneill_defect(lie::abelian(4), split, Matrix::Zero(2, 2)) == 0.0);

  // Heisenberg over T^2 with the centre as fiber, in the scaled frame.
  for (double eps : {1.0, 0.3}) {
    const auto H = oracle::scaled_heisenberg(eps, 1, 1, 2);
    CHECK(curvature::oneill_defect(H, {{2}, {0, 1}}, Matrix::Zero(2, 2)) <= 1e-12);
  }

  // Solvable model: the vertical block is an ideal, the base a line.
  const auto S = mapping_torus::solvable_algebra(mat({{1, 2}, {-3, -1}}));
  CHECK(curvature::base_algebra(S, {{0, 1}, {2}}).dim() == 1);
  CHECK_THROWS(curvature::base_algebra(S, {{2}, {0, 1}}));

  // Random nil-bundle scalings, base T^2 flat.
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 3;
    const Vector b = random_gaussian(rng, n, 1).col(0);
    const auto L = torus_bundle::nil_algebra(b);
    curvature::SubmersionSplit s;
    for (int i = 0; i < n; ++i) s.vertical.push_back(i);
    s.horizontal = {n, n + 1};
    CHECK(curvature::oneill_defect(L, s, Matrix::Zero(2, 2)) <= 1e-10);
    const double a = curvature::frame_curvature(L).max_abs();
    CHECK(curvature::oneill_form_bound_check(L, s, a).holds);
  }
}

TEST_CASE("form bounds") {
  const curvature::SubmersionSplit split{{0, 1}, {2, 3}};
  auto r = curvature::oneill_form_bound_check(lie::abelian(4), split, 0.0);
  CHECK(r.holds);
  CHECK(r.pair_max == 0.0);
  r = curvature::oneill_form_bound_check(torus_bundle::nil_algebra(vec({1, 0})), split, 0.75);
  CHECK(r.pair_max == 1.0);
  CHECK(r.pair_bound == doctest::Approx(2.0));
  CHECK(r.holds);
}

TEST_CASE("sampled curvature is bounded and reproducible") {
  const auto N = torus_bundle::nil_algebra(vec({1, 0}));
  const double s = curvature::sampled_max_abs_curvature(N, 200, 1);
  CHECK(s > 0.0);
  CHECK(s <= 0.75 + 1e-12);
  CHECK(s == curvature::sampled_max_abs_curvature(N, 200, 1));
}
