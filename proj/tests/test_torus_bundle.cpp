#include "doctest.h"

#include "collapse/curvature.hpp"
#include "collapse/errors.hpp"
#include "collapse/torus_bundle.hpp"
#include "support.hpp"

using namespace collapse;
using namespace collapse::torus_bundle;
using testing::vec;

namespace {

long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

int count_value(const lie::SpectrumReport& s, double x, double tol) {
  int c = 0;
  for (double e : s.eigenvalues)
    if (std::abs(e - x) <= tol) ++c;
  return c;
}

}  // namespace

TEST_CASE("bundle data and reduction") {
  CHECK_THROWS_AS(TorusBundleOverT2({0, 0}), TrivialBundle);
  auto r = reduce(TorusBundleOverT2({3, 6}));
  CHECK(r.d == 3);
  CHECK(r.model == "N_3 x T^1");
  CHECK(r.P == (intlat::IntegerMatrix{{1, 0}, {2, 1}}));
  r = reduce(TorusBundleOverT2({1, 0, 0}));
  CHECK(r.d == 1);
  CHECK(r.P == intlat::IntegerMatrix::identity(3));
  r = reduce(TorusBundleOverT2({1}));
  CHECK(r.model == "N_1");
  CHECK(TorusBundleOverT2({3, 6}).bracket() == vec({3, 6}));
}

TEST_CASE("nil algebra") {
  CHECK(nil_algebra(vec({0, 0})) == lie::abelian(4));
  const auto L = nil_algebra(vec({1, 0}));
  REQUIRE(L.entries().size() == 1);
  CHECK(L(2, 3, 0) == 1.0);
  CHECK(lie::jacobi_defect(nil_algebra(vec({0.3, -2, 5}))) == 0.0);
  const auto a = lie::spectrum(nil_algebra(vec({0.6, 0.8})), 2).eigenvalues;
  const auto b = lie::spectrum(nil_algebra(vec({1, 0})), 2).eigenvalues;
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("predicted spectrum") {
  auto s = predict_spectrum(2, 1, 1.0);
  CHECK(s.kernel_dim == 3);
  CHECK(count_value(s, 1.0, 0) == 1);
  s = predict_spectrum(2, 2, 1.0);
  CHECK(s.kernel_dim == 4);
  CHECK(count_value(s, 1.0, 0) == 2);
  s = predict_spectrum(3, 2, 0.0);
  CHECK(s.kernel_dim == 10);
  s = predict_spectrum(1, 1, 3.0, 2.0);
  CHECK(s.smallest_nonzero() == doctest::Approx(9.0 / 4.0));
  CHECK_THROWS_AS(predict_spectrum(2, 5, 1.0), DegreeOutOfRange);
}

TEST_CASE("computed spectrum matches the prediction") {
  CHECK(verify_spectrum(1, vec({1, 0})).max_diff <= 1e-12);
  const auto c = verify_spectrum(2, vec({0, 0, 2}));
  CHECK(c.max_diff <= 1e-12);
  CHECK(count_value(c.computed, 4.0, 1e-12) == 3);
  CHECK(verify_spectrum(0, vec({1, 0})).computed.kernel_dim == 1);

  std::mt19937_64 rng(3);
  for (int n = 1; n <= 3; ++n)
    for (int t = 0; t < 5; ++t) {
      const Vector b = random_gaussian(rng, n, 1).col(0);
      for (int p = 0; p <= n + 2; ++p) {
        const auto cmp = verify_spectrum(p, b);
        CHECK(cmp.max_diff <= 1e-10 * std::max(1.0, b.squaredNorm()));
        if (p >= 1 && p <= n + 1)
          CHECK(count_value(cmp.computed, b.squaredNorm(), 1e-10 * std::max(1.0, b.squaredNorm())) == binom(n, p - 1));
      }
    }
}

TEST_CASE("closed and coclosed eigenforms") {
  for (int n = 1; n <= 3; ++n) {
    Vector b = Vector::Zero(n);
    b(0) = 1.5;
    for (int p = 1; p <= n + 1; ++p) {
      const auto s = eigenform_split(p, b);
      CHECK(s.eigen_dim == binom(n, p - 1));
      CHECK(s.closed_dim == binom(n - 1, p - 2));
      CHECK(s.coclosed_dim == binom(n - 1, p - 1));
      CHECK(s.closed_dim + s.coclosed_dim == s.eigen_dim);
    }
  }
}

TEST_CASE("connection choice does not change the spectrum") {
  const Vector b = vec({1.0, -0.5});
  const auto L = nil_algebra(b);
  Matrix P = Matrix::Identity(4, 4);
  P(0, 2) = 0.7;  // Y1 + 0.7 V1
  P(1, 3) = -1.3; // Y2 - 1.3 V2
  const auto L2 = lie::change_frame(L, P);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) CHECK(std::abs(L2(i, j, k) - L(i, j, k)) <= 1e-14);
  for (int p = 0; p <= 4; ++p) {
    const auto a = lie::spectrum(L, p).eigenvalues, c = lie::spectrum(L2, p).eigenvalues;
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - c[i]) <= 1e-12);
  }
}

TEST_CASE("collapse directions") {
  const double grid[] = {0.5, 0.1, 0.01};
  auto t = collapse_direction(vec({1, 1}), {1, 1}, grid);
  CHECK(t.vanishes);
  for (const auto& r : t.rows) CHECK(r.eigenvalue == doctest::Approx(2 * r.eps * r.eps).epsilon(1e-14));
  t = collapse_direction(vec({3, 4}), {1, 0}, grid);
  CHECK_FALSE(t.vanishes);
  CHECK(t.limit == 16.0);
  t = collapse_direction(vec({3, 4}), {0, 0}, grid);
  for (const auto& r : t.rows) CHECK(r.eigenvalue == 25.0);
  t = collapse_direction(vec({1, 1}), {mpq_class(1, 2), 2}, grid);
  CHECK(t.vanishes);
  CHECK_THROWS(collapse_direction(vec({1, 1}), {-1, 0}, grid));
  CHECK(t.to_csv().rfind("eps,eigenvalue,limit_class\n", 0) == 0);
}

TEST_CASE("curvature bound") {
  auto r = curvature_bound_check(vec({1, 0}));
  CHECK(r.max_abs == doctest::Approx(0.75));
  CHECK(r.holds);
  r = curvature_bound_check(vec({0, 0}));
  CHECK(r.max_abs == 0.0);
  CHECK(r.holds);
  r = curvature_bound_check(vec({2, 0}));
  CHECK(r.max_abs == doctest::Approx(3.0));
  CHECK(r.at_base_pair == doctest::Approx(-3.0));
  std::mt19937_64 rng(8);
  for (int t = 0; t < 10; ++t) CHECK(curvature_bound_check(random_gaussian(rng, 1 + t % 3, 1).col(0)).holds);
}

TEST_CASE("product bundles") {
  const auto s = product_bundle_spectrum(vec({1}), vec({2}), 1);
  const auto nz = s.nonzero();
  REQUIRE(nz.size() == 2);
  CHECK(nz[0] == doctest::Approx(1.0));
  CHECK(nz[1] == doctest::Approx(4.0));

  const auto trivial = product_bundle_spectrum(vec({1}), vec({0}), 1);
  CHECK(trivial.nonzero().size() == 1);

  for (int p = 0; p <= 6; ++p) {
    const auto merged = product_bundle_spectrum(vec({1}), vec({2}), p);
    const auto direct = lie::spectrum(lie::direct_sum(nil_algebra(vec({1})), nil_algebra(vec({2}))), p);
    REQUIRE(merged.eigenvalues.size() == direct.eigenvalues.size());
    for (std::size_t i = 0; i < direct.eigenvalues.size(); ++i)
      CHECK(std::abs(merged.eigenvalues[i] - direct.eigenvalues[i]) <= 1e-12);
  }
}
