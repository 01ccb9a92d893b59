#include "collapse/verify.hpp"

#include "collapse/curvature.hpp"
#include "collapse/errors.hpp"
#include "collapse/euler_bound.hpp"
#include "collapse/flat_torus.hpp"
#include "collapse/intlat.hpp"
#include "collapse/lie_complex.hpp"
#include "collapse/mapping_torus.hpp"
#include "collapse/oracles.hpp"
#include "collapse/torus_bundle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace collapse::verify {

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kPi = std::numbers::pi;

class Tally {
 public:
  void at_most(double value, double limit, const std::string& what) { note(limit - value, value <= limit, what); }
  void at_least(double value, double limit, const std::string& what) { note(value - limit, value >= limit, what); }
  void require(bool ok, const std::string& what) {
    if (!ok) fail(what);
  }

  bool ok() const { return ok_; }
  double margin() const { return std::isfinite(worst_) ? worst_ : 0.0; }
  const std::string& detail() const { return detail_; }

 private:
  void note(double slack, bool ok, const std::string& what) {
    if (std::isnan(slack)) slack = -std::numeric_limits<double>::infinity();
    worst_ = std::min(worst_, slack);
    if (!ok) fail(what);
  }
  void fail(const std::string& what) {
    if (ok_) detail_ = what;
    ok_ = false;
  }

  double worst_ = std::numeric_limits<double>::infinity();
  bool ok_ = true;
  std::string detail_;
};

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

double rel_err(double x, double ref) { return std::abs(x - ref) / std::max(std::abs(ref), 1e-300); }

Matrix nil_block(int n) {
  Matrix J = Matrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) J(i, i + 1) = 1;
  return J;
}

Matrix two_nil_blocks() {
  Matrix J = Matrix::Zero(4, 4);
  J(0, 1) = 1;
  J(2, 3) = 1;
  return J;
}

Matrix rotation_log() {
  Matrix B(2, 2);
  B << 0, 2 * kPi, -2 * kPi, 0;
  return B;
}

Matrix cat_log() {
  Matrix A(2, 2);
  A << 2, 1, 1, 1;
  return intlat::principal_log(A);
}

std::vector<Matrix> monodromy_logs() {
  return {nil_block(2), nil_block(3), two_nil_blocks(), cat_log(), rotation_log()};
}

std::vector<double> dyadic_grid(int first, int last) {
  std::vector<double> g;
  for (int j = first; j <= last; ++j) g.push_back(std::ldexp(1.0, -j));
  return g;
}

lie::StructureConstants with_vertical_frame(const Matrix& B, const Matrix& Pv) {
  const int n = static_cast<int>(B.rows());
  Matrix P = Matrix::Identity(n + 1, n + 1);
  P.topLeftCorner(n, n) = Pv;
  return lie::change_frame(mapping_torus::solvable_algebra(B), P);
}

// Mixed sample of algebras in random frames; about half are unimodular.
std::vector<lie::StructureConstants> sample_algebras(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim(2, 4);
  std::vector<lie::StructureConstants> out;
  for (int t = 0; t < count; ++t) {
    lie::StructureConstants L(1);
    switch (t % 5) {
      case 0: {
        const int n = dim(rng);
        L = mapping_torus::solvable_algebra(random_gaussian(rng, n, n));
        break;
      }
      case 1: {
        const int n = dim(rng);
        Matrix C = random_gaussian(rng, n, n);
        C -= (C.trace() / n) * Matrix::Identity(n, n);
        L = mapping_torus::solvable_algebra(C);
        break;
      }
      case 2: L = torus_bundle::nil_algebra(random_gaussian(rng, dim(rng), 1).col(0)); break;
      case 3: L = lie::direct_sum(lie::heisenberg(), lie::abelian(dim(rng) - 1)); break;
      default:
        L = lie::StructureConstants(3, std::vector<lie::BracketEntry>{{0, 1, 2, 1.0}, {1, 2, 0, 1.0}, {2, 0, 1, 1.0}});
    }
    out.push_back(lie::change_frame(L, random_frame(rng, L.dim(), 0.5)));
  }
  return out;
}

std::vector<Matrix> sample_grams(std::uint64_t seed) {
  auto m2 = [](double a, double b, double c) {
    Matrix g(2, 2);
    g << a, b, b, c;
    return g;
  };
  Matrix g3(3, 3);
  g3 << 1, 0.2, 0.1, 0.2, 2, -0.3, 0.1, -0.3, 0.7;
  std::vector<Matrix> g{Matrix::Identity(2, 2), m2(4, 0, 0.25), m2(1, 0.5, 1), m2(1, 0.3, 1.09),
                        m2(2, 0.9, 0.5), Matrix::Identity(3, 3), g3};
  std::mt19937_64 rng(seed);
  for (int t = 0; t < 5; ++t) {
    const Matrix A = random_frame(rng, 2 + t % 2, 0.6);
    g.push_back(A.transpose() * A);
  }
  return g;
}

Matrix random_integer(std::mt19937_64& rng, int r, int c, int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = d(rng);
  return m;
}

double pseudo_det(const Matrix& A) {
  const auto sv = singular_values(A);
  double p = 1.0;
  for (double s : sv)
    if (s > 1e-9 * std::max(1.0, sv.front())) p *= s;
  return p;
}

long binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// ---------------------------------------------------------------------------

void heisenberg_scaling(Tally& t, std::uint64_t) {
  const auto start = Clock::now();
  const int triples[2][3] = {{1, 1, 3}, {1, 1, 2}};
  for (const auto& e : triples) {
    const int tau = e[2] - e[0] - e[1];
    for (double eps : {0.5, 0.1, 0.01}) {
      Matrix P = Matrix::Zero(3, 3);
      for (int i = 0; i < 3; ++i) P(i, i) = std::pow(eps, -e[i]);
      const auto L = lie::change_frame(lie::heisenberg(), P);
      const auto nz = lie::spectrum(L, 1).nonzero();
      const std::string at = "(" + std::to_string(e[0]) + "," + std::to_string(e[1]) + "," +
                             std::to_string(e[2]) + ") eps=" + fmt(eps);
      t.require(nz.size() == 1, at + ": expected one nonzero eigenvalue");
      if (nz.size() != 1) continue;
      const double predicted = std::pow(eps, 2 * tau);
      t.at_most(rel_err(nz[0], predicted), 1e-10, at + ": eigenvalue off");
      const auto by_hand = lie::spectrum(oracle::scaled_heisenberg(eps, e[0], e[1], e[2]), 1).nonzero();
      t.require(by_hand.size() == 1 && rel_err(by_hand[0], nz[0]) <= 1e-12, at + ": frame change disagrees");
    }
  }
  t.require(std::chrono::duration<double>(Clock::now() - start).count() < 1.0, "runtime above 1 s");
}

void closed_form_laplacian(Tally& t, std::uint64_t seed) {
  std::mt19937_64 rng(split_seed(seed, 2));
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 5;
    const Matrix C = random_gaussian(rng, n, n);
    const Matrix general = lie::laplacian(mapping_torus::solvable_algebra(C), 1);
    const std::string at = "trial " + std::to_string(trial);
    t.at_most(max_abs(general - mapping_torus::laplacian1_fast(C)), 1e-12, at + ": closed form differs");
    t.at_most(max_abs(general - oracle::solvable_laplacian1(C)), 1e-12, at + ": entrywise oracle differs");
  }
}

void complex_validity(Tally& t, std::uint64_t seed) {
  int unimodular = 0;
  for (const auto& L : sample_algebras(40, split_seed(seed, 3))) {
    const int n = L.dim();
    const double scale = std::max(1.0, L.max_abs() * L.max_abs());
    for (int p = 0; p + 1 < n; ++p) {
      const Matrix dd = lie::exterior_derivative(L, p + 1) * lie::exterior_derivative(L, p);
      t.at_most(max_abs(dd) / scale, 1e-12, "d∘d nonzero in degree " + std::to_string(p));
    }
    for (int p = 0; p <= n; ++p) {
      const Matrix D = lie::laplacian(L, p);
      t.at_most(max_abs(D - D.transpose()), 1e-12, "laplacian not symmetric");
      const auto ev = symmetric_eigenvalues(D);
      t.at_least(ev.front() / scale, -1e-12, "laplacian has a negative eigenvalue");
    }
    if (lie::unimodularity_defect(L) > 1e-12) continue;
    ++unimodular;
    for (int p = 0; p <= n; ++p) {
      const auto a = lie::spectrum(L, p).eigenvalues, b = lie::spectrum(L, n - p).eigenvalues;
      t.require(a.size() == b.size(), "dual degrees have different sizes");
      for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
        t.at_most(std::abs(a[i] - b[i]) / std::max(1.0, std::abs(a[i])), 1e-9, "duality broken in degree " + std::to_string(p));
    }
  }
  t.at_least(unimodular, 10, "too few unimodular samples");
}

void kernel_dimension(Tally& t, std::uint64_t seed) {
  std::mt19937_64 rng(split_seed(seed, 4));
  int m = 0;
  for (const Matrix& B : monodromy_logs()) {
    const auto z = mapping_torus::invariants_dd(B);
    const int n = static_cast<int>(B.rows());
    for (int trial = 0; trial < 50; ++trial) {
      const auto s = lie::spectrum(with_vertical_frame(B, random_frame(rng, n, 1.0)), 1);
      const std::string at = "matrix " + std::to_string(m) + " trial " + std::to_string(trial);
      t.require(s.kernel_dim == z.d_prime + 1, at + ": kernel is not d'+1");
      t.require(static_cast<int>(s.nonzero().size()) == n - z.d_prime, at + ": nonzero count is not n-d'");
      const auto nz = s.nonzero();
      if (!nz.empty()) t.at_least(nz.front(), lie::kEigTol, at + ": nonzero eigenvalue near the kernel tolerance");
    }
    ++m;
  }
}

void collapse_counts(Tally& t, std::uint64_t) {
  const auto grid = dyadic_grid(1, 10);
  const double one[] = {1.0};
  int m = 0;
  for (const Matrix& B : {nil_block(2), nil_block(3), two_nil_blocks()}) {
    const auto z = mapping_torus::invariants_dd(B);
    for (int k = 0; k <= z.d - z.d_prime; ++k) {
      const auto fam = mapping_torus::collapse_family(B, k);
      const auto table = mapping_torus::run_collapse(fam, grid);
      const double trace1 = mapping_torus::run_collapse(fam, one).rows.front().trace;
      const auto at1 = mapping_torus::run_collapse(fam, one).rows.front().eigenvalues;
      const std::string at = "matrix " + std::to_string(m) + " k=" + std::to_string(k);
      for (const auto& r : table.rows) {
        t.at_most(r.trace, trace1 + 1e-9, at + ": trace grows");
        const auto nz = lie::spectrum_of(r.eigenvalues).nonzero();
        if (10 * r.eps * r.eps <= 1e-2) t.require(r.small_count == k, at + " eps=" + fmt(r.eps) + ": wrong small count");
        if (static_cast<int>(nz.size()) > k) t.at_least(nz[k], 1e-2, at + ": eigenvalue k+1 drops");
        if (k == 0) t.require(r.eigenvalues == at1, at + ": homothety changed the spectrum");
      }
    }
    ++m;
  }
  // Homothety on the non-nilpotent monodromies too.
  const auto wide = dyadic_grid(0, 10);
  for (const Matrix& B : {cat_log(), rotation_log()}) {
    const auto table = mapping_torus::run_collapse(B, 0, wide);
    for (const auto& r : table.rows)
      t.require(r.eigenvalues == table.rows.front().eigenvalues, "homothety changed a semisimple spectrum");
  }
}

void betti_numbers(Tally& t, std::uint64_t seed) {
  using intlat::IntegerMatrix;
  t.require(intlat::betti1_mapping_torus(IntegerMatrix::identity(2)).betti1 == 3, "b1(I) != 3");
  t.require(intlat::betti1_mapping_torus(IntegerMatrix{{1, 1}, {0, 1}}).betti1 == 2, "b1(shear) != 2");
  t.require(intlat::betti1_mapping_torus(IntegerMatrix{{2, 1}, {1, 1}}).betti1 == 1, "b1(cat) != 1");
  std::mt19937_64 rng(split_seed(seed, 6));
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 3;
    IntegerMatrix A = IntegerMatrix::identity(n);
    std::uniform_int_distribution<int> idx(0, n - 1), q(-2, 2);
    for (int s = 0; s < 6; ++s) {
      const int i = idx(rng), j = idx(rng);
      if (i != j) A.add_row_multiple(i, j, q(rng));
    }
    const std::string at = "random SL trial " + std::to_string(trial);
    t.require(intlat::determinant(A) == 1, at + ": not in SL");
    t.require(intlat::betti1_mapping_torus(A).betti1 == oracle::betti1_rational(A), at + ": rank oracle disagrees");
  }
}

void hyperbolic_example(Tally& t, std::uint64_t) {
  Matrix A1(2, 2);
  A1 << 2, 1, 1, 1;
  const double lambda = std::log(symmetric_eigenvalues(A1).back());

  Matrix A = Matrix::Zero(4, 4);
  A.topLeftCorner(2, 2) = A1;
  A.bottomRightCorner(2, 2) = A1;
  A(0, 3) = 1;
  Matrix C0 = Matrix::Zero(4, 4);
  C0(0, 0) = C0(1, 1) = lambda;
  C0(2, 2) = C0(3, 3) = -lambda;
  C0(0, 1) = std::exp(-lambda);
  C0(2, 3) = std::exp(lambda);
  const Matrix expC = intlat::matrix_exp(C0);
  t.at_most(std::abs(expC.trace() - A.trace()), 1e-10, "exp(C) trace differs from the monodromy");
  t.at_most(std::abs(expC.determinant() - 1.0), 1e-10, "exp(C) is not unimodular");

  const lie::FormBasis b2(5, 2), b3(5, 3);
  auto mask = [](std::initializer_list<int> idx) {
    std::uint32_t m = 0;
    for (int i : idx) m |= 1u << i;
    return m;
  };
  const lie::StructureConstants base = mapping_torus::solvable_algebra(C0);
  std::vector<double> ratios;
  for (double eps : {0.08, 0.04, 0.02, 0.01, 0.005}) {
    const double alpha = 1.0;
    Matrix P = Matrix::Identity(5, 5);
    P(0, 0) = std::pow(eps, alpha);
    P(1, 1) = std::pow(eps, alpha + 1) * std::exp(lambda);
    P(2, 2) = std::pow(eps, alpha);
    P(3, 3) = std::pow(eps, alpha + 1) * std::exp(-lambda);
    const lie::StructureConstants L = lie::change_frame(base, P);
    const std::string at = "eps=" + fmt(eps);

    Matrix Ce = Matrix::Zero(4, 4);
    Ce(0, 0) = Ce(1, 1) = lambda;
    Ce(2, 2) = Ce(3, 3) = -lambda;
    Ce(0, 1) = Ce(2, 3) = eps;
    t.at_most(max_abs(mapping_torus::vertical_block(L) - Ce), 1e-12, at + ": rescaled block");

    Matrix expected = Matrix::Zero(b3.size(), b2.size());
    auto put = [&](std::initializer_list<int> row, std::initializer_list<int> col, double v) {
      expected(b3.rank_of(mask(row)), b2.rank_of(mask(col))) = v;
    };
    put({0, 1, 4}, {0, 1}, -2 * lambda);
    put({1, 2, 4}, {0, 2}, -eps);
    put({0, 3, 4}, {0, 2}, -eps);
    put({1, 3, 4}, {0, 3}, -eps);
    put({1, 3, 4}, {1, 2}, -eps);
    put({2, 3, 4}, {2, 3}, 2 * lambda);
    t.at_most(max_abs(lie::exterior_derivative(L, 2) - expected), 1e-12, at + ": d on 2-forms");

    ratios.push_back(lie::spectrum(L, 2).smallest_nonzero() / (eps * eps));
  }
  for (std::size_t i = 1; i < ratios.size(); ++i)
    t.at_most(std::abs(ratios[i] / ratios[i - 1] - 1.0), 0.05, "small eigenvalue is not of order eps^2");
}

void nil_bundle_spectrum(Tally& t, std::uint64_t seed) {
  std::mt19937_64 rng(split_seed(seed, 8));
  for (int n = 1; n <= 3; ++n) {
    const Vector b = random_gaussian(rng, n, 1).col(0);
    const double eta2 = b.squaredNorm();
    const std::string at = "n=" + std::to_string(n);
    for (int p = 0; p <= n + 2; ++p) {
      const auto cmp = torus_bundle::verify_spectrum(p, b);
      t.at_most(cmp.max_diff / std::max(1.0, eta2), 1e-10, at + " p=" + std::to_string(p) + ": spectrum");
      if (p < 1 || p > n + 1) continue;
      const auto split = torus_bundle::eigenform_split(p, b);
      t.require(split.eigen_dim == binomial(n, p - 1), at + ": multiplicity");
      t.require(split.closed_dim == binomial(n - 1, p - 2), at + ": closed part");
      t.require(split.coclosed_dim == binomial(n - 1, p - 1), at + ": coclosed part");
    }
    const auto cb = torus_bundle::curvature_bound_check(b);
    t.require(cb.holds, at + ": curvature maximum is not 3/4 eta^2");
    t.at_most(std::abs(cb.max_abs - 0.75 * eta2) / std::max(1.0, eta2), 1e-12, at + ": curvature maximum");

    const lie::StructureConstants L = torus_bundle::nil_algebra(b);
    curvature::SubmersionSplit split;
    for (int i = 0; i < n; ++i) split.vertical.push_back(i);
    split.horizontal = {n, n + 1};
    const Matrix base = curvature::frame_curvature(curvature::base_algebra(L, split)).matrix();
    t.at_most(curvature::oneill_defect(L, split, base), 1e-10, at + ": O'Neill defect");
  }
}

void contrasting_collapses(Tally& t, std::uint64_t) {
  const auto grid = dyadic_grid(1, 10);
  const Vector b = torus_bundle::TorusBundleOverT2({1, 2}).bracket();
  const auto tr = torus_bundle::collapse_direction(b, {1, 1}, grid);
  t.require(tr.vanishes, "fiber homothety should collapse the spectrum");
  for (const auto& r : tr.rows) {
    t.at_most(rel_err(r.eigenvalue / (r.eps * r.eps), b.squaredNorm()), 1e-12, "torus bundle: eigenvalue/eps^2");
    Matrix P = Matrix::Identity(4, 4);
    P(0, 0) = P(1, 1) = 1 / r.eps;
    const double direct = lie::spectrum(lie::change_frame(torus_bundle::nil_algebra(b), P), 1).smallest_nonzero();
    t.at_most(rel_err(direct, r.eigenvalue), 1e-10, "torus bundle: rescaled frame spectrum");
  }
  const auto mt = mapping_torus::run_collapse(cat_log(), 0, grid);
  const auto first = lie::spectrum_of(mt.rows.front().eigenvalues).nonzero();
  t.require(!first.empty(), "mapping torus: no nonzero eigenvalue");
  for (const auto& r : mt.rows) t.require(r.eigenvalues == mt.rows.front().eigenvalues, "mapping torus: homothety moved the spectrum");
  if (!first.empty()) t.at_least(first.front(), 1e-2, "mapping torus: eigenvalue near zero");

  const Vector b3 = torus_bundle::TorusBundleOverT2({3, 4, 12}).bracket();
  const auto partial = torus_bundle::collapse_direction(b3, {1, 0, 0}, grid);
  t.require(partial.limit == 16.0 + 144.0, "partial collapse limit is not the sum of the fixed squares");
  t.require(!partial.vanishes, "partial collapse should not vanish");
  t.at_most(rel_err(partial.rows.back().eigenvalue, 160.0), 1e-4, "partial collapse trajectory");
}

void flat_thresholds(Tally& t, std::uint64_t seed) {
  using flat_torus::FlatTorus;
  auto circle = [](double len) { return FlatTorus(Matrix::Constant(1, 1, len * len)); };
  const auto grams = sample_grams(split_seed(seed, 10));

  std::vector<std::pair<FlatTorus, FlatTorus>> products{{circle(1), circle(0.1)},
                                                        {circle(1), FlatTorus(Matrix::Identity(2, 2))}};
  for (const Matrix& g : grams)
    if (g.rows() == 2) products.emplace_back(circle(2.0), FlatTorus(Matrix(g * 0.05)));
  int attained = 0, cases = 0;
  for (const auto& [base, fiber] : products)
    for (int p = 0; p <= base.dim() + fiber.dim(); ++p) {
      const auto r = flat_torus::threshold_check_product(base, fiber, p);
      t.require(r.holds, "non-invariant mode below the fiber threshold");
      t.at_least(r.min_noninvariant, r.fiber_lambda01, "threshold");
      attained += r.attained;
      ++cases;
    }
  t.require(attained == cases, "threshold is not attained on every product");

  for (double s : {0.0, 0.3, 0.7}) {
    const auto a = flat_torus::p_form_spectrum(flat_torus::gt_gram(s), 0, 400).eigenvalues();
    const auto b = flat_torus::p_form_spectrum(flat_torus::gt_gram(s + 1), 0, 400).eigenvalues();
    t.require(a.size() == b.size(), "g_t spectra differ in size");
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
      t.at_most(std::abs(a[i] - b[i]) / std::max(1.0, a[i]), 1e-12, "g_t spectra differ");
    const auto da = flat_torus::diameter(flat_torus::gt_gram(s)), db = flat_torus::diameter(flat_torus::gt_gram(s + 1));
    t.at_most(std::abs(da.value - db.value), da.error + db.error, "g_t diameters differ");
  }

  for (const Matrix& g : grams) {
    const auto r = flat_torus::diameter_eigenvalue_bound_check(FlatTorus(g), g.rows() == 3 ? 1.0 / 40
                                                                                           : flat_torus::kDefaultResolution);
    t.at_least(r.margin, 0.0, "lambda01 below (pi/diam)^2");
  }
}

void euler_chain(Tally& t, std::uint64_t seed) {
  std::mt19937_64 rng(split_seed(seed, 11));
  auto random_gram = [&](int k) {
    const Matrix A = random_frame(rng, k, 0.5);
    return Matrix(A.transpose() * A);
  };
  int accepted = 0;
  for (int trial = 0; accepted < 50; ++trial) {
    const int k = 1 + trial % 4;
    const Matrix E = random_integer(rng, k + trial % 3, k, -4, 4);
    if (singular_values(E).back() < 1e-6) continue;
    const Matrix G = random_gram(k);
    const auto c = euler::bound_chain(E, G);
    t.at_least(c.margin_low, -1e-10 * std::max(1.0, c.det_ratio), "lambda_min below Det/||.||^{k-1}");
    t.at_least(c.margin_high, -1e-10 * std::max(1.0, c.det_bound), "determinant bound violated");
    t.at_most(euler::det_factorization(E, G).rel_err, 1e-10, "Det e != Det'e Vol");
    ++accepted;
  }

  for (int trial = 0, done = 0; done < 10; ++trial) {
    const int k = 2 + trial % 3, rank = 1 + trial % (k - 1);
    const Matrix E = random_integer(rng, rank + 1, rank, -3, 3) * random_integer(rng, rank, k, -3, 3);
    const Matrix G = random_gram(k);
    if (numeric_rank(E, 1e-9) != rank) continue;
    const auto r = euler::noninjective_reduce(E, G);
    const Matrix K = r.kernel.to_real();
    const std::string at = "quotient " + std::to_string(done);
    t.require(max_abs(E * K) == 0.0, at + ": kernel basis not in the kernel");
    t.require(r.kernel_dim == k - rank, at + ": kernel rank");
    t.at_most(rel_err(r.det_P1, std::sqrt((K.transpose() * G * K).determinant())), 1e-10, at + ": kernel covolume");
    t.at_most(rel_err(r.det_A, pseudo_det(euler::orthonormal_matrix(E, G))), 1e-9, at + ": restricted determinant");
    t.at_most(r.identity_rel_err, 1e-10, at + ": determinant identity");
    t.require(r.chain.ok, at + ": bound chain on the restriction");
    ++done;
  }

  using flat_torus::FlatTorus;
  t.at_most(std::abs(euler::rho_flat(FlatTorus(Matrix::Identity(2, 2))).rho - 1.0), 1e-12, "rho(T^2)");
  t.at_most(std::abs(euler::rho_flat(FlatTorus(Matrix::Identity(3, 3))).rho - 1.0), 1e-12, "rho(T^3)");
}

struct Entry {
  const char* name;
  void (*run)(Tally&, std::uint64_t);
};

constexpr Entry kCriteria[kLibraryCriteria] = {
    {"heisenberg-scaling", heisenberg_scaling},
    {"closed-form-laplacian", closed_form_laplacian},
    {"complex-validity", complex_validity},
    {"kernel-dimension", kernel_dimension},
    {"collapse-counts", collapse_counts},
    {"betti-numbers", betti_numbers},
    {"hyperbolic-example", hyperbolic_example},
    {"nil-bundle-spectrum", nil_bundle_spectrum},
    {"contrasting-collapses", contrasting_collapses},
    {"flat-thresholds", flat_thresholds},
    {"euler-chain", euler_chain},
};

}  // namespace

Criterion run_criterion(int id, std::uint64_t seed) {
  if (id < 1 || id > kLibraryCriteria) throw Error("no criterion " + std::to_string(id));
  const Entry& e = kCriteria[id - 1];
  Tally t;
  const auto start = Clock::now();
  try {
    e.run(t, seed);
  } catch (const std::exception& ex) {
    t.require(false, std::string("threw: ") + ex.what());
  }
  Criterion c;
  c.id = id;
  c.name = e.name;
  c.pass = t.ok();
  c.margin = t.margin();
  c.detail = t.detail();
  c.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return c;
}

std::vector<Criterion> run_library_criteria(std::uint64_t seed) {
  std::vector<Criterion> out;
  for (int id = 1; id <= kLibraryCriteria; ++id) out.push_back(run_criterion(id, seed));
  return out;
}

}  // namespace collapse::verify
