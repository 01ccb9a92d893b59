#include "collapse/scenarios.hpp"

#include "collapse/csv.hpp"
#include "collapse/curvature.hpp"
#include "collapse/errors.hpp"
#include "collapse/euler_bound.hpp"
#include "collapse/flat_torus.hpp"
#include "collapse/intlat.hpp"
#include "collapse/lie_complex.hpp"
#include "collapse/mapping_torus.hpp"
#include "collapse/torus_bundle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

namespace collapse::cli {

namespace {

using Clock = std::chrono::steady_clock;
using Ordered = nlohmann::ordered_json;
constexpr double kPi = std::numbers::pi;

[[noreturn]] void invalid(const std::string& key, const std::string& why) { throw ConfigInvalid(key + ": " + why); }

// ---------------------------------------------------------------------------
// Parameter access. Every error names the key it came from.

double as_number(const Json& v, const std::string& key) {
  if (!v.is_number()) invalid(key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) invalid(key, "must be finite");
  return x;
}

long as_integer(const Json& v, const std::string& key, long lo, long hi) {
  if (!v.is_number_integer()) invalid(key, "expected an integer");
  const long x = v.get<long>();
  if (x < lo || x > hi) invalid(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return x;
}

mpq_class as_rational(const Json& v, const std::string& key) {
  if (v.is_number_integer()) return mpq_class(v.get<long>());
  if (v.is_string()) {
    mpq_class q;
    if (q.set_str(v.get<std::string>(), 10) != 0) invalid(key, "not a rational number");
    q.canonicalize();
    return q;
  }
  invalid(key, "expected an integer or a \"p/q\" string");
}

// Text block (rows on lines or separated by ';') or an array of rows.
Matrix as_matrix(const Json& v, const std::string& key) {
  std::vector<std::vector<double>> rows;
  if (v.is_string()) {
    std::string text = v.get<std::string>();
    std::replace(text.begin(), text.end(), ';', '\n');
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      std::istringstream cells(line);
      std::vector<double> row;
      std::string tok;
      while (cells >> tok) {
        std::size_t used = 0;
        double x = 0;
        try {
          x = std::stod(tok, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != tok.size() || !std::isfinite(x)) invalid(key, "bad entry '" + tok + "'");
        row.push_back(x);
      }
      if (!row.empty()) rows.push_back(std::move(row));
    }
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_array()) invalid(key, "rows must be arrays");
      std::vector<double> row;
      for (std::size_t j = 0; j < v[i].size(); ++j)
        row.push_back(as_number(v[i][j], key + "[" + std::to_string(i) + "][" + std::to_string(j) + "]"));
      rows.push_back(std::move(row));
    }
  } else {
    invalid(key, "expected a matrix text block or an array of rows");
  }
  if (rows.empty() || rows.front().empty()) invalid(key, "empty matrix");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) invalid(key, "rows have different lengths");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

class Params {
 public:
  explicit Params(const Json& j) : j_(j) {}

  const Json& at(const std::string& key) const {
    if (!j_.contains(key)) invalid(key, "missing");
    return j_.at(key);
  }
  double number(const std::string& key) const { return as_number(at(key), key); }
  double positive(const std::string& key) const {
    const double x = number(key);
    if (!(x > 0)) invalid(key, "must be positive");
    return x;
  }
  double in_range(const std::string& key, double lo, double hi) const {
    const double x = number(key);
    if (!(x > lo && x <= hi)) invalid(key, "must lie in (" + csv::number(lo) + ", " + csv::number(hi) + "]");
    return x;
  }
  int integer(const std::string& key, long lo, long hi) const { return static_cast<int>(as_integer(at(key), key, lo, hi)); }

  const Json& array(const std::string& key, std::size_t min_size, std::size_t max_size) const {
    const Json& v = at(key);
    if (!v.is_array()) invalid(key, "expected an array");
    if (v.size() < min_size || v.size() > max_size)
      invalid(key, "expected between " + std::to_string(min_size) + " and " + std::to_string(max_size) + " entries");
    return v;
  }

  std::vector<double> eps_grid(const std::string& key = "eps_grid") const {
    const Json& v = array(key, 1, 64);
    std::vector<double> g;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double e = as_number(v[i], key + "[" + std::to_string(i) + "]");
      if (!(e > 0.0 && e <= 1.0)) invalid(key, "every eps must lie in (0, 1]");
      g.push_back(e);
    }
    return g;
  }

  std::vector<double> numbers(const std::string& key, std::size_t min_size, std::size_t max_size) const {
    const Json& v = array(key, min_size, max_size);
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], key + "[" + std::to_string(i) + "]"));
    return out;
  }

  std::vector<mpz_class> integers(const std::string& key, std::size_t min_size, std::size_t max_size) const {
    const Json& v = array(key, min_size, max_size);
    std::vector<mpz_class> out;
    for (std::size_t i = 0; i < v.size(); ++i)
      out.emplace_back(as_integer(v[i], key + "[" + std::to_string(i) + "]", -1000000, 1000000));
    return out;
  }

  std::vector<mpq_class> rationals(const Json& v, const std::string& key, std::size_t size) const {
    if (!v.is_array() || v.size() != size) invalid(key, "expected " + std::to_string(size) + " exponents");
    std::vector<mpq_class> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(as_rational(v[i], key + "[" + std::to_string(i) + "]"));
      if (out.back() < 0) invalid(key, "exponents must be nonnegative");
    }
    return out;
  }

  Matrix matrix(const std::string& key) const { return as_matrix(at(key), key); }

 private:
  const Json& j_;
};

// ---------------------------------------------------------------------------
// Named checks; repeated names fold into one entry (all must pass, worst margin).

class Checks {
 public:
  void at_most(const std::string& name, double value, double limit) { add(name, value <= limit, limit - value); }
  void at_least(const std::string& name, double value, double limit) { add(name, value >= limit, value - limit); }
  // Exact (integer or equality) checks carry a zero margin.
  void require(const std::string& name, bool ok) { add(name, ok, 0.0); }

  std::vector<Check> take() { return std::move(checks_); }

 private:
  void add(const std::string& name, bool ok, double margin) {
    if (!std::isfinite(margin)) margin = ok ? 0.0 : -1.0;
    auto it = std::find_if(checks_.begin(), checks_.end(), [&](const Check& c) { return c.name == name; });
    if (it == checks_.end()) {
      checks_.push_back({name, ok, margin});
    } else {
      it->pass = it->pass && ok;
      it->margin = std::min(it->margin, margin);
    }
  }

  std::vector<Check> checks_;
};

struct Context {
  const ScenarioConfig& config;
  Params params;
  Checks checks;
  std::vector<Artifact> artifacts;

  void emit(std::string file, const csv::Writer& w) { emit(std::move(file), w.str()); }
  void emit(std::string file, std::string text) { artifacts.push_back({std::move(file), std::move(text)}); }
};

double rel_err(double x, double ref) { return std::abs(x - ref) / std::max(std::abs(ref), 1e-300); }

long binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

Json dyadic_grid(int first, int last) {
  Json g = Json::array();
  for (int j = first; j <= last; ++j) g.push_back(std::ldexp(1.0, -j));
  return g;
}

lie::StructureConstants with_vertical_frame(const Matrix& B, const Matrix& Pv) {
  const int n = static_cast<int>(B.rows());
  Matrix P = Matrix::Identity(n + 1, n + 1);
  P.topLeftCorner(n, n) = Pv;
  return lie::change_frame(mapping_torus::solvable_algebra(B), P);
}

torus_bundle::TorusBundleOverT2 make_bundle(const Params& p, const std::string& key, double area = 1.0) {
  try {
    return torus_bundle::TorusBundleOverT2(p.integers(key, 1, 6), area);
  } catch (const TrivialBundle&) {
    invalid(key, "the zero vector gives the trivial bundle");
  }
}

Matrix random_integer(std::mt19937_64& rng, int r, int c, int range) {
  std::uniform_int_distribution<int> d(-range, range);
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = d(rng);
  return m;
}

Matrix random_gram(std::mt19937_64& rng, int k) {
  const Matrix A = random_frame(rng, k, 0.5);
  return A.transpose() * A;
}

double pseudo_det(const Matrix& A) {
  const auto sv = singular_values(A);
  double p = 1.0;
  for (double s : sv)
    if (s > 1e-9 * std::max(1.0, sv.front())) p *= s;
  return p;
}

// ---------------------------------------------------------------------------
// Scenarios

void heisenberg(Context& c) {
  const Json& triples = c.params.array("exponents", 1, 16);
  const auto grid = c.params.eps_grid();
  const double tol = c.params.positive("tolerance");
  csv::Writer w({"alpha", "beta", "gamma", "eps", "lambda", "predicted", "rel_err"});
  for (std::size_t t = 0; t < triples.size(); ++t) {
    const std::string key = "exponents[" + std::to_string(t) + "]";
    if (!triples[t].is_array() || triples[t].size() != 3) invalid(key, "expected three integers");
    int e[3];
    for (int i = 0; i < 3; ++i) e[i] = static_cast<int>(as_integer(triples[t][i], key, -10, 10));
    for (double eps : grid) {
      Matrix P = Matrix::Zero(3, 3);
      for (int i = 0; i < 3; ++i) P(i, i) = std::pow(eps, -e[i]);
      const auto nz = lie::spectrum(lie::change_frame(lie::heisenberg(), P), 1).nonzero();
      c.checks.require("single-nonzero-eigenvalue", nz.size() == 1);
      if (nz.size() != 1) continue;
      const double predicted = std::pow(eps, 2 * (e[2] - e[0] - e[1]));
      const double err = rel_err(nz[0], predicted);
      c.checks.at_most("eigenvalue-matches-eps^(2tau)", err, tol);
      w.cell(e[0]).cell(e[1]).cell(e[2]).cell(eps).cell(nz[0]).cell(predicted).cell(err);
      w.end_row();
    }
  }
  c.emit("heisenberg.csv", w);
}

void mapping_torus_run(Context& c) {
  const Matrix B = c.params.matrix("B");
  if (B.rows() != B.cols() || B.rows() > 6) invalid("B", "expected a square matrix of size at most 6");
  const auto grid = c.params.eps_grid();
  const int frames = c.params.integer("frames", 0, 1000);
  const int floor_trials = c.params.integer("floor_trials", 0, 10000);
  const double cap_factor = c.params.number("floor_cap_factor");
  if (cap_factor < 1.0) invalid("floor_cap_factor", "must be at least 1");
  const int n = static_cast<int>(B.rows());

  mapping_torus::ZeroInvariants z;
  try {
    z = mapping_torus::invariants_dd(B);
  } catch (const RankAmbiguous& e) {
    invalid("B", e.what());
  }

  std::mt19937_64 rng(split_seed(c.config.seed, 1));
  csv::Writer kw({"trial", "kernel_dim", "nonzero_count", "smallest_nonzero"});
  for (int t = 0; t < frames; ++t) {
    const auto s = lie::spectrum(with_vertical_frame(B, random_frame(rng, n, 1.0)), 1);
    const int nonzero = static_cast<int>(s.nonzero().size());
    c.checks.require("kernel-is-d'+1", s.kernel_dim == z.d_prime + 1);
    c.checks.require("nonzero-count-is-n-d'", nonzero == n - z.d_prime);
    kw.cell(t).cell(s.kernel_dim).cell(nonzero).cell(nonzero ? s.smallest_nonzero() : 0.0);
    kw.end_row();
  }
  c.emit("kernel.csv", kw);

  const double one[] = {1.0};
  for (int k = 0; k <= z.d - z.d_prime; ++k) {
    const auto fam = mapping_torus::collapse_family(B, k);
    const auto table = mapping_torus::run_collapse(fam, grid);
    const auto ref = mapping_torus::run_collapse(fam, one).rows.front();
    for (const auto& r : table.rows) {
      c.checks.at_most("trace-bounded", r.trace, ref.trace + 1e-9);
      const auto nz = lie::spectrum_of(r.eigenvalues).nonzero();
      if (10 * r.eps * r.eps <= 1e-2) c.checks.require("small-count-is-k", r.small_count == k);
      if (static_cast<int>(nz.size()) > k) c.checks.at_least("eigenvalue-k+1-stays-away", nz[k], 1e-2);
      if (k == 0) c.checks.require("homothety-constant", r.eigenvalues == ref.eigenvalues);
    }
    c.emit("collapse_k" + std::to_string(k) + ".csv", table.to_csv());
  }

  const double norm2 = B.squaredNorm();
  if (floor_trials > 0 && norm2 > 0 && mapping_torus::semisimplicity_defect(B) <= mapping_torus::kSemisimpleTol) {
    const auto f = mapping_torus::semisimple_floor(B, floor_trials, cap_factor * norm2, split_seed(c.config.seed, 2));
    csv::Writer fw({"trials", "floor", "trace_cap", "min_shrink", "vacuous"});
    fw.cell(f.trials).cell(f.floor).cell(f.trace_cap).cell(f.min_shrink).cell(f.vacuous);
    fw.end_row();
    c.emit("floor.csv", fw);
    if (!f.vacuous) c.checks.at_least("semisimple-floor", f.floor, mapping_torus::kFloorTol);
  }
}

// Lattice-level data of the hyperbolic 4-dimensional example.
struct HyperbolicExample {
  double lambda;
  Matrix A, C0;
};

HyperbolicExample hyperbolic_example() {
  Matrix A1(2, 2);
  A1 << 2, 1, 1, 1;
  HyperbolicExample h;
  h.lambda = std::log(symmetric_eigenvalues(A1).back());
  h.A = Matrix::Zero(4, 4);
  h.A.topLeftCorner(2, 2) = A1;
  h.A.bottomRightCorner(2, 2) = A1;
  h.A(0, 3) = 1;
  h.C0 = Matrix::Zero(4, 4);
  h.C0(0, 0) = h.C0(1, 1) = h.lambda;
  h.C0(2, 2) = h.C0(3, 3) = -h.lambda;
  h.C0(0, 1) = std::exp(-h.lambda);
  h.C0(2, 3) = std::exp(h.lambda);
  return h;
}

void ex_hyperbolic(Context& c) {
  const double alpha = c.params.number("alpha");
  const auto grid = c.params.eps_grid();
  const double drift = c.params.positive("drift");
  const double tol = c.params.positive("tolerance");
  const HyperbolicExample h = hyperbolic_example();
  const Matrix expC = intlat::matrix_exp(h.C0);
  c.checks.at_most("exp-matches-monodromy-trace", std::abs(expC.trace() - h.A.trace()), 1e-10);
  c.checks.at_most("exp-is-unimodular", std::abs(expC.determinant() - 1.0), 1e-10);

  const lie::FormBasis b2(5, 2), b3(5, 3);
  auto rank = [](const lie::FormBasis& b, std::initializer_list<int> idx) {
    std::uint32_t m = 0;
    for (int i : idx) m |= 1u << i;
    return b.rank_of(m);
  };
  const lie::StructureConstants base = mapping_torus::solvable_algebra(h.C0);
  csv::Writer dw({"eps", "row", "col", "value"});
  csv::Writer sw({"eps", "lambda_small", "ratio"});
  std::vector<std::pair<double, double>> ratios;
  for (double eps : grid) {
    Matrix P = Matrix::Identity(5, 5);
    P(0, 0) = P(2, 2) = std::pow(eps, alpha);
    P(1, 1) = std::pow(eps, alpha + 1) * std::exp(h.lambda);
    P(3, 3) = std::pow(eps, alpha + 1) * std::exp(-h.lambda);
    const lie::StructureConstants L = lie::change_frame(base, P);

    Matrix Ce = Matrix::Zero(4, 4);
    Ce(0, 0) = Ce(1, 1) = h.lambda;
    Ce(2, 2) = Ce(3, 3) = -h.lambda;
    Ce(0, 1) = Ce(2, 3) = eps;
    c.checks.at_most("rescaled-block", max_abs(mapping_torus::vertical_block(L) - Ce), tol);

    Matrix expected = Matrix::Zero(b3.size(), b2.size());
    expected(rank(b3, {0, 1, 4}), rank(b2, {0, 1})) = -2 * h.lambda;
    expected(rank(b3, {1, 2, 4}), rank(b2, {0, 2})) = -eps;
    expected(rank(b3, {0, 3, 4}), rank(b2, {0, 2})) = -eps;
    expected(rank(b3, {1, 3, 4}), rank(b2, {0, 3})) = -eps;
    expected(rank(b3, {1, 3, 4}), rank(b2, {1, 2})) = -eps;
    expected(rank(b3, {2, 3, 4}), rank(b2, {2, 3})) = 2 * h.lambda;
    const Matrix d2 = lie::exterior_derivative(L, 2);
    c.checks.at_most("d2-pattern", max_abs(d2 - expected), tol);
    for (int col = 0; col < d2.cols(); ++col)
      for (int row = 0; row < d2.rows(); ++row)
        if (d2(row, col) != 0.0) {
          dw.cell(eps).cell(b3.label(row)).cell(b2.label(col)).cell(d2(row, col));
          dw.end_row();
        }

    const double small = lie::spectrum(L, 2).smallest_nonzero();
    sw.cell(eps).cell(small).cell(small / (eps * eps));
    sw.end_row();
    ratios.emplace_back(eps, small / (eps * eps));
  }
  for (std::size_t i = 1; i < ratios.size(); ++i)
    if (ratios[i].first < 0.1 && ratios[i - 1].first < 0.1)
      c.checks.at_most("ratio-drift", std::abs(ratios[i].second / ratios[i - 1].second - 1.0), drift);
  c.emit("d2_matrix.csv", dw);
  c.emit("small_eigenvalue.csv", sw);
}

void ex_rotation(Context& c) {
  const int turns = c.params.integer("turns", 1, 10);
  const intlat::IntegerMatrix A = intlat::IntegerMatrix::identity(2);
  Matrix B(2, 2);
  B << 0, 2 * kPi * turns, -2 * kPi * turns, 0;
  const lie::StructureConstants L = mapping_torus::solvable_algebra(B);
  const double frame_max = curvature::frame_curvature(L).max_abs();
  const double sampled = curvature::sampled_max_abs_curvature(L, 200, split_seed(c.config.seed, 3));
  const int kernel = lie::spectrum(L, 1).kernel_dim;
  const int betti = intlat::betti1_mapping_torus(A).betti1;
  const double scale = std::max(1.0, B.squaredNorm());
  c.checks.require("log-is-valid", intlat::verify_log(A.to_real(), B, 1e-9));
  c.checks.at_most("flat", std::max(frame_max, sampled) / scale, 1e-12);
  c.checks.require("kernel-is-1", kernel == 1);
  c.checks.require("betti-is-3", betti == 3);
  c.checks.require("kernel-below-betti", kernel < betti);
  csv::Writer w({"turns", "kernel_dim", "betti1", "max_frame_curvature", "max_sampled_curvature"});
  w.cell(turns).cell(kernel).cell(betti).cell(frame_max).cell(sampled);
  w.end_row();
  c.emit("summary.csv", w);
}

void torus_bundle_run(Context& c) {
  const double area = c.params.positive("base_area");
  const double tol = c.params.positive("tolerance");
  const auto bundle = make_bundle(c.params, "a", area);
  const int n = bundle.fiber_dim();

  const auto red = torus_bundle::reduce(bundle);
  mpz_class g = 0;
  for (const auto& x : bundle.a()) g = gcd(g, x);
  c.checks.require("reduction-gcd", red.d == g);
  bool column_ok = abs(intlat::determinant(red.P)) == 1;
  for (int i = 0; i < n; ++i) column_ok = column_ok && red.P(i, 0) * red.d == bundle.a()[i];
  c.checks.require("reduction-basis", column_ok);
  csv::Writer rw({"gcd", "model"});
  rw.cell(std::string_view(red.d.get_str())).cell(std::string_view(red.model));
  rw.end_row();
  c.emit("reduction.csv", rw);

  const Vector b = bundle.bracket() / area;
  const double eta = bundle.bracket().norm();
  const double lam = b.squaredNorm();
  const lie::StructureConstants L = torus_bundle::nil_algebra(b);
  csv::Writer sw({"p", "eigenvalue", "multiplicity", "predicted_multiplicity"});
  csv::Writer ew({"p", "eigen_dim", "closed_dim", "coclosed_dim"});
  for (int p = 0; p <= n + 2; ++p) {
    const auto computed = lie::spectrum(L, p);
    const auto predicted = torus_bundle::predict_spectrum(n, p, eta, area);
    double diff = computed.eigenvalues.size() == predicted.eigenvalues.size() ? 0.0 : HUGE_VAL;
    for (std::size_t i = 0; i < std::min(computed.eigenvalues.size(), predicted.eigenvalues.size()); ++i)
      diff = std::max(diff, std::abs(computed.eigenvalues[i] - predicted.eigenvalues[i]));
    c.checks.at_most("spectrum-matches", diff / std::max(1.0, lam), tol);
    for (const auto& grp : computed.groups) {
      const bool top = std::abs(grp.value - lam) <= 1e-8 * std::max(1.0, lam);
      sw.cell(p).cell(grp.value).cell(grp.multiplicity).cell(static_cast<long long>(top ? binomial(n, p - 1) : binomial(n + 2, p) - binomial(n, p - 1)));
      sw.end_row();
    }
    if (p >= 1 && p <= n + 1) {
      const auto s = torus_bundle::eigenform_split(p, b);
      c.checks.require("multiplicity-C(n,p-1)", s.eigen_dim == binomial(n, p - 1));
      c.checks.require("closed-coclosed-split",
                       s.closed_dim == binomial(n - 1, p - 2) && s.coclosed_dim == binomial(n - 1, p - 1));
      ew.cell(p).cell(s.eigen_dim).cell(s.closed_dim).cell(s.coclosed_dim);
      ew.end_row();
    }
  }
  c.emit("spectrum.csv", sw);
  c.emit("eigenforms.csv", ew);

  const auto cb = torus_bundle::curvature_bound_check(b);
  c.checks.at_most("curvature-max-is-3/4-eta^2", std::abs(cb.max_abs - 0.75 * lam) / std::max(1.0, lam), tol);
  curvature::SubmersionSplit split;
  for (int i = 0; i < n; ++i) split.vertical.push_back(i);
  split.horizontal = {n, n + 1};
  const Matrix base = curvature::frame_curvature(curvature::base_algebra(L, split)).matrix();
  c.checks.at_most("oneill-defect", curvature::oneill_defect(L, split, base), tol);
}

void tore_homothety(Context& c) {
  const auto bundle = make_bundle(c.params, "a");
  const auto grid = c.params.eps_grid();
  const Vector b = bundle.bracket();
  const int n = bundle.fiber_dim();
  const auto t = torus_bundle::collapse_direction(b, std::vector<mpq_class>(n, 1), grid);
  c.checks.require("vanishes", t.vanishes);
  for (const auto& r : t.rows) {
    c.checks.at_most("eigenvalue-over-eps^2", rel_err(r.eigenvalue / (r.eps * r.eps), b.squaredNorm()), 1e-12);
    Matrix P = Matrix::Identity(n + 2, n + 2);
    for (int i = 0; i < n; ++i) P(i, i) = 1 / r.eps;
    const double direct = lie::spectrum(lie::change_frame(torus_bundle::nil_algebra(b), P), 1).smallest_nonzero();
    c.checks.at_most("rescaled-frame-spectrum", rel_err(direct, r.eigenvalue), 1e-10);
  }
  c.emit("trajectory.csv", t.to_csv());
}

void tore_partial(Context& c) {
  const auto bundle = make_bundle(c.params, "a");
  const auto grid = c.params.eps_grid();
  const int n = bundle.fiber_dim();
  const auto alpha = c.params.rationals(c.params.at("alpha"), "alpha", n);
  const auto t = torus_bundle::collapse_direction(bundle.bracket(), alpha, grid);
  mpz_class fixed = 0;
  for (int i = 0; i < n; ++i)
    if (alpha[i] == 0) fixed += bundle.a()[i] * bundle.a()[i];
  c.checks.require("limit-is-sum-of-fixed-squares", t.limit == fixed.get_d());
  c.checks.require("vanishes-iff-limit-zero", t.vanishes == (fixed == 0));
  for (const auto& r : t.rows) {
    double moving = 0;
    for (int i = 0; i < n; ++i)
      if (alpha[i] > 0) moving += bundle.a()[i].get_d() * bundle.a()[i].get_d() * std::pow(r.eps, 2 * alpha[i].get_d());
    c.checks.at_most("trajectory", std::abs(r.eigenvalue - t.limit - moving) / std::max(1.0, r.eigenvalue), 1e-12);
  }
  c.emit("trajectory.csv", t.to_csv());
}

void flat_threshold(Context& c) {
  using flat_torus::FlatTorus;
  const double base_len = c.params.positive("base_length");
  const double scale = c.params.positive("fiber_scale");
  const int randoms = c.params.integer("random_fibers", 0, 50);
  const double odd_factor = c.params.in_range("odd_cutoff_factor", 0.0, 10.0);
  const Matrix fg = c.params.matrix("fiber_gram");
  if (fg.rows() != fg.cols() || fg.rows() > 2) invalid("fiber_gram", "expected a 1x1 or 2x2 gram");

  std::vector<FlatTorus> fibers;
  try {
    fibers.emplace_back(Matrix(fg * scale));
  } catch (const NotPositiveDefinite& e) {
    invalid("fiber_gram", e.what());
  }
  std::mt19937_64 rng(split_seed(c.config.seed, 4));
  for (int t = 0; t < randoms; ++t) fibers.emplace_back(Matrix(random_gram(rng, 1 + t % 2) * scale));
  const FlatTorus base(Matrix::Constant(1, 1, base_len * base_len));

  csv::Writer tw({"case", "p", "fiber_lambda01", "min_noninvariant", "below_threshold", "violations", "attained"});
  csv::Writer ow({"case", "p", "checked", "odd", "violations"});
  for (std::size_t i = 0; i < fibers.size(); ++i) {
    const FlatTorus& fiber = fibers[i];
    for (int p = 0; p <= 1 + fiber.dim(); ++p) {
      const auto r = flat_torus::threshold_check_product(base, fiber, p);
      c.checks.require("invariant-below-threshold", r.holds);
      c.checks.require("threshold-attained", r.attained);
      tw.cell(static_cast<int>(i)).cell(p).cell(r.fiber_lambda01).cell(r.min_noninvariant)
          .cell(static_cast<long long>(r.below_threshold)).cell(static_cast<long long>(r.violations)).cell(r.attained);
      tw.end_row();
      const auto o = flat_torus::odd_multiplicity_check(base, fiber, p, odd_factor * r.fiber_lambda01);
      c.checks.require("odd-multiplicity-invariant", o.holds);
      ow.cell(static_cast<int>(i)).cell(p).cell(o.eigenvalues_checked).cell(o.odd).cell(o.violations);
      ow.end_row();
    }
  }
  c.emit("thresholds.csv", tw);
  c.emit("odd_multiplicity.csv", ow);
}

void gt_family(Context& c) {
  const auto ts = c.params.numbers("t_values", 1, 32);
  const double cutoff = c.params.positive("cutoff");
  const double res = c.params.in_range("resolution", 0.0, 0.1);
  if (cutoff > 1e5) invalid("cutoff", "at most 1e5");
  csv::Writer w({"t", "lambda01", "diameter", "diameter_error", "bound_margin"});
  for (double t : ts) {
    const auto ga = flat_torus::gt_gram(t), gb = flat_torus::gt_gram(t + 1);
    const auto a = flat_torus::p_form_spectrum(ga, 0, cutoff).eigenvalues();
    const auto b = flat_torus::p_form_spectrum(gb, 0, cutoff).eigenvalues();
    double diff = a.size() == b.size() ? 0.0 : HUGE_VAL;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
      diff = std::max(diff, std::abs(a[i] - b[i]) / std::max(1.0, a[i]));
    c.checks.at_most("spectrum-periodic", diff, 1e-12);
    const auto ra = flat_torus::diameter_eigenvalue_bound_check(ga, res);
    const auto rb = flat_torus::diameter_eigenvalue_bound_check(gb, res);
    c.checks.at_most("diameter-periodic", std::abs(ra.diameter.value - rb.diameter.value),
                     ra.diameter.error + rb.diameter.error);
    c.checks.at_least("lambda01-above-(pi/diam)^2", std::min(ra.margin, rb.margin), 0.0);
    for (const auto& [tt, r] : {std::pair{t, ra}, std::pair{t + 1, rb}}) {
      w.cell(tt).cell(r.lambda01).cell(r.diameter.value).cell(r.diameter.error).cell(r.margin);
      w.end_row();
    }
  }
  c.emit("gt.csv", w);
}

void euler_bound_run(Context& c) {
  const int count = c.params.integer("count", 1, 1000);
  const int max_k = c.params.integer("max_k", 1, 4);
  const int range = c.params.integer("entry_range", 1, 100);
  const int quotients = c.params.integer("quotients", 0, 100);
  std::mt19937_64 rng(split_seed(c.config.seed, 5));

  csv::Writer cw({"trial", "k", "rows", "lambda_min", "det_ratio", "det_bound", "margin_low", "margin_high", "det_rel_err"});
  for (int trial = 0, accepted = 0; accepted < count; ++trial) {
    const int k = 1 + trial % max_k;
    const int rows = k + trial % 3;
    const Matrix E = random_integer(rng, rows, k, range);
    if (singular_values(E).back() < 1e-6) continue;
    const Matrix G = random_gram(rng, k);
    const auto r = euler::bound_chain(E, G);
    const auto f = euler::det_factorization(E, G);
    c.checks.at_least("lambda-above-det-ratio", r.margin_low, -1e-10 * std::max(1.0, r.det_ratio));
    c.checks.at_least("det-ratio-above-bound", r.margin_high, -1e-10 * std::max(1.0, r.det_bound));
    c.checks.at_most("det-factorization", f.rel_err, 1e-10);
    cw.cell(accepted).cell(k).cell(rows).cell(r.lambda_min).cell(r.det_ratio).cell(r.det_bound)
        .cell(r.margin_low).cell(r.margin_high).cell(f.rel_err);
    cw.end_row();
    ++accepted;
  }
  c.emit("chain.csv", cw);

  csv::Writer qw({"trial", "k", "kernel_dim", "det_A", "oracle_det_A", "quotient_volume", "identity_rel_err"});
  for (int trial = 0, done = 0; done < quotients; ++trial) {
    const int k = 2 + trial % 3, rank = 1 + trial % (k - 1);
    const Matrix E = random_integer(rng, rank + 1, rank, 3) * random_integer(rng, rank, k, 3);
    const Matrix G = random_gram(rng, k);
    if (numeric_rank(E, 1e-9) != rank) continue;
    const auto r = euler::noninjective_reduce(E, G);
    const Matrix K = r.kernel.to_real();
    const double oracle = pseudo_det(euler::orthonormal_matrix(E, G));
    c.checks.require("kernel-basis", max_abs(E * K) == 0.0 && r.kernel_dim == k - rank);
    c.checks.at_most("kernel-covolume", rel_err(r.det_P1, std::sqrt((K.transpose() * G * K).determinant())), 1e-10);
    c.checks.at_most("restricted-determinant", rel_err(r.det_A, oracle), 1e-9);
    c.checks.at_most("determinant-identity", r.identity_rel_err, 1e-10);
    c.checks.require("restricted-chain", r.chain.ok);
    qw.cell(done).cell(k).cell(r.kernel_dim).cell(r.det_A).cell(oracle).cell(r.quotient_volume).cell(r.identity_rel_err);
    qw.end_row();
    ++done;
  }
  c.emit("quotients.csv", qw);

  csv::Writer rw({"torus", "rho", "expected"});
  for (int m : {2, 3}) {
    const double rho = euler::rho_flat(flat_torus::FlatTorus(Matrix::Identity(m, m))).rho;
    c.checks.at_most("rho-unit-tori", std::abs(rho - 1.0), 1e-12);
    rw.cell("T^" + std::to_string(m)).cell(rho).cell(1.0);
    rw.end_row();
  }
  c.emit("rho.csv", rw);
}

void vol_bound(Context& c) {
  const auto bundle = make_bundle(c.params, "a");
  const auto grid = c.params.eps_grid();
  const Json& alphas = c.params.array("alphas", 1, 16);
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const std::string key = "alphas[" + std::to_string(i) + "]";
    const auto alpha = c.params.rationals(alphas[i], key, bundle.fiber_dim());
    const auto rep = euler::vol_bound_experiment(bundle, alpha, grid);
    c.checks.require("ratio-bounded-below", rep.bounded_below);
    c.checks.at_least("ratio-positive", rep.min_ratio, 0.0);
    c.emit("vol_bound_" + std::to_string(i) + ".csv", rep.to_csv());
  }
}

// ---------------------------------------------------------------------------

struct Registered {
  ScenarioInfo info;
  std::function<void(Context&)> run;
};

const std::vector<Registered>& registry() {
  static const std::vector<Registered> r = [] {
    std::vector<Registered> v;
    Json p;

    p = Json::object();
    p["exponents"] = Json::array({Json::array({1, 1, 3}), Json::array({1, 1, 2})});
    p["eps_grid"] = Json::array({0.5, 0.1, 0.01});
    p["tolerance"] = 1e-10;
    v.push_back({{"heisenberg", "heisenberg-scaling", p}, heisenberg});

    p = Json::object();
    p["B"] = "0 1 0\n0 0 1\n0 0 0";
    p["eps_grid"] = dyadic_grid(1, 10);
    p["frames"] = 50;
    p["floor_trials"] = 50;
    p["floor_cap_factor"] = 2.0;
    v.push_back({{"mapping-torus", "small-eigenvalue-count", p}, mapping_torus_run});

    p = Json::object();
    p["alpha"] = 1.0;
    p["eps_grid"] = Json::array({0.08, 0.04, 0.02, 0.01, 0.005});
    p["drift"] = 0.05;
    p["tolerance"] = 1e-12;
    v.push_back({{"ex-2-6-1", "hyperbolic-small-eigenvalue", p}, ex_hyperbolic});

    p = Json::object();
    p["turns"] = 1;
    v.push_back({{"ex-2-6-2", "kernel-below-betti", p}, ex_rotation});

    p = Json::object();
    p["a"] = Json::array({1, 0});
    p["base_area"] = 1.0;
    p["tolerance"] = 1e-10;
    v.push_back({{"torus-bundle", "nil-bundle-spectrum", p}, torus_bundle_run});

    p = Json::object();
    p["a"] = Json::array({1, 1});
    p["eps_grid"] = dyadic_grid(1, 10);
    v.push_back({{"tore-ex1", "bundle-homothety-collapse", p}, tore_homothety});

    p = Json::object();
    p["a"] = Json::array({3, 4, 12});
    p["alpha"] = Json::array({1, 0, 0});
    p["eps_grid"] = dyadic_grid(1, 10);
    v.push_back({{"tore-ex2", "partial-collapse-limit", p}, tore_partial});

    p = Json::object();
    p["base_length"] = 1.0;
    p["fiber_gram"] = "1 0\n0 1";
    p["fiber_scale"] = 0.05;
    p["random_fibers"] = 4;
    p["odd_cutoff_factor"] = 3.0;
    v.push_back({{"flat-threshold", "invariant-threshold", p}, flat_threshold});

    p = Json::object();
    p["t_values"] = Json::array({0.0, 0.3, 0.7});
    p["cutoff"] = 400.0;
    p["resolution"] = 0.005;
    v.push_back({{"gt-family", "gt-periodicity", p}, gt_family});

    p = Json::object();
    p["count"] = 50;
    p["max_k"] = 4;
    p["entry_range"] = 4;
    p["quotients"] = 10;
    v.push_back({{"euler-bound", "euler-bound-chain", p}, euler_bound_run});

    p = Json::object();
    p["a"] = Json::array({1, 1});
    p["alphas"] = Json::array({Json::array({1, 1}), Json::array({1, 0}), Json::array({"1/2", 2})});
    p["eps_grid"] = dyadic_grid(0, 8);
    v.push_back({{"vol-bound", "volume-bound", p}, vol_bound});

    std::sort(v.begin(), v.end(), [](const Registered& a, const Registered& b) { return a.info.name < b.info.name; });
    return v;
  }();
  return r;
}

const Registered& lookup(const std::string& name) {
  for (const auto& r : registry())
    if (r.info.name == name) return r;
  throw ScenarioUnknown("unknown scenario '" + name + "' (try 'list')");
}

std::string fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------

const std::vector<ScenarioInfo>& list_scenarios() {
  static const std::vector<ScenarioInfo> infos = [] {
    std::vector<ScenarioInfo> v;
    for (const auto& r : registry()) v.push_back(r.info);
    return v;
  }();
  return infos;
}

const ScenarioInfo& find_scenario(const std::string& name) { return lookup(name).info; }

ScenarioConfig make_config(const std::string& scenario, const Json& file) {
  if (!file.is_object()) invalid("config", "top level must be an object");
  for (auto it = file.begin(); it != file.end(); ++it)
    if (it.key() != "scenario" && it.key() != "seed" && it.key() != "out" && it.key() != "params")
      invalid(it.key(), "unknown top-level key");

  std::string name = scenario;
  if (file.contains("scenario")) {
    if (!file["scenario"].is_string()) invalid("scenario", "expected a string");
    const std::string from_file = file["scenario"].get<std::string>();
    if (!name.empty() && name != from_file)
      invalid("scenario", "config names '" + from_file + "' but '" + name + "' was requested");
    name = from_file;
  }
  if (name.empty()) invalid("scenario", "missing");
  const ScenarioInfo& info = find_scenario(name);

  ScenarioConfig c;
  c.scenario = name;
  c.params = info.defaults;
  if (file.contains("seed")) {
    const Json& s = file["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      invalid("seed", "expected a nonnegative integer");
    c.seed = s.get<std::uint64_t>();
  }
  if (file.contains("out")) {
    if (!file["out"].is_string()) invalid("out", "expected a string");
    c.out_dir = file["out"].get<std::string>();
  }
  if (file.contains("params")) {
    const Json& user = file["params"];
    if (!user.is_object()) invalid("params", "expected an object");
    for (auto it = user.begin(); it != user.end(); ++it) {
      if (!info.defaults.contains(it.key())) invalid(it.key(), "not a parameter of '" + name + "'");
      const Json& def = info.defaults[it.key()];
      const bool matrix_like = def.is_string() && (it->is_string() || it->is_array());
      const bool same_kind = (def.is_number() && it->is_number()) || (def.is_array() && it->is_array()) ||
                             (def.is_string() && it->is_string()) || (def.is_boolean() && it->is_boolean());
      if (!matrix_like && !same_kind) invalid(it.key(), "has the wrong type");
      c.params[it.key()] = *it;
    }
  }
  return c;
}

Json read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) invalid("--config", "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    invalid("--config", std::string("not valid JSON: ") + e.what());
  }
}

void override_eps_grid(ScenarioConfig& config, const std::vector<double>& grid) {
  if (!config.params.contains("eps_grid")) invalid("eps_grid", "scenario '" + config.scenario + "' takes no eps grid");
  config.params["eps_grid"] = grid;
}

std::vector<double> parse_eps_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    std::size_t used = 0;
    double x = 0;
    try {
      x = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (tok.empty() || used != tok.size()) invalid("eps_grid", "bad entry '" + tok + "'");
    out.push_back(x);
  }
  if (out.empty()) invalid("eps_grid", "empty");
  return out;
}

std::string config_hash(const ScenarioConfig& config) {
  Json canon = Json::object();
  canon["scenario"] = config.scenario;
  canon["seed"] = config.seed;
  canon["params"] = config.params;
  return fnv1a(canon.dump());
}

bool RunManifest::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string RunManifest::to_json() const {
  Ordered j;
  j["scenario"] = scenario;
  j["theorem"] = theorem;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["artifacts"] = artifacts;
  Ordered cs = Ordered::array();
  for (const auto& c : checks) {
    Ordered e;
    e["name"] = c.name;
    e["pass"] = c.pass;
    e["margin"] = c.margin;
    cs.push_back(std::move(e));
  }
  j["checks"] = std::move(cs);
  j["pass"] = pass();
  return j.dump(2) + "\n";
}

ScenarioResult evaluate(const ScenarioConfig& config) {
  const Registered& reg = lookup(config.scenario);
  Context ctx{config, Params(config.params), {}, {}};
  reg.run(ctx);
  ScenarioResult r;
  r.manifest.scenario = config.scenario;
  r.manifest.theorem = reg.info.theorem;
  r.manifest.config_hash = config_hash(config);
  r.manifest.seed = config.seed;
  r.manifest.checks = ctx.checks.take();
  for (const auto& a : ctx.artifacts) r.manifest.artifacts.push_back(a.file);
  r.artifacts = std::move(ctx.artifacts);
  return r;
}

void write_result(const ScenarioResult& result, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto put = [&](const std::string& name, const std::string& body) {
    std::ofstream f(out_dir / name, std::ios::binary | std::ios::trunc);
    f << body;
    if (!f) throw Error("cannot write " + (out_dir / name).string());
  };
  for (const auto& a : result.artifacts) put(a.file, a.content);
  put("manifest.json", result.manifest.to_json());
}

RunManifest run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir) {
  ScenarioResult r = evaluate(config);
  write_result(r, out_dir);
  return r.manifest;
}

bool VerifySummary::pass() const {
  return !criteria.empty() && std::all_of(criteria.begin(), criteria.end(), [](const verify::Criterion& c) { return c.pass; });
}

VerifySummary verify_all(std::uint64_t seed) {
  const auto start = Clock::now();
  VerifySummary s;
  s.criteria = verify::run_library_criteria(seed);

  verify::Criterion e2e;
  e2e.id = verify::kLibraryCriteria + 1;
  e2e.name = "end-to-end";
  e2e.pass = true;
  const auto t0 = Clock::now();
  for (const auto& info : list_scenarios()) {
    ScenarioConfig c = make_config(info.name);
    c.seed = seed;
    ScenarioResult a, b;
    try {
      a = evaluate(c);
      b = evaluate(c);
    } catch (const std::exception& ex) {
      if (e2e.pass) e2e.detail = info.name + " threw: " + ex.what();
      e2e.pass = false;
      continue;
    }
    bool same = a.manifest.to_json() == b.manifest.to_json() && a.artifacts.size() == b.artifacts.size();
    for (std::size_t i = 0; same && i < a.artifacts.size(); ++i)
      same = a.artifacts[i].file == b.artifacts[i].file && a.artifacts[i].content == b.artifacts[i].content;
    if (e2e.pass && !same) e2e.detail = info.name + ": repeated run differs";
    if (e2e.pass && same && !a.manifest.pass()) {
      for (const auto& ch : a.manifest.checks)
        if (!ch.pass) {
          e2e.detail = info.name + ": check " + ch.name + " failed";
          break;
        }
    }
    e2e.pass = e2e.pass && same && a.manifest.pass();
  }
  e2e.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  s.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (e2e.pass && s.seconds >= 60.0) {
    e2e.pass = false;
    e2e.detail = "over the 60 s budget";
  }
  s.criteria.push_back(e2e);

  csv::Writer w({"criterion", "name", "pass", "margin"});
  for (const auto& c : s.criteria) {
    w.cell(c.id).cell(std::string_view(c.name)).cell(c.pass).cell(c.margin);
    w.end_row();
  }
  ScenarioConfig vc;
  vc.scenario = "verify-all";
  vc.seed = seed;
  vc.params = Json::object();
  s.result.artifacts.push_back({"verify_all.csv", w.str()});
  s.result.manifest.scenario = "verify-all";
  s.result.manifest.theorem = "acceptance";
  s.result.manifest.config_hash = config_hash(vc);
  s.result.manifest.seed = seed;
  s.result.manifest.artifacts = {"verify_all.csv"};
  for (const auto& c : s.criteria) s.result.manifest.checks.push_back({c.name, c.pass, c.margin});
  return s;
}

std::string criterion_line(const verify::Criterion& c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "[%s] %2d %-24s margin=%-12.4g (%.2f s)", c.pass ? "PASS" : "FAIL", c.id,
                c.name.c_str(), c.margin, c.seconds);
  std::string line = buf;
  if (!c.detail.empty()) line += "  " + c.detail;
  return line;
}

}  // namespace collapse::cli
