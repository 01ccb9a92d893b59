#include "collapse/torus_bundle.hpp"

#include "collapse/csv.hpp"
#include "collapse/curvature.hpp"
#include "collapse/errors.hpp"

#include <algorithm>
#include <cmath>

namespace collapse::torus_bundle {

namespace {

long binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TorusBundleOverT2::TorusBundleOverT2(std::vector<mpz_class> a, double base_area)
    : a_(std::move(a)), base_area_(base_area) {
  if (a_.empty()) throw Error("fiber dimension must be positive");
  if (std::all_of(a_.begin(), a_.end(), [](const mpz_class& x) { return x == 0; }))
    throw TrivialBundle("a = 0 gives the trivial bundle T^{n+2}");
  if (!(base_area > 0.0)) throw Error("base area must be positive");
}

Vector TorusBundleOverT2::bracket() const {
  Vector b(fiber_dim());
  for (int i = 0; i < fiber_dim(); ++i) b(i) = a_[i].get_d();
  return b;
}

Reduction reduce(const TorusBundleOverT2& bundle) {
  intlat::GcdCompletion g = intlat::gcd_completion(bundle.a());
  Reduction r{g.gcd, g.P, "N_" + g.gcd.get_str()};
  if (bundle.fiber_dim() > 1) r.model += " x T^" + std::to_string(bundle.fiber_dim() - 1);
  return r;
}

lie::StructureConstants nil_algebra(const Vector& b) {
  const int n = static_cast<int>(b.size());
  if (n < 1) throw Error("fiber dimension must be positive");
  std::vector<lie::BracketEntry> entries;
  for (int i = 0; i < n; ++i)
    if (b(i) != 0.0) entries.push_back({n, n + 1, i, b(i)});
  return lie::StructureConstants(n + 2, entries);
}

lie::SpectrumReport predict_spectrum(int n, int p, double eta, double base_area) {
  if (n < 1) throw Error("fiber dimension must be positive");
  if (p < 0 || p > n + 2) throw DegreeOutOfRange("degree outside [0, n+2]");
  const long total = binomial(n + 2, p);
  const long mult = binomial(n, p - 1);
  const double lambda = eta * eta / (base_area * base_area);
  std::vector<double> ev(total - mult, 0.0);
  ev.insert(ev.end(), mult, lambda);
  return lie::spectrum_of(std::move(ev));
}

SpectrumComparison verify_spectrum(int p, const Vector& b) {
  const int n = static_cast<int>(b.size());
  SpectrumComparison c{predict_spectrum(n, p, b.norm()), lie::spectrum(nil_algebra(b), p), 0.0};
  if (c.predicted.eigenvalues.size() != c.computed.eigenvalues.size())
    throw Error("spectrum sizes differ");
  for (std::size_t i = 0; i < c.computed.eigenvalues.size(); ++i)
    c.max_diff = std::max(c.max_diff, std::abs(c.computed.eigenvalues[i] - c.predicted.eigenvalues[i]));
  return c;
}

EigenformSplit eigenform_split(int p, const Vector& b) {
  const lie::StructureConstants L = nil_algebra(b);
  const double eta2 = b.squaredNorm();
  Eigen::SelfAdjointEigenSolver<Matrix> es(lie::laplacian(L, p));
  std::vector<int> idx;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()(i) - eta2) <= 1e-8 * std::max(1.0, eta2)) idx.push_back(i);
  EigenformSplit s;
  s.eigen_dim = static_cast<int>(idx.size());
  if (idx.empty()) return s;
  Matrix E(es.eigenvectors().rows(), s.eigen_dim);
  for (int j = 0; j < s.eigen_dim; ++j) E.col(j) = es.eigenvectors().col(idx[j]);
  s.closed_dim = s.eigen_dim - numeric_rank(lie::exterior_derivative(L, p) * E, 1e-8);
  s.coclosed_dim = p == 0 ? s.eigen_dim
                          : s.eigen_dim - numeric_rank(lie::codifferential(L, p) * E, 1e-8);
  return s;
}

std::string Trajectory::to_csv() const {
  csv::Writer w({"eps", "eigenvalue", "limit_class"});
  for (const auto& r : rows) {
    w.cell(r.eps).cell(r.eigenvalue).cell(vanishes ? "vanishes" : "positive");
    w.end_row();
  }
  return w.str();
}

Trajectory collapse_direction(const Vector& b0, const std::vector<mpq_class>& alpha,
                              std::span<const double> eps_grid) {
  const int n = static_cast<int>(b0.size());
  if (static_cast<int>(alpha.size()) != n) throw Error("alpha has wrong length");
  for (const auto& a : alpha)
    if (a < 0) throw Error("collapse exponents must be nonnegative");
  Trajectory t;
  for (double eps : eps_grid) {
    if (!(eps > 0.0 && eps <= 1.0)) throw Error("eps must lie in (0, 1]");
    double lam = 0.0;
    for (int i = 0; i < n; ++i) {
      const double bi = std::pow(eps, alpha[i].get_d()) * b0(i);
      lam += bi * bi;
    }
    t.rows.push_back({eps, lam});
  }
  for (int i = 0; i < n; ++i)
    if (alpha[i] == 0) t.limit += b0(i) * b0(i);
  t.vanishes = t.limit == 0.0;
  return t;
}

CurvatureBoundReport curvature_bound_check(const Vector& b) {
  const int n = static_cast<int>(b.size());
  const curvature::CurvatureTable K = curvature::frame_curvature(nil_algebra(b));
  CurvatureBoundReport r;
  r.max_abs = K.max_abs();
  r.bound = 0.75 * b.squaredNorm();
  r.at_base_pair = K(n, n + 1);
  r.holds = std::abs(r.max_abs - r.bound) <= 1e-12 * std::max(1.0, r.bound) &&
            std::abs(r.at_base_pair + r.bound) <= 1e-12 * std::max(1.0, r.bound);
  return r;
}

lie::SpectrumReport product_bundle_spectrum(const Vector& b1, const Vector& b2, int p) {
  const lie::StructureConstants L1 = nil_algebra(b1), L2 = nil_algebra(b2);
  const int n1 = L1.dim(), n2 = L2.dim();
  if (p < 0 || p > n1 + n2) throw DegreeOutOfRange("degree outside the product dimension");
  std::vector<double> ev;
  for (int q = std::max(0, p - n2); q <= std::min(p, n1); ++q) {
    const auto s1 = lie::spectrum(L1, q), s2 = lie::spectrum(L2, p - q);
    for (double x : s1.eigenvalues)
      for (double y : s2.eigenvalues) ev.push_back(x + y);
  }
  return lie::spectrum_of(std::move(ev));
}

}  // namespace collapse::torus_bundle
