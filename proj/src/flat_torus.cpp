#include "collapse/flat_torus.hpp"

#include "collapse/csv.hpp"
#include "collapse/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace collapse::flat_torus {

namespace {

constexpr double kFourPiSq = 4.0 * std::numbers::pi * std::numbers::pi;

long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double quad(const Matrix& Q, const std::vector<int>& g) {
  const int k = static_cast<int>(g.size());
  double s = 0.0;
  for (int i = 0; i < k; ++i) {
    if (g[i] == 0) continue;
    double row = 0.0;
    for (int j = 0; j < k; ++j) row += Q(i, j) * g[j];
    s += g[i] * row;
  }
  return s;
}

// Calls f(γ) for every γ in the box with γ_0 = first fixed.
template <class F>
void for_slab(const std::vector<int>& R, int first, F&& f) {
  const int k = static_cast<int>(R.size());
  std::vector<int> g(k);
  g[0] = first;
  for (int i = 1; i < k; ++i) g[i] = -R[i];
  while (true) {
    f(g);
    int i = k - 1;
    while (i >= 1 && g[i] == R[i]) g[i] = -R[i], --i;
    if (i < 1) return;
    ++g[i];
  }
}

bool mode_less(const Mode& a, const Mode& b) {
  if (a.eigenvalue != b.eigenvalue) return a.eigenvalue < b.eigenvalue;
  return a.gamma < b.gamma;
}

}  // namespace

FlatTorus::FlatTorus(Matrix gram) : gram_(std::move(gram)) {
  const int k = static_cast<int>(gram_.rows());
  if (k < 1 || gram_.cols() != k) throw NotPositiveDefinite("gram must be square and nonempty");
  if (max_abs(gram_ - gram_.transpose()) > 1e-12 * std::max(1.0, max_abs(gram_)))
    throw NotPositiveDefinite("gram is not symmetric");
  Eigen::LLT<Matrix> llt(gram_);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("gram is not positive definite");
  for (int i = 0; i < k; ++i)
    if (!(llt.matrixL()(i, i) > 0.0)) throw NotPositiveDefinite("gram is not positive definite");
  dual_ = gram_.inverse();
  dual_ = 0.5 * (dual_ + dual_.transpose()).eval();
}

double FlatTorus::volume() const { return std::sqrt(gram_.determinant()); }

FlatTorus product(const FlatTorus& base, const FlatTorus& fiber) {
  const int a = base.dim(), b = fiber.dim();
  Matrix g = Matrix::Zero(a + b, a + b);
  g.topLeftCorner(a, a) = base.gram();
  g.bottomRightCorner(b, b) = fiber.gram();
  return FlatTorus(g);
}

std::vector<double> ModeSpectrum::eigenvalues() const {
  std::vector<double> out;
  for (const auto& m : modes) out.insert(out.end(), form_multiplicity, m.eigenvalue);
  return out;
}

std::string ModeSpectrum::to_csv(int fiber_dims) const {
  std::vector<std::string> header;
  for (int i = 1; i <= k; ++i) header.push_back("gamma_" + std::to_string(i));
  header.insert(header.end(), {"eigenvalue", "multiplicity", "invariant"});
  csv::Writer w(header);
  for (const auto& m : modes) {
    bool inv = true;
    const int from = fiber_dims > 0 ? k - fiber_dims : 0;
    for (int i = from; i < k; ++i) inv = inv && m.gamma[i] == 0;
    for (int x : m.gamma) w.cell(x);
    w.cell(m.eigenvalue).cell(static_cast<long long>(form_multiplicity)).cell(inv);
    w.end_row();
  }
  return w.str();
}

std::vector<int> enumeration_box(const Matrix& Q, double q0) {
  const double lmin = symmetric_eigenvalues(Q).front();
  const int r = static_cast<int>(std::ceil(std::sqrt(std::max(q0, 0.0) / lmin)));
  return std::vector<int>(Q.rows(), r);
}

ShortestDual shortest_dual(const FlatTorus& T, int box_scale) {
  const Matrix& Q = T.dual_gram();
  double q0 = Q(0, 0);
  for (int i = 1; i < T.dim(); ++i) q0 = std::min(q0, Q(i, i));
  std::vector<int> R = enumeration_box(Q, q0);
  for (int& r : R) r *= std::max(1, box_scale);
  ShortestDual best{{}, std::numeric_limits<double>::infinity()};
  for (int g0 = -R[0]; g0 <= R[0]; ++g0)
    for_slab(R, g0, [&](const std::vector<int>& g) {
      if (std::all_of(g.begin(), g.end(), [](int x) { return x == 0; })) return;
      const double q = quad(Q, g);
      if (q < best.norm2) best = {g, q};
    });
  return best;
}

double lambda01(const FlatTorus& T, int box_scale) {
  return kFourPiSq * shortest_dual(T, box_scale).norm2;
}

ModeSpectrum p_form_spectrum(const FlatTorus& T, int p, double cutoff, Exec exec) {
  const int k = T.dim();
  if (p < 0 || p > k) throw DegreeOutOfRange("form degree outside [0, k]");
  if (!(cutoff >= 0.0)) throw Error("cutoff must be nonnegative");
  const Matrix& Q = T.dual_gram();
  const std::vector<int> R = enumeration_box(Q, cutoff / kFourPiSq);
  const double limit = cutoff * (1.0 + 1e-12);

  const int slabs = 2 * R[0] + 1;
  std::vector<std::vector<Mode>> per_slab(slabs);
  auto slab = [&](int s) {
    for_slab(R, s - R[0], [&](const std::vector<int>& g) {
      const double ev = kFourPiSq * quad(Q, g);
      if (ev <= limit) per_slab[s].push_back({g, ev});
    });
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int s = 0; s < slabs; ++s) slab(s);
  } else {
    for (int s = 0; s < slabs; ++s) slab(s);
  }

  ModeSpectrum out;
  out.k = k;
  out.p = p;
  out.form_multiplicity = binomial(k, p);
  out.cutoff = cutoff;
  for (auto& v : per_slab) out.modes.insert(out.modes.end(), v.begin(), v.end());
  std::sort(out.modes.begin(), out.modes.end(), mode_less);
  return out;
}

DiameterEstimate diameter(const FlatTorus& T, double resolution, Exec exec) {
  const int k = T.dim();
  if (k == 1) return {0.5 * std::sqrt(T.gram()(0, 0)), 0.0};
  if (k > 3) throw Error("diameter is implemented for k <= 3");
  if (!(resolution > 0.0 && resolution <= 0.5)) throw Error("resolution must lie in (0, 1/2]");
  const Matrix& G = T.gram();
  const int N = static_cast<int>(std::ceil(1.0 / resolution));

  // Half-diagonals of the unit cell bound the covering radius; the same
  // shape scaled by 1/N bounds the grid error.
  double half_diag = 0.0;
  for (int s = 0; s < (1 << k); ++s) {
    Vector v(k);
    for (int i = 0; i < k; ++i) v(i) = (s >> i & 1) ? 0.5 : -0.5;
    half_diag = std::max(half_diag, std::sqrt(v.dot(G * v)));
  }
  const double error = half_diag / N;

  std::vector<std::vector<int>> cand;
  {
    std::vector<int> lo(k), hi(k);
    for (int i = 0; i < k; ++i) {
      const double b = half_diag * std::sqrt(T.dual_gram()(i, i));
      lo[i] = static_cast<int>(std::floor(-b));
      hi[i] = static_cast<int>(std::ceil(1.0 + b));
    }
    std::vector<int> z = lo;
    while (true) {
      cand.push_back(z);
      int i = k - 1;
      while (i >= 0 && z[i] == hi[i]) z[i] = lo[i], --i;
      if (i < 0) break;
      ++z[i];
    }
  }

  std::vector<double> slab_max(N, 0.0);
  auto slab = [&](int i0) {
    std::vector<int> idx(k, 0);
    idx[0] = i0;
    Vector x(k), d(k);
    double worst = 0.0;
    while (true) {
      for (int i = 0; i < k; ++i) x(i) = static_cast<double>(idx[i]) / N;
      double best = std::numeric_limits<double>::infinity();
      for (const auto& z : cand) {
        for (int i = 0; i < k; ++i) d(i) = x(i) - z[i];
        best = std::min(best, d.dot(G * d));
      }
      worst = std::max(worst, best);
      int i = k - 1;
      while (i >= 1 && idx[i] == N - 1) idx[i] = 0, --i;
      if (i < 1) break;
      ++idx[i];
    }
    slab_max[i0] = worst;
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i0 = 0; i0 < N; ++i0) slab(i0);
  } else {
    for (int i0 = 0; i0 < N; ++i0) slab(i0);
  }
  return {std::sqrt(*std::max_element(slab_max.begin(), slab_max.end())), error};
}

FlatTorus gt_gram(double t) {
  Matrix g(2, 2);
  g << 1.0, t, t, 1.0 + t * t;
  return FlatTorus(g);
}

ThresholdReport threshold_check_product(const FlatTorus& base, const FlatTorus& fiber, int p,
                                        double cutoff) {
  ThresholdReport r;
  r.fiber_lambda01 = lambda01(fiber);
  if (cutoff <= 0.0) cutoff = 1.5 * r.fiber_lambda01;
  if (cutoff <= r.fiber_lambda01) throw Error("cutoff must exceed the fiber threshold");
  const FlatTorus M = product(base, fiber);
  const int kb = base.dim();
  const ModeSpectrum s = p_form_spectrum(M, p, cutoff);
  r.min_noninvariant = std::numeric_limits<double>::infinity();
  for (const auto& m : s.modes) {
    const bool invariant = std::all_of(m.gamma.begin() + kb, m.gamma.end(), [](int x) { return x == 0; });
    if (!invariant) r.min_noninvariant = std::min(r.min_noninvariant, m.eigenvalue);
    if (m.eigenvalue < r.fiber_lambda01) {
      ++r.below_threshold;
      if (!invariant) ++r.violations;
    }
  }
  r.attained = std::abs(r.min_noninvariant - r.fiber_lambda01) <= 1e-12 * std::max(1.0, r.fiber_lambda01);
  r.holds = r.violations == 0 && r.attained;
  return r;
}

OddMultiplicityReport odd_multiplicity_check(const FlatTorus& base, const FlatTorus& fiber, int p,
                                             double cutoff) {
  const FlatTorus M = product(base, fiber);
  const int kb = base.dim();
  const ModeSpectrum s = p_form_spectrum(M, p, cutoff);
  OddMultiplicityReport r;
  for (std::size_t i = 0; i < s.modes.size();) {
    std::size_t j = i;
    bool has_invariant = false;
    while (j < s.modes.size() &&
           s.modes[j].eigenvalue - s.modes[i].eigenvalue <= 1e-12 * std::max(1.0, s.modes[i].eigenvalue)) {
      const auto& g = s.modes[j].gamma;
      has_invariant = has_invariant || std::all_of(g.begin() + kb, g.end(), [](int x) { return x == 0; });
      ++j;
    }
    ++r.eigenvalues_checked;
    const long total = static_cast<long>(j - i) * s.form_multiplicity;
    if (total % 2 == 1) {
      ++r.odd;
      if (!has_invariant) ++r.violations;
    }
    i = j;
  }
  r.holds = r.violations == 0;
  return r;
}

DiameterBoundReport diameter_eigenvalue_bound_check(const FlatTorus& T, double resolution) {
  DiameterBoundReport r;
  r.lambda01 = lambda01(T);
  r.diameter = diameter(T, resolution);
  const double d = r.diameter.value + r.diameter.error;
  r.margin = r.lambda01 - std::numbers::pi * std::numbers::pi / (d * d);
  r.holds = r.margin >= -1e-9 * r.lambda01;
  return r;
}

}  // namespace collapse::flat_torus
