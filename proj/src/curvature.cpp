#include "collapse/curvature.hpp"

#include "collapse/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace collapse::curvature {

Matrix ad(const lie::StructureConstants& L, const Vector& u) {
  const int n = L.dim();
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (u(i) == 0.0) continue;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) m(k, j) += u(i) * L(i, j, k);
  }
  return m;
}

Matrix ad_star(const lie::StructureConstants& L, const Vector& u) {
  return ad(L, u).transpose();
}

double sectional_curvature(const lie::StructureConstants& L, const Vector& u, const Vector& v) {
  if (u.size() != L.dim() || v.size() != L.dim()) throw NotOrthonormal("vector has wrong length");
  if (std::abs(u.norm() - 1.0) > kOrthoTol || std::abs(v.norm() - 1.0) > kOrthoTol ||
      std::abs(u.dot(v)) > kOrthoTol)
    throw NotOrthonormal("plane is not given by an orthonormal pair");
  const Matrix adu = ad(L, u), adv = ad(L, v);
  const Vector uv = adu * v;  // [u,v]
  const Vector sym = adu.transpose() * v + adv.transpose() * u;
  const double t1 = 0.25 * sym.squaredNorm();
  const double t2 = (adu.transpose() * u).dot(adv.transpose() * v);
  const double t3 = 0.75 * uv.squaredNorm();
  const double t4 = 0.5 * (ad(L, uv) * v).dot(u);          // <[[u,v],v],u>
  const double t5 = 0.5 * (ad(L, Vector(-uv)) * u).dot(v);  // <[[v,u],u],v>
  return t1 - t2 - t3 - t4 - t5;
}

double CurvatureTable::max_abs() const {
  double m = 0.0;
  for (int i = 0; i < dim(); ++i)
    for (int j = i + 1; j < dim(); ++j) m = std::max(m, std::abs(k_(i, j)));
  return m;
}

CurvatureTable frame_curvature(const lie::StructureConstants& L) {
  const int n = L.dim();
  CurvatureTable t(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      t.set(i, j, sectional_curvature(L, Vector::Unit(n, i), Vector::Unit(n, j)));
  return t;
}

double sampled_max_abs_curvature(const lie::StructureConstants& L, int planes, std::uint64_t seed) {
  const int n = L.dim();
  if (n < 2) return 0.0;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int s = 0; s < planes; ++s) {
    Vector u(n), v(n);
    for (int i = 0; i < n; ++i) u(i) = g(rng), v(i) = g(rng);
    u.normalize();
    v -= u.dot(v) * u;
    if (v.norm() < 1e-8) continue;
    v.normalize();
    worst = std::max(worst, std::abs(sectional_curvature(L, u, v)));
  }
  return worst;
}

CurvatureTable solvable_curvature_closed_form(const Matrix& C) {
  const int n = static_cast<int>(C.rows());
  CurvatureTable t(n + 1);
  for (int i = 0; i < n; ++i) {
    double k = 0.0;
    for (int j = 0; j < n; ++j) {
      const double d = C(i, j) - C(j, i);
      k += -C(j, i) * C(j, i) + 0.25 * d * d;
    }
    t.set(n, i, k);
    for (int j = i + 1; j < n; ++j) {
      const double s = C(i, j) + C(j, i);
      t.set(i, j, 0.25 * s * s - C(i, i) * C(j, j));
    }
  }
  return t;
}

CurvatureTable nil_bundle_curvature_closed_form(int fiber_dim, double eta) {
  CurvatureTable t(fiber_dim + 2);
  t.set(fiber_dim, fiber_dim + 1, -0.75 * eta * eta);
  t.set(0, fiber_dim, 0.25 * eta * eta);
  t.set(0, fiber_dim + 1, 0.25 * eta * eta);
  return t;
}

double kappa_invariant(const Matrix& C) {
  const double tr = C.trace();
  return tr * tr - (C * C).trace();
}

TraceBoundsReport trace_bounds_check(const Matrix& C, double a) {
  const double n = static_cast<double>(C.rows());
  TraceBoundsReport r;
  r.trace = C.squaredNorm();
  r.kappa = kappa_invariant(C);
  r.a = a;
  r.max_pair = solvable_curvature_closed_form(C).max_abs();
  r.upper_bound = (n * n + n) * a + r.kappa;
  r.upper_margin = r.upper_bound - r.trace;
  r.lower_margin = 2.0 * r.trace - r.max_pair;
  const double slack = 1e-12 * std::max(1.0, r.trace);
  r.holds = r.upper_margin >= -slack && r.lower_margin >= -slack;
  return r;
}

namespace {

void check_split(const lie::StructureConstants& L, const SubmersionSplit& split) {
  std::vector<int> seen(L.dim(), 0);
  for (int i : split.vertical) {
    if (i < 0 || i >= L.dim()) throw Error("split index out of range");
    ++seen[i];
  }
  for (int i : split.horizontal) {
    if (i < 0 || i >= L.dim()) throw Error("split index out of range");
    ++seen[i];
  }
  for (int s : seen)
    if (s != 1) throw Error("split must partition the frame");
}

}  // namespace

lie::StructureConstants base_algebra(const lie::StructureConstants& L, const SubmersionSplit& split) {
  check_split(L, split);
  const double tol = 1e-12 * std::max(1.0, L.max_abs());
  for (int v : split.vertical)
    for (int x = 0; x < L.dim(); ++x)
      for (int h : split.horizontal)
        if (std::abs(L(v, x, h)) > tol) throw Error("vertical span is not an ideal");
  const int m = static_cast<int>(split.horizontal.size());
  std::vector<lie::BracketEntry> entries;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      for (int c = 0; c < m; ++c)
        if (double x = L(split.horizontal[a], split.horizontal[b], split.horizontal[c]); x != 0.0)
          entries.push_back({a, b, c, x});
  return lie::StructureConstants::unchecked(m, entries);
}

double oneill_defect(const lie::StructureConstants& L, const SubmersionSplit& split,
                     const Matrix& base_curvature) {
  check_split(L, split);
  const int m = static_cast<int>(split.horizontal.size());
  if (base_curvature.rows() != m || base_curvature.cols() != m)
    throw Error("base curvature table has wrong shape");
  const int n = L.dim();
  double worst = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      const int x = split.horizontal[a], y = split.horizontal[b];
      double vert = 0.0;
      for (int v : split.vertical) vert += L(x, y, v) * L(x, y, v);
      const double k_total = sectional_curvature(L, Vector::Unit(n, x), Vector::Unit(n, y));
      worst = std::max(worst, std::abs(base_curvature(a, b) - k_total - 0.75 * vert));
    }
  return worst;
}

FormBoundReport oneill_form_bound_check(const lie::StructureConstants& L,
                                        const SubmersionSplit& split, double a) {
  check_split(L, split);
  const int n = L.dim();
  FormBoundReport r;
  r.a = a;
  r.pair_bound = 8.0 * a / 3.0;
  r.global_bound = 4.0 * a * n * (n - 1) / 3.0;
  for (int v : split.vertical) {
    // dω(e_i, e_j) = -c(i,j,v) for the dual ω of e_v
    double global = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) global += L(i, j, v) * L(i, j, v);
    r.global_max = std::max(r.global_max, global);
    for (std::size_t p = 0; p < split.horizontal.size(); ++p)
      for (std::size_t q = p + 1; q < split.horizontal.size(); ++q) {
        const double x = L(split.horizontal[p], split.horizontal[q], v);
        r.pair_max = std::max(r.pair_max, x * x);
      }
  }
  const double slack = 1e-12 * std::max(1.0, a);
  r.holds = r.pair_max <= r.pair_bound + slack && r.global_max <= r.global_bound + slack;
  return r;
}

}  // namespace collapse::curvature
