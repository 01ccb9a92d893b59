#include "collapse/oracles.hpp"

#include "collapse/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace collapse::oracle {

Matrix koszul_derivative(const lie::StructureConstants& L, int p) {
  const int n = L.dim();
  lie::FormBasis src(n, p);
  if (p == n) return Matrix::Zero(0, src.size());
  lie::FormBasis dst(n, p + 1);
  Matrix D = Matrix::Zero(dst.size(), src.size());
  for (int row = 0; row < dst.size(); ++row) {
    const std::vector<int> J = dst.tuple(row);
    for (int s = 0; s < p + 1; ++s)
      for (int t = s + 1; t < p + 1; ++t) {
        std::vector<int> rest;
        for (int q = 0; q < p + 1; ++q)
          if (q != s && q != t) rest.push_back(J[q]);
        const double sign = ((s + t) % 2 == 0) ? 1.0 : -1.0;
        for (int k = 0; k < n; ++k) {
          const double c = L(J[s], J[t], k);
          if (c == 0.0 || std::find(rest.begin(), rest.end(), k) != rest.end()) continue;
          std::vector<int> I = rest;
          I.push_back(k);
          std::sort(I.begin(), I.end());
          std::uint32_t mask = 0;
          for (int x : I) mask |= 1u << x;
          // ξ^I(e_k, e_rest): sign of moving k into sorted position
          int before = 0;
          for (int x : rest)
            if (x < k) ++before;
          const double perm = (before % 2 == 0) ? 1.0 : -1.0;
          D(row, src.rank_of(mask)) += sign * perm * c;
        }
      }
  }
  return D;
}

double levi_civita_curvature(const lie::StructureConstants& L, const Vector& u, const Vector& v) {
  const int n = L.dim();
  // nabla[i][j] = ∇_{e_i} e_j
  std::vector<Vector> nabla(n * n, Vector::Zero(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        nabla[i * n + j](k) = 0.5 * (L(i, j, k) - L(j, k, i) + L(k, i, j));
  auto cov = [&](const Vector& x, const Vector& y) {
    Vector out = Vector::Zero(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (x(i) != 0.0 && y(j) != 0.0) out += x(i) * y(j) * nabla[i * n + j];
    return out;
  };
  auto bracket = [&](const Vector& x, const Vector& y) {
    Vector out = Vector::Zero(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) out(k) += x(i) * y(j) * L(i, j, k);
    return out;
  };
  const Vector r = cov(u, cov(v, v)) - cov(v, cov(u, v)) - cov(bracket(u, v), v);
  return r.dot(u);
}

int bareiss_rank(const intlat::IntegerMatrix& m) {
  intlat::IntegerMatrix a = m;
  const int rows = a.rows(), cols = a.cols();
  int r = 0;
  mpz_class prev = 1;
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = r;
    while (p < rows && a(p, c) == 0) ++p;
    if (p == rows) continue;
    a.swap_rows(r, p);
    for (int i = r + 1; i < rows; ++i) {
      for (int j = c + 1; j < cols; ++j) {
        a(i, j) = a(i, j) * a(r, c) - a(i, c) * a(r, j);
        mpz_divexact(a(i, j).get_mpz_t(), a(i, j).get_mpz_t(), prev.get_mpz_t());
      }
      a(i, c) = 0;
    }
    prev = a(r, c);
    ++r;
  }
  return r;
}

int betti1_rational(const intlat::IntegerMatrix& a) {
  return 1 + a.cols() - bareiss_rank(a - intlat::IntegerMatrix::identity(a.rows()));
}

namespace {

template <class F>
void for_box(int k, int r, F&& f) {
  std::vector<int> g(k, -r);
  while (true) {
    f(g);
    int i = k - 1;
    while (i >= 0 && g[i] == r) g[i] = -r, --i;
    if (i < 0) return;
    ++g[i];
  }
}

double quad(const Matrix& Q, const std::vector<int>& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) s += g[i] * Q(i, j) * g[j];
  return s;
}

}  // namespace

double brute_min_quadratic(const Matrix& Q, int r) {
  double best = INFINITY;
  for_box(static_cast<int>(Q.rows()), r, [&](const std::vector<int>& g) {
    if (std::any_of(g.begin(), g.end(), [](int x) { return x != 0; })) best = std::min(best, quad(Q, g));
  });
  return best;
}

std::vector<double> brute_spectrum(const Matrix& Q, int r, double cutoff) {
  const double c = 4.0 * std::numbers::pi * std::numbers::pi;
  std::vector<double> out;
  for_box(static_cast<int>(Q.rows()), r, [&](const std::vector<int>& g) {
    const double ev = c * quad(Q, g);
    if (ev <= cutoff) out.push_back(ev);
  });
  std::sort(out.begin(), out.end());
  return out;
}

double planar_covering_radius(const Matrix& gram2) {
  double g11 = gram2(0, 0), g12 = gram2(0, 1), g22 = gram2(1, 1);
  while (true) {
    if (g22 < g11) std::swap(g11, g22);
    if (2 * std::abs(g12) <= g11) break;
    const double mu = std::round(g12 / g11);
    if (mu == 0.0) break;
    g22 = g22 - 2 * mu * g12 + mu * mu * g11;
    g12 = g12 - mu * g11;
  }
  g12 = std::abs(g12);
  const double a = std::sqrt(g11), b = std::sqrt(g22), c = std::sqrt(g11 + g22 - 2 * g12);
  const double area = 0.5 * std::sqrt(g11 * g22 - g12 * g12);
  return a * b * c / (4 * area);
}

lie::StructureConstants scaled_heisenberg(double eps, int alpha, int beta, int gamma) {
  return lie::StructureConstants(3, std::vector<lie::BracketEntry>{
                                        {0, 1, 2, std::pow(eps, gamma - alpha - beta)}});
}

Matrix solvable_laplacian1(const Matrix& C) {
  const int n = static_cast<int>(C.rows());
  // dV_i^♭ = -Σ_j C(i,j) Y^♭∧V_j^♭ and dY^♭ = 0; Δ = δd on 1-forms.
  Matrix out = Matrix::Zero(n + 1, n + 1);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += C(i, j) * C(k, j);
      out(i, k) = s;
    }
  return out;
}

}  // namespace collapse::oracle
