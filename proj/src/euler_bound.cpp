#include "collapse/euler_bound.hpp"

#include "collapse/csv.hpp"
#include "collapse/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace collapse::euler {

namespace {

Matrix cholesky_factor(const Matrix& gram) {
  if (gram.rows() != gram.cols() || gram.rows() < 1) throw NotPositiveDefinite("gram must be square");
  if (max_abs(gram - gram.transpose()) > 1e-12 * std::max(1.0, max_abs(gram)))
    throw NotPositiveDefinite("gram is not symmetric");
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("gram is not positive definite");
  return llt.matrixL();
}

void check_shapes(const Matrix& E, const Matrix& gram) {
  if (E.cols() != gram.rows()) throw Error("E has " + std::to_string(E.cols()) +
                                           " columns but the gram is " + std::to_string(gram.rows()) + "-dimensional");
}

double gram_det_sqrt(const Matrix& M) {
  if (M.cols() == 0) return 1.0;
  if (M.rows() < M.cols()) return 0.0;
  // |det R| from a pivoted QR; avoids squaring the conditioning via M^T M.
  const Eigen::ColPivHouseholderQR<Matrix> qr(M);
  return qr.matrixR().topLeftCorner(M.cols(), M.cols()).diagonal().cwiseAbs().prod();
}

}  // namespace

EulerMap::EulerMap(Matrix E, Matrix gram_dual) : E_(std::move(E)), gram_(std::move(gram_dual)) {
  check_shapes(E_, gram_);
  const Matrix L = cholesky_factor(gram_);
  (void)intlat::IntegerMatrix::from_real(E_);  // throws unless integral
  vol_ = 1.0 / L.diagonal().prod();
}

Matrix orthonormal_matrix(const Matrix& E, const Matrix& gram_dual) {
  check_shapes(E, gram_dual);
  const Matrix L = cholesky_factor(gram_dual);
  // E L^{-T} = (L^{-1} E^T)^T
  return L.triangularView<Eigen::Lower>().solve(E.transpose()).transpose();
}

Matrix ee_star(const Matrix& E, const Matrix& gram_dual) {
  const Matrix A = orthonormal_matrix(E, gram_dual);
  return A.transpose() * A;
}

DetFactorization det_factorization(const Matrix& E, const Matrix& gram_dual) {
  check_shapes(E, gram_dual);
  DetFactorization f;
  f.det_lattice = gram_det_sqrt(E);
  f.fiber_volume = 1.0 / cholesky_factor(gram_dual).diagonal().prod();
  f.det_orth = gram_det_sqrt(orthonormal_matrix(E, gram_dual));
  if (!(f.det_orth > 0.0)) throw NotInjective("Euler map is not injective");
  f.rel_err = std::abs(f.det_orth - f.det_lattice * f.fiber_volume) / f.det_orth;
  return f;
}

BoundChain bound_chain(const Matrix& E, const Matrix& gram_dual) {
  const Matrix A = orthonormal_matrix(E, gram_dual);
  const int k = static_cast<int>(A.cols());
  const std::vector<double> sv = singular_values(A);
  if (static_cast<int>(A.rows()) < k || sv.empty() || sv.back() <= 1e-10 * std::max(1.0, sv.front()))
    throw NotInjective("Euler map is not injective");

  const Matrix M = A.transpose() * A;
  const std::vector<double> ev = symmetric_eigenvalues(M);
  BoundChain c;
  c.lambda_min = ev.front();
  c.det_ratio = M.determinant() / std::pow(ev.back(), k - 1);
  const double det_e = gram_det_sqrt(E) / cholesky_factor(gram_dual).diagonal().prod();
  const double norm_e = sv.front();
  c.det_bound = det_e * det_e / std::pow(norm_e, 2 * k - 2);
  c.margin_low = c.lambda_min - c.det_ratio;
  c.margin_high = c.det_ratio - c.det_bound;
  c.ok = c.margin_low >= -1e-10 * std::max(1.0, c.det_ratio) &&
         c.margin_high >= -1e-10 * std::max(1.0, c.det_bound);
  return c;
}

NoninjectiveReduction noninjective_reduce(const Matrix& E, const Matrix& gram_dual) {
  check_shapes(E, gram_dual);
  cholesky_factor(gram_dual);
  const intlat::IntegerMatrix Ez = intlat::IntegerMatrix::from_real(E);
  const int k = Ez.cols();
  NoninjectiveReduction r;
  if (Ez.is_zero()) {
    r.trivial = true;
    r.kernel_dim = k;
    r.kernel = intlat::IntegerMatrix::identity(k);
    return r;
  }
  const intlat::SmithForm s = intlat::smith_normal_form(Ez);
  const int rank = s.rank();
  r.kernel_dim = k - rank;
  if (r.kernel_dim == 0) throw Error("Euler map is injective; use bound_chain");
  const int l = r.kernel_dim;
  r.kernel = s.V.col_range(rank, l);

  // Kernel vectors first, then the rest of the unimodular basis.
  Matrix V(k, k);
  const Matrix Vr = s.V.to_real();
  V.leftCols(l) = Vr.rightCols(l);
  V.rightCols(rank) = Vr.leftCols(rank);
  // Upper triangular P with V^T G V = P^T P, from a QR of L^T V rather than
  // a Cholesky of the (possibly badly scaled) product.
  const Matrix LtV = cholesky_factor(gram_dual).transpose() * V;
  const Eigen::HouseholderQR<Matrix> qr(LtV);
  Matrix P = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < k; ++i)
    if (P(i, i) < 0) P.row(i) *= -1.0;
  const Matrix P1 = P.topLeftCorner(l, l), P3 = P.bottomRightCorner(rank, rank);

  r.lattice_block = E * V.rightCols(rank);
  r.restricted = P3.transpose().triangularView<Eigen::Lower>().solve(r.lattice_block.transpose()).transpose();
  r.det_A = gram_det_sqrt(r.restricted);
  r.det_A_lattice = gram_det_sqrt(r.lattice_block);
  r.det_P1 = P1.diagonal().prod();
  r.det_P = P.diagonal().prod();
  r.identity_rel_err = std::abs(r.det_A - r.det_A_lattice * r.det_P1 / r.det_P) / r.det_A;
  r.quotient_volume = 1.0 / r.det_P1;
  r.chain = bound_chain(r.restricted, Matrix::Identity(rank, rank));
  return r;
}

RhoReport rho_flat(const flat_torus::FlatTorus& N, int search_scale) {
  const int m = N.dim();
  if (m < 2 || m > 4) throw Error("rho_flat needs 2 <= dim <= 4");
  const Matrix& h = N.dual_gram();  // metric on 1-forms
  std::vector<std::pair<int, int>> basis;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) basis.emplace_back(i, j);
  const int q = static_cast<int>(basis.size());
  Matrix Q(q, q);
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) {
      const auto [i, j] = basis[a];
      const auto [k, l] = basis[b];
      Q(a, b) = h(i, k) * h(j, l) - h(i, l) * h(j, k);
    }
  Q *= N.volume();

  double q0 = Q(0, 0);
  for (int a = 1; a < q; ++a) q0 = std::min(q0, Q(a, a));
  std::vector<int> R = flat_torus::enumeration_box(Q, q0);
  for (int& x : R) x *= std::max(1, search_scale);

  RhoReport rep;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> g(q);
  for (int a = 0; a < q; ++a) g[a] = -R[a];
  while (true) {
    if (!std::all_of(g.begin(), g.end(), [](int x) { return x == 0; })) {
      double v = 0.0;
      for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b) v += g[a] * Q(a, b) * g[b];
      if (v < best) best = v, rep.coefficients = g;
    }
    int a = q - 1;
    while (a >= 0 && g[a] == R[a]) g[a] = -R[a], --a;
    if (a < 0) break;
    ++g[a];
  }
  rep.rho = std::sqrt(best);
  return rep;
}

std::string VolBoundReport::to_csv() const {
  csv::Writer w({"eps", "eigenvalue", "fiber_volume", "ratio"});
  for (const auto& r : rows) {
    w.cell(r.eps).cell(r.eigenvalue).cell(r.fiber_volume).cell(r.ratio);
    w.end_row();
  }
  return w.str();
}

VolBoundReport vol_bound_experiment(const torus_bundle::TorusBundleOverT2& bundle,
                                    const std::vector<mpq_class>& alpha,
                                    std::span<const double> eps_grid) {
  const Vector b0 = bundle.bracket();
  const int n = bundle.fiber_dim();
  if (static_cast<int>(alpha.size()) != n) throw Error("alpha has wrong length");
  const torus_bundle::Trajectory t = torus_bundle::collapse_direction(b0, alpha, eps_grid);
  VolBoundReport rep;
  rep.homothety = std::all_of(alpha.begin(), alpha.end(), [&](const mpq_class& a) { return a == alpha[0]; });
  const double area2 = bundle.base_area() * bundle.base_area();
  double largest_eps = -1.0, ratio_at_largest = 0.0;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& row : t.rows) {
    double vol = 1.0;
    for (int i = 0; i < n; ++i) vol *= std::pow(row.eps, alpha[i].get_d());
    const double lam = row.eigenvalue / area2;
    const double ratio = lam / (vol * vol);
    rep.rows.push_back({row.eps, lam, vol, ratio});
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    if (row.eps > largest_eps) largest_eps = row.eps, ratio_at_largest = ratio;
  }
  rep.bounded_below = !rep.rows.empty() && rep.min_ratio > 0.0 &&
                      rep.min_ratio >= (1.0 - 1e-12) * ratio_at_largest;
  return rep;
}

}  // namespace collapse::euler
