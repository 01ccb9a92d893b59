#include "collapse/mapping_torus.hpp"

#include "collapse/csv.hpp"
#include "collapse/curvature.hpp"
#include "collapse/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace collapse::mapping_torus {

MappingTorusBundle::MappingTorusBundle(intlat::IntegerMatrix A, Matrix B)
    : A_(std::move(A)), B_(std::move(B)) {
  if (A_.rows() != A_.cols() || A_.rows() < 1) throw NotUnimodular("monodromy must be square");
  if (B_.rows() != A_.rows() || B_.cols() != A_.cols()) throw Error("logarithm has wrong shape");
  if (intlat::determinant(A_) != 1) throw NotUnimodular("monodromy does not lie in SL_n(Z)");
  if (!intlat::verify_log(A_.to_real(), B_, 1e-8)) throw Error("exp(B) does not reproduce A");
  if (std::abs(B_.trace()) > 1e-8) throw Error("logarithm is not traceless");
}

lie::StructureConstants solvable_algebra(const Matrix& B) {
  const int n = static_cast<int>(B.rows());
  if (B.cols() != n || n < 1) throw Error("B must be square");
  std::vector<lie::BracketEntry> entries;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (B(j, i) != 0.0) entries.push_back({n, i, j, B(j, i)});
  return lie::StructureConstants(n + 1, entries);
}

Matrix vertical_block(const lie::StructureConstants& L) {
  const int n = L.dim() - 1;
  Matrix C(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) C(j, i) = L(n, i, j);
  return C;
}

namespace {

int checked_rank(const Matrix& m, double tol) {
  int r = 0;
  for (double s : singular_values(m)) {
    if (s > tol / 10 && s < tol * 10)
      throw RankAmbiguous("singular value " + csv::number(s) + " too close to the rank tolerance");
    if (s >= tol * 10) ++r;
  }
  return r;
}

bool all_integer(const Matrix& B) {
  for (int i = 0; i < B.rows(); ++i)
    for (int j = 0; j < B.cols(); ++j)
      if (B(i, j) != std::round(B(i, j)) || std::abs(B(i, j)) > 1e15) return false;
  return true;
}

Matrix power(const Matrix& B, int e) {
  Matrix out = Matrix::Identity(B.rows(), B.cols());
  for (int i = 0; i < e; ++i) out = out * B;
  return out;
}

// Lays the chains out kernel vectors first, then level by level.
template <class Column>
void layout(const std::vector<std::vector<Column>>& chains, JordanFrame& f,
            std::vector<Column>& columns) {
  int longest = 0;
  for (const auto& c : chains) longest = std::max(longest, static_cast<int>(c.size()));
  for (int pos = 1; pos <= longest; ++pos)
    for (std::size_t c = 0; c < chains.size(); ++c) {
      const int len = static_cast<int>(chains[c].size());
      if (pos > len) continue;
      columns.push_back(chains[c][len - pos]);  // chains[c][0] is the top
      f.chain_of.push_back(static_cast<int>(c));
      f.position_of.push_back(pos);
    }
  for (const auto& c : chains) f.chain_lengths.push_back(static_cast<int>(c.size()));
}

JordanFrame exact_frame(const Matrix& B) {
  using intlat::RationalMatrix;
  const int n = static_cast<int>(B.rows());
  RationalMatrix Bq(intlat::IntegerMatrix::from_real(B));
  std::vector<RationalMatrix> K(n + 1);
  RationalMatrix Bj = RationalMatrix::identity(n);
  K[0] = RationalMatrix(n, 0);
  for (int j = 1; j <= n; ++j) {
    Bj = Bj * Bq;
    K[j] = intlat::nullspace(Bj);
  }
  JordanFrame f;
  f.exact = true;
  f.d = K[n].cols();
  f.d_prime = K[1].cols();

  std::vector<std::vector<RationalMatrix>> chains;
  for (int level = n; level >= 1; --level) {
    if (K[level].cols() == K[level - 1].cols()) continue;
    RationalMatrix span = K[level - 1];
    for (const auto& c : chains) {
      const int len = static_cast<int>(c.size());
      if (len >= level) span = RationalMatrix::hcat(span, c[len - level]);
    }
    int r = intlat::rank(span);
    for (int q = 0; q < K[level].cols(); ++q) {
      RationalMatrix v = K[level].column(q);
      RationalMatrix trial = RationalMatrix::hcat(span, v);
      const int rt = intlat::rank(trial);
      if (rt == r) continue;
      span = std::move(trial);
      r = rt;
      std::vector<RationalMatrix> chain{v};
      for (int s = 1; s < level; ++s) chain.push_back(Bq * chain.back());
      chains.push_back(std::move(chain));
    }
  }
  std::vector<RationalMatrix> columns;
  layout(chains, f, columns);
  RationalMatrix comp = intlat::nullspace(K[n].transpose());
  for (int q = 0; q < comp.cols(); ++q) {
    columns.push_back(comp.column(q));
    f.chain_of.push_back(-1);
    f.position_of.push_back(0);
  }
  RationalMatrix P(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) P(i, j) = columns[j](i, 0);
  f.P0 = P.to_real();
  f.C = (intlat::inverse(P) * Bq * P).to_real();
  return f;
}

// Orthonormal basis of the numerical kernel (singular values below tol).
Matrix kernel_basis(const Matrix& m, double tol) {
  const int n = static_cast<int>(m.cols());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  int r = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) > tol / 10 && s(i) < tol * 10)
      throw RankAmbiguous("singular value " + csv::number(s(i)) + " too close to the rank tolerance");
    if (s(i) >= tol * 10) ++r;
  }
  return svd.matrixV().rightCols(n - r);
}

int span_rank(const std::vector<Vector>& vs) {
  if (vs.empty()) return 0;
  Matrix m(vs.front().size(), vs.size());
  for (std::size_t j = 0; j < vs.size(); ++j) m.col(j) = vs[j] / vs[j].norm();
  return numeric_rank(m, 1e-8);
}

JordanFrame numeric_frame(const Matrix& B, double tol) {
  const int n = static_cast<int>(B.rows());
  std::vector<Matrix> K(n + 1);
  K[0] = Matrix(n, 0);
  for (int j = 1; j <= n; ++j) K[j] = kernel_basis(power(B, j), tol);
  JordanFrame f;
  f.d = static_cast<int>(K[n].cols());
  f.d_prime = static_cast<int>(K[1].cols());

  std::vector<std::vector<Vector>> chains;
  for (int level = n; level >= 1; --level) {
    if (K[level].cols() == K[level - 1].cols()) continue;
    std::vector<Vector> span;
    for (int q = 0; q < K[level - 1].cols(); ++q) span.push_back(K[level - 1].col(q));
    for (const auto& c : chains) {
      const int len = static_cast<int>(c.size());
      if (len >= level) span.push_back(c[len - level]);
    }
    int r = span_rank(span);
    for (int q = 0; q < K[level].cols(); ++q) {
      Vector v = K[level].col(q);
      span.push_back(v);
      const int rt = span_rank(span);
      if (rt == r) {
        span.pop_back();
        continue;
      }
      r = rt;
      std::vector<Vector> chain{v};
      for (int s = 1; s < level; ++s) chain.push_back(B * chain.back());
      chains.push_back(std::move(chain));
    }
  }
  std::vector<Vector> columns;
  layout(chains, f, columns);
  if (f.d < n) {
    Matrix comp = K[n].cols() ? kernel_basis(K[n].transpose(), tol) : Matrix::Identity(n, n);
    for (int q = 0; q < comp.cols(); ++q) {
      columns.push_back(comp.col(q));
      f.chain_of.push_back(-1);
      f.position_of.push_back(0);
    }
  }
  f.P0.resize(n, n);
  for (int j = 0; j < n; ++j) f.P0.col(j) = columns[j];
  Eigen::FullPivLU<Matrix> lu(f.P0);
  if (!lu.isInvertible()) throw RankAmbiguous("Jordan frame is numerically singular");
  f.C = lu.solve(B * f.P0);
  return f;
}

}  // namespace

ZeroInvariants invariants_dd(const Matrix& B, double rank_tol) {
  const int n = static_cast<int>(B.rows());
  if (B.cols() != n) throw Error("B must be square");
  return {n - checked_rank(power(B, n), rank_tol), n - checked_rank(B, rank_tol)};
}

Matrix laplacian1_fast(const Matrix& C) {
  const int n = static_cast<int>(C.rows());
  Matrix out = Matrix::Zero(n + 1, n + 1);
  out.topLeftCorner(n, n) = C * C.transpose();
  return out;
}

SmallEigenvaluePrediction predict_small_eigenvalues(const Matrix& B, double rank_tol) {
  const ZeroInvariants z = invariants_dd(B, rank_tol);
  const int n = static_cast<int>(B.rows());
  SmallEigenvaluePrediction p;
  p.d = z.d;
  p.d_prime = z.d_prime;
  p.has_small = z.d != z.d_prime;
  p.floor_index = z.d - z.d_prime + 1;
  p.nilpotent = z.d == n;
  p.torus = z.d == n && z.d_prime == n;
  return p;
}

JordanFrame jordan_zero_chain(const Matrix& B, double rank_tol) {
  if (B.rows() != B.cols() || B.rows() < 1) throw Error("B must be square");
  return all_integer(B) ? exact_frame(B) : numeric_frame(B, rank_tol);
}

Matrix CollapseFamily::C_at(double eps) const {
  const Matrix& C = frame.C;
  const int n = static_cast<int>(C.rows());
  Matrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = std::pow(eps, exponents[i] - exponents[j]) * C(i, j);
  return out;
}

CollapseFamily collapse_family(const Matrix& B, int k, double rank_tol) {
  CollapseFamily fam;
  fam.frame = jordan_zero_chain(B, rank_tol);
  const int room = fam.frame.d - fam.frame.d_prime;
  if (k < 0 || k > room)
    throw KTooLarge("k = " + std::to_string(k) + " outside [0, " + std::to_string(room) + "]");
  fam.k = k;
  std::vector<int> kills(fam.frame.chain_lengths.size());
  int left = k;
  for (std::size_t c = 0; c < kills.size(); ++c) {
    kills[c] = std::min(left, fam.frame.chain_lengths[c] - 1);
    left -= kills[c];
  }
  const int n = static_cast<int>(B.rows());
  fam.exponents.assign(n, 1);
  for (int i = 0; i < n; ++i) {
    const int c = fam.frame.chain_of[i];
    if (c < 0) continue;
    const int pos = fam.frame.position_of[i];
    if (pos <= kills[c]) fam.exponents[i] = kills[c] + 2 - pos;
  }
  return fam;
}

double small_threshold(double eps) { return std::min(10.0 * eps * eps, 1e-3); }

std::string CollapseTable::to_csv() const {
  const int m = rows.empty() ? 0 : static_cast<int>(rows.front().eigenvalues.size());
  std::vector<std::string> header{"eps", "trace", "max_curvature", "small_count"};
  for (int i = 1; i <= m; ++i) header.push_back("lambda_" + std::to_string(i));
  csv::Writer w(header);
  for (const auto& r : rows) {
    w.cell(r.eps).cell(r.trace).cell(r.max_curvature).cell(r.small_count);
    for (double x : r.eigenvalues) w.cell(x);
    w.end_row();
  }
  return w.str();
}

namespace {

CollapseRow collapse_row(const CollapseFamily& fam, double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw Error("eps must lie in (0, 1]");
  const Matrix C = fam.C_at(eps);
  CollapseRow r;
  r.eps = eps;
  const lie::SpectrumReport s = lie::spectrum_of(laplacian1_fast(C));
  r.eigenvalues = s.eigenvalues;
  r.trace = C.squaredNorm();
  r.max_curvature = curvature::solvable_curvature_closed_form(C).max_abs();
  const double thr = small_threshold(eps);
  for (double x : s.nonzero())
    if (x < thr) ++r.small_count;
  return r;
}

}  // namespace

CollapseTable run_collapse(const CollapseFamily& fam, std::span<const double> eps_grid, Exec exec) {
  CollapseTable t;
  t.k = fam.k;
  t.rows.resize(eps_grid.size());
  const int m = static_cast<int>(eps_grid.size());
  if (exec == Exec::parallel) {
    std::string failure;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i) {
      try {
        t.rows[i] = collapse_row(fam, eps_grid[i]);
      } catch (const std::exception& e) {
#pragma omp critical
        failure = e.what();
      }
    }
    if (!failure.empty()) throw Error(failure);
  } else {
    for (int i = 0; i < m; ++i) t.rows[i] = collapse_row(fam, eps_grid[i]);
  }
  return t;
}

CollapseTable run_collapse(const Matrix& B, int k, std::span<const double> eps_grid, Exec exec) {
  return run_collapse(collapse_family(B, k), eps_grid, exec);
}

double semisimplicity_defect(const Matrix& B) {
  using CMatrix = Eigen::MatrixXcd;
  const int n = static_cast<int>(B.rows());
  const double scale = std::max(1.0, B.cwiseAbs().rowwise().sum().maxCoeff());
  Eigen::EigenSolver<Matrix> es(B, false);
  std::vector<std::complex<double>> centers;
  for (int i = 0; i < n; ++i) {
    const std::complex<double> z = es.eigenvalues()(i);
    bool found = false;
    for (const auto& c : centers)
      if (std::abs(z - c) <= 1e-6 * scale) found = true;
    if (!found) centers.push_back(z);
  }
  CMatrix q = CMatrix::Identity(n, n);
  const CMatrix Bc = B.cast<std::complex<double>>();
  for (const auto& c : centers) q = q * (Bc - c * CMatrix::Identity(n, n));
  return q.cwiseAbs().maxCoeff() / std::pow(scale, static_cast<double>(centers.size()));
}

FloorReport semisimple_floor(const Matrix& B, int trials, double curvature_cap, std::uint64_t seed,
                             Exec exec) {
  const int n = static_cast<int>(B.rows());
  if (B.cols() != n || n < 1) throw Error("B must be square");
  if (trials < 1) throw Error("need at least one trial");
  if (semisimplicity_defect(B) > kSemisimpleTol) throw NotSemisimple("B is not diagonalizable");
  FloorReport rep;
  rep.trials = trials;
  rep.trace_cap = (n * n + n) * curvature_cap + curvature::kappa_invariant(B);
  if (B.squaredNorm() > rep.trace_cap * (1 + 1e-12))
    throw Error("curvature cap is below the trace of B in an orthonormal frame");

  std::vector<double> floors(trials), shrink(trials);
  auto trial = [&](int t) {
    std::mt19937_64 rng(split_seed(seed, static_cast<std::uint64_t>(t)));
    const Matrix q1 = random_orthogonal(rng, n), q2 = random_orthogonal(rng, n);
    std::uniform_real_distribution<double> ud(-2.0, 2.0);
    Vector u(n);
    for (int i = 0; i < n; ++i) u(i) = ud(rng);
    auto conj = [&](double s) {
      const Vector e = (s * u).array().exp();
      const Matrix P = q1 * e.asDiagonal() * q2;
      return Matrix(P.partialPivLu().solve(B * P));
    };
    double s = 1.0;
    Matrix C = conj(1.0);
    if (C.squaredNorm() > rep.trace_cap) {
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        (conj(mid).squaredNorm() <= rep.trace_cap ? lo : hi) = mid;
      }
      s = lo;
      C = conj(s);
    }
    shrink[t] = s;
    const lie::StructureConstants L = solvable_algebra(C);
    double best = std::numeric_limits<double>::infinity();
    for (int p = 0; p <= n + 1; ++p) best = std::min(best, lie::spectrum(L, p).smallest_nonzero());
    floors[t] = best;
  };

  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < trials; ++t) trial(t);
  } else {
    for (int t = 0; t < trials; ++t) trial(t);
  }
  rep.floor = *std::min_element(floors.begin(), floors.end());
  rep.min_shrink = *std::min_element(shrink.begin(), shrink.end());
  rep.vacuous = std::isinf(rep.floor);
  rep.passes = rep.vacuous || rep.floor > kFloorTol;
  return rep;
}

}  // namespace collapse::mapping_torus
