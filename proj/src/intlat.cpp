#include "collapse/intlat.hpp"

#include "collapse/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace collapse::intlat {

IntegerMatrix::IntegerMatrix(std::initializer_list<std::initializer_list<long>> rows) {
  rows_ = static_cast<int>(rows.size());
  cols_ = rows_ ? static_cast<int>(rows.begin()->size()) : 0;
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != cols_) throw Error("ragged integer matrix literal");
    for (long x : r) a_.emplace_back(x);
  }
}

IntegerMatrix IntegerMatrix::identity(int n) {
  IntegerMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntegerMatrix IntegerMatrix::from_real(const Matrix& m) {
  IntegerMatrix out(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int i = 0; i < out.rows(); ++i)
    for (int j = 0; j < out.cols(); ++j) {
      const double r = std::round(m(i, j));
      if (std::abs(r - m(i, j)) > 1e-9 || std::abs(r) > 9e15) throw Error("matrix entry is not an integer");
      out(i, j) = static_cast<long>(r);
    }
  return out;
}

IntegerMatrix IntegerMatrix::transpose() const {
  IntegerMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

IntegerMatrix IntegerMatrix::col_range(int first, int count) const {
  IntegerMatrix out(rows_, count);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < count; ++j) out(i, j) = (*this)(i, first + j);
  return out;
}

bool IntegerMatrix::is_zero() const {
  return std::all_of(a_.begin(), a_.end(), [](const mpz_class& x) { return x == 0; });
}

Matrix IntegerMatrix::to_real() const {
  Matrix m(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).get_d();
  return m;
}

void IntegerMatrix::swap_rows(int i, int k) {
  if (i == k) return;
  for (int j = 0; j < cols_; ++j) std::swap((*this)(i, j), (*this)(k, j));
}

void IntegerMatrix::swap_cols(int j, int k) {
  if (j == k) return;
  for (int i = 0; i < rows_; ++i) std::swap((*this)(i, j), (*this)(i, k));
}

void IntegerMatrix::add_row_multiple(int target, int source, const mpz_class& q) {
  for (int j = 0; j < cols_; ++j) (*this)(target, j) += q * (*this)(source, j);
}

void IntegerMatrix::add_col_multiple(int target, int source, const mpz_class& q) {
  for (int i = 0; i < rows_; ++i) (*this)(i, target) += q * (*this)(i, source);
}

void IntegerMatrix::negate_row(int i) {
  for (int j = 0; j < cols_; ++j) (*this)(i, j) = -(*this)(i, j);
}

IntegerMatrix operator*(const IntegerMatrix& a, const IntegerMatrix& b) {
  if (a.cols() != b.rows()) throw Error("integer matrix shapes do not match");
  IntegerMatrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
    }
  return c;
}

IntegerMatrix operator-(const IntegerMatrix& a, const IntegerMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error("integer matrix shapes do not match");
  IntegerMatrix c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

mpz_class determinant(const IntegerMatrix& m) {
  if (m.rows() != m.cols()) throw Error("determinant of a non-square matrix");
  const int n = m.rows();
  if (n == 0) return 1;
  IntegerMatrix a = m;
  mpz_class prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (a(k, k) == 0) {
      int r = k + 1;
      while (r < n && a(r, k) == 0) ++r;
      if (r == n) return 0;
      a.swap_rows(k, r);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) {
        a(i, j) = a(i, j) * a(k, k) - a(i, k) * a(k, j);
        mpz_divexact(a(i, j).get_mpz_t(), a(i, j).get_mpz_t(), prev.get_mpz_t());
      }
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

IntegerMatrix parse_integer_matrix(std::string_view text) {
  std::istringstream in{std::string(text)};
  int r = -1, c = -1;
  if (!(in >> r >> c) || r < 0 || c < 0) throw ParseError("expected 'rows cols' header");
  IntegerMatrix m(r, c);
  std::string tok;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) {
      if (!(in >> tok)) throw ParseError("too few matrix entries");
      if (m(i, j).set_str(tok, 10) != 0) throw ParseError("not an integer: " + tok);
    }
  if (in >> tok) throw ParseError("too many matrix entries");
  return m;
}

std::string to_text(const IntegerMatrix& m) {
  std::string out = std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out += ' ';
      out += m(i, j).get_str();
    }
    out += '\n';
  }
  return out;
}

std::vector<mpz_class> SmithForm::diagonal() const {
  std::vector<mpz_class> d;
  for (int i = 0; i < std::min(D.rows(), D.cols()); ++i) d.push_back(D(i, i));
  return d;
}

int SmithForm::rank() const {
  int r = 0;
  for (const auto& x : diagonal())
    if (x != 0) ++r;
  return r;
}

SmithForm smith_normal_form(const IntegerMatrix& m) {
  const int rows = m.rows(), cols = m.cols();
  IntegerMatrix a = m, U = IntegerMatrix::identity(rows), V = IntegerMatrix::identity(cols);

  for (int t = 0; t < std::min(rows, cols); ++t) {
    while (true) {
      int pi = -1, pj = -1;
      for (int i = t; i < rows; ++i)
        for (int j = t; j < cols; ++j)
          if (a(i, j) != 0 && (pi < 0 || mpz_cmpabs(a(i, j).get_mpz_t(), a(pi, pj).get_mpz_t()) < 0)) pi = i, pj = j;
      if (pi < 0) return {U, a, V};

      a.swap_rows(t, pi), U.swap_rows(t, pi);
      a.swap_cols(t, pj), V.swap_cols(t, pj);

      bool clean = true;
      for (int i = t + 1; i < rows; ++i) {
        if (a(i, t) == 0) continue;
        const mpz_class q = -(a(i, t) / a(t, t));
        a.add_row_multiple(i, t, q), U.add_row_multiple(i, t, q);
        if (a(i, t) != 0) clean = false;
      }
      for (int j = t + 1; j < cols; ++j) {
        if (a(t, j) == 0) continue;
        const mpz_class q = -(a(t, j) / a(t, t));
        a.add_col_multiple(j, t, q), V.add_col_multiple(j, t, q);
        if (a(t, j) != 0) clean = false;
      }
      if (!clean) continue;

      int bad = -1;
      for (int i = t + 1; i < rows && bad < 0; ++i)
        for (int j = t + 1; j < cols; ++j)
          if (a(i, j) % a(t, t) != 0) {
            bad = i;
            break;
          }
      if (bad < 0) break;
      a.add_row_multiple(t, bad, 1), U.add_row_multiple(t, bad, 1);
    }
    if (a(t, t) < 0) a.negate_row(t), U.negate_row(t);
  }
  return {U, a, V};
}

IntegerMatrix integer_kernel(const IntegerMatrix& m) {
  SmithForm s = smith_normal_form(m);
  const int r = s.rank();
  return s.V.col_range(r, m.cols() - r);
}

AbelianizationReport betti1_mapping_torus(const IntegerMatrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw NotUnimodular("monodromy must be square");
  if (determinant(a) != 1) throw NotUnimodular("monodromy does not lie in SL_n(Z)");
  const int n = a.rows();
  SmithForm s = smith_normal_form(a - IntegerMatrix::identity(n));
  AbelianizationReport rep;
  for (const auto& d : s.diagonal()) {
    if (d == 0) ++rep.free_rank;
    else if (d > 1) rep.torsion.push_back(d);
  }
  rep.betti1 = rep.free_rank + 1;
  return rep;
}

GcdCompletion gcd_completion(const std::vector<mpz_class>& a) {
  const int n = static_cast<int>(a.size());
  if (n == 0 || std::all_of(a.begin(), a.end(), [](const mpz_class& x) { return x == 0; }))
    throw ZeroVector("gcd completion of the zero vector");
  std::vector<mpz_class> w = a;
  IntegerMatrix P = IntegerMatrix::identity(n);  // kept equal to U^{-1} where U a = w
  while (true) {
    int p = -1;
    for (int i = 0; i < n; ++i)
      if (w[i] != 0 && (p < 0 || mpz_cmpabs(w[i].get_mpz_t(), w[p].get_mpz_t()) < 0)) p = i;
    if (p != 0) {
      std::swap(w[0], w[p]);
      P.swap_cols(0, p);
    }
    bool done = true;
    for (int i = 1; i < n; ++i) {
      if (w[i] == 0) continue;
      const mpz_class q = w[i] / w[0];
      w[i] -= q * w[0];
      P.add_col_multiple(0, i, q);
      if (w[i] != 0) done = false;
    }
    if (done) break;
  }
  if (w[0] < 0) {
    w[0] = -w[0];
    for (int i = 0; i < n; ++i) P(i, 0) = -P(i, 0);
  }
  return {w[0], P};
}

Matrix matrix_exp(const Matrix& b, double tol) {
  const int n = static_cast<int>(b.rows());
  const double norm = b.size() ? b.cwiseAbs().rowwise().sum().maxCoeff() : 0.0;
  int s = 0;
  if (norm > 0.5) s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix x = b / std::ldexp(1.0, s);
  Matrix e = Matrix::Identity(n, n), term = Matrix::Identity(n, n);
  for (int k = 1; k < 64; ++k) {
    term = term * x / static_cast<double>(k);
    e += term;
    if (max_abs(term) <= tol * max_abs(e)) break;
  }
  for (int i = 0; i < s; ++i) e = e * e;
  return e;
}

Matrix principal_log(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) throw BranchUnavailable("logarithm of a non-square matrix");
  Eigen::EigenSolver<Matrix> es(a, false);
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const std::complex<double> z = es.eigenvalues()(i);
    if (std::abs(z.imag()) <= tol * std::max(1.0, std::abs(z)) && z.real() <= tol)
      throw BranchUnavailable("eigenvalue on the closed negative real axis");
  }
  Matrix out = a.log();
  return out;
}

bool verify_log(const Matrix& a, const Matrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return max_abs(matrix_exp(b) - a) <= tol;
}

RationalMatrix::RationalMatrix(const IntegerMatrix& m) : RationalMatrix(m.rows(), m.cols()) {
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) (*this)(i, j) = m(i, j);
}

RationalMatrix RationalMatrix::identity(int n) {
  RationalMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RationalMatrix RationalMatrix::transpose() const {
  RationalMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix RationalMatrix::to_real() const {
  Matrix m(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).get_d();
  return m;
}

RationalMatrix RationalMatrix::column(int j) const {
  RationalMatrix c(rows_, 1);
  for (int i = 0; i < rows_; ++i) c(i, 0) = (*this)(i, j);
  return c;
}

RationalMatrix RationalMatrix::hcat(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.cols() == 0) return b;
  if (b.cols() == 0) return a;
  if (a.rows() != b.rows()) throw Error("hcat of matrices with different heights");
  RationalMatrix m(a.rows(), a.cols() + b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
    for (int j = 0; j < b.cols(); ++j) m(i, a.cols() + j) = b(i, j);
  }
  return m;
}

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.cols() != b.rows()) throw Error("rational matrix shapes do not match");
  RationalMatrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
    }
  return c;
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(RationalMatrix& m) {
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < m.cols() && r < m.rows(); ++c) {
    int p = r;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    for (int j = 0; j < m.cols(); ++j) std::swap(m(r, j), m(p, j));
    const mpq_class inv = 1 / m(r, c);
    for (int j = 0; j < m.cols(); ++j) m(r, j) *= inv;
    for (int i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c) == 0) continue;
      const mpq_class f = m(i, c);
      for (int j = 0; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

int rank(const RationalMatrix& m) {
  RationalMatrix t = m;
  return static_cast<int>(rref(t).size());
}

RationalMatrix nullspace(const RationalMatrix& m) {
  RationalMatrix t = m;
  const std::vector<int> piv = rref(t);
  std::vector<bool> is_pivot(m.cols(), false);
  for (int c : piv) is_pivot[c] = true;
  RationalMatrix basis(m.cols(), m.cols() - static_cast<int>(piv.size()));
  int k = 0;
  for (int f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    basis(f, k) = 1;
    for (std::size_t r = 0; r < piv.size(); ++r) basis(piv[r], k) = -t(static_cast<int>(r), f);
    ++k;
  }
  return basis;
}

RationalMatrix inverse(const RationalMatrix& m) {
  const int n = m.rows();
  if (m.cols() != n) throw SingularFrame("inverse of a non-square matrix");
  RationalMatrix aug = RationalMatrix::hcat(m, RationalMatrix::identity(n));
  const std::vector<int> piv = rref(aug);
  if (static_cast<int>(piv.size()) < n || piv[n - 1] != n - 1) throw SingularFrame("matrix is singular");
  RationalMatrix inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

}  // namespace collapse::intlat
