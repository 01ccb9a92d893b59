#pragma once

#include "collapse/linalg.hpp"

#include <gmpxx.h>

#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace collapse::intlat {

class IntegerMatrix {
 public:
  IntegerMatrix() = default;
  IntegerMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(std::size_t(rows) * cols) {}
  IntegerMatrix(std::initializer_list<std::initializer_list<long>> rows);

  static IntegerMatrix identity(int n);
  // Throws if an entry is not an integer (to within 1e-9).
  static IntegerMatrix from_real(const Matrix& m);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  mpz_class& operator()(int i, int j) { return a_[std::size_t(i) * cols_ + j]; }
  const mpz_class& operator()(int i, int j) const { return a_[std::size_t(i) * cols_ + j]; }

  IntegerMatrix transpose() const;
  IntegerMatrix col_range(int first, int count) const;
  bool is_zero() const;
  Matrix to_real() const;

  void swap_rows(int i, int k);
  void swap_cols(int j, int k);
  void add_row_multiple(int target, int source, const mpz_class& q);  // row_t += q row_s
  void add_col_multiple(int target, int source, const mpz_class& q);
  void negate_row(int i);

  friend IntegerMatrix operator*(const IntegerMatrix& a, const IntegerMatrix& b);
  friend IntegerMatrix operator-(const IntegerMatrix& a, const IntegerMatrix& b);
  friend bool operator==(const IntegerMatrix& a, const IntegerMatrix& b) = default;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<mpz_class> a_;
};

// Fraction-free Gaussian elimination.
mpz_class determinant(const IntegerMatrix& m);

// Header line "rows cols", then the entries row by row, whitespace separated.
IntegerMatrix parse_integer_matrix(std::string_view text);
std::string to_text(const IntegerMatrix& m);

// U * M * V = D with U, V unimodular and D diagonal, d_1 | d_2 | ..., d_i >= 0.
struct SmithForm {
  IntegerMatrix U, D, V;
  std::vector<mpz_class> diagonal() const;
  int rank() const;
};

SmithForm smith_normal_form(const IntegerMatrix& m);

// Columns form a basis of the lattice ker(M) ∩ Z^n.
IntegerMatrix integer_kernel(const IntegerMatrix& m);

struct AbelianizationReport {
  int free_rank = 0;               // zero invariant factors of A - I
  std::vector<mpz_class> torsion;  // invariant factors > 1
  int betti1 = 0;
};

// First Betti number of the mapping torus of A in SL_n(Z).
AbelianizationReport betti1_mapping_torus(const IntegerMatrix& a);

struct GcdCompletion {
  mpz_class gcd;
  IntegerMatrix P;  // unimodular, first column = a / gcd
};

GcdCompletion gcd_completion(const std::vector<mpz_class>& a);

Matrix matrix_exp(const Matrix& b, double tol = 1e-15);

// Real principal logarithm; throws BranchUnavailable when an eigenvalue lies
// on the closed negative real axis.
Matrix principal_log(const Matrix& a, double tol = 1e-10);

bool verify_log(const Matrix& a, const Matrix& b, double tol);

// Small exact rational linear algebra.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(std::size_t(rows) * cols) {}
  explicit RationalMatrix(const IntegerMatrix& m);

  static RationalMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  mpq_class& operator()(int i, int j) { return a_[std::size_t(i) * cols_ + j]; }
  const mpq_class& operator()(int i, int j) const { return a_[std::size_t(i) * cols_ + j]; }

  RationalMatrix transpose() const;
  Matrix to_real() const;
  RationalMatrix column(int j) const;
  // Horizontal concatenation.
  static RationalMatrix hcat(const RationalMatrix& a, const RationalMatrix& b);

  friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<mpq_class> a_;
};

int rank(const RationalMatrix& m);
RationalMatrix nullspace(const RationalMatrix& m);  // basis in columns
RationalMatrix inverse(const RationalMatrix& m);    // throws SingularFrame

}  // namespace collapse::intlat
