#pragma once

#include "collapse/intlat.hpp"
#include "collapse/lie_complex.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace collapse::mapping_torus {

inline constexpr double kRankTol = 1e-9;
inline constexpr double kFloorTol = 1e-4;
inline constexpr double kSemisimpleTol = 1e-8;

// Mapping torus of A in SL_n(Z) with a real logarithm B.
class MappingTorusBundle {
 public:
  MappingTorusBundle(intlat::IntegerMatrix A, Matrix B);

  int n() const { return A_.rows(); }
  const intlat::IntegerMatrix& A() const { return A_; }
  const Matrix& B() const { return B_; }

 private:
  intlat::IntegerMatrix A_;
  Matrix B_;
};

// Frame e_1..e_n = V_i, e_{n+1} = Y with [Y, V_i] = sum_j B(j,i) V_j.
lie::StructureConstants solvable_algebra(const Matrix& B);

// Vertical block C of an algebra built by solvable_algebra (after any frame
// change preserving the split).
Matrix vertical_block(const lie::StructureConstants& L);

// d = dim ker B^n, d' = dim ker B.
struct ZeroInvariants {
  int d = 0;
  int d_prime = 0;
};

ZeroInvariants invariants_dd(const Matrix& B, double rank_tol = kRankTol);

// Invariant 1-form Laplacian diag(C C^T, 0) in the basis V_1^♭..V_n^♭, Y^♭.
Matrix laplacian1_fast(const Matrix& C);

struct SmallEigenvaluePrediction {
  int d = 0, d_prime = 0;
  bool has_small = false;  // d != d'
  int floor_index = 1;     // d - d' + 1
  bool nilpotent = false;  // d == n
  bool torus = false;      // d == d' == n
};

SmallEigenvaluePrediction predict_small_eigenvalues(const Matrix& B, double rank_tol = kRankTol);

// Basis adapted to the nilpotent part of B on E0 = ker B^n: Jordan chains
// (kernel vectors first, then level by level), then a complement of E0.
struct JordanFrame {
  Matrix P0;                        // columns: new basis in old coordinates
  Matrix C;                         // P0^{-1} B P0
  int d = 0, d_prime = 0;
  std::vector<int> chain_lengths;   // sorted descending
  std::vector<int> chain_of;        // per column, -1 for the complement
  std::vector<int> position_of;     // 1-based position in its chain (1 = kernel vector)
  bool exact = false;               // built with rational arithmetic
};

JordanFrame jordan_zero_chain(const Matrix& B, double rank_tol = kRankTol);

// Frame scaling nu_i = eps^{-exponent_i} on a Jordan frame so that exactly k
// eigenvalues of the invariant 1-form Laplacian tend to zero.
struct CollapseFamily {
  JordanFrame frame;
  std::vector<int> exponents;
  int k = 0;

  Matrix C_at(double eps) const;  // (nu_j / nu_i) C(i,j)
};

CollapseFamily collapse_family(const Matrix& B, int k, double rank_tol = kRankTol);

// min(10 eps^2, 1e-3)
double small_threshold(double eps);

struct CollapseRow {
  double eps = 0;
  std::vector<double> eigenvalues;  // invariant 1-form Laplacian, ascending
  double trace = 0;                 // tr(C_eps^T C_eps)
  double max_curvature = 0;         // max frame-pair |K|
  int small_count = 0;              // nonzero eigenvalues below small_threshold
};

struct CollapseTable {
  int k = 0;
  std::vector<CollapseRow> rows;
  std::string to_csv() const;
};

CollapseTable run_collapse(const CollapseFamily& family, std::span<const double> eps_grid,
                           Exec exec = Exec::parallel);
CollapseTable run_collapse(const Matrix& B, int k, std::span<const double> eps_grid,
                           Exec exec = Exec::parallel);

// ||q(B)|| / max(1,||B||)^deg q for q the product of (x - λ) over distinct
// eigenvalue clusters; zero exactly when B is diagonalizable over C.
double semisimplicity_defect(const Matrix& B);

struct FloorReport {
  double floor = 0;        // min nonzero invariant eigenvalue over trials and degrees
  bool vacuous = false;    // no nonzero eigenvalue in any trial
  int trials = 0;
  double trace_cap = 0;    // (n^2+n) a + kappa
  double min_shrink = 1;   // smallest factor applied to the log-scalings
  bool passes = false;     // floor > kFloorTol
};

// Samples metrics P = Q1 diag(exp(s u)) Q2 with u uniform in [-2,2]; s in
// [0,1] is the largest value keeping tr(C_P^T C_P) under the curvature cap.
FloorReport semisimple_floor(const Matrix& B, int trials, double curvature_cap,
                             std::uint64_t seed, Exec exec = Exec::parallel);

}  // namespace collapse::mapping_torus
