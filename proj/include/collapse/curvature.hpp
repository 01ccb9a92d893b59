#pragma once

#include "collapse/lie_complex.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace collapse::curvature {

inline constexpr double kOrthoTol = 1e-9;

// (ad_u)(k,j) = sum_i u_i c(i,j,k)
Matrix ad(const lie::StructureConstants& L, const Vector& u);
Matrix ad_star(const lie::StructureConstants& L, const Vector& u);

// Sectional curvature of the plane spanned by orthonormal u, v for the
// left-invariant metric making the basis orthonormal.
double sectional_curvature(const lie::StructureConstants& L, const Vector& u, const Vector& v);

class CurvatureTable {
 public:
  explicit CurvatureTable(int dim) : k_(Matrix::Zero(dim, dim)) {}

  int dim() const { return static_cast<int>(k_.rows()); }
  double operator()(int i, int j) const { return k_(i, j); }
  void set(int i, int j, double value) { k_(i, j) = k_(j, i) = value; }
  const Matrix& matrix() const { return k_; }

  double max_abs() const;  // over frame pairs i < j

  std::optional<double> sampled_max_abs;

 private:
  Matrix k_;
};

CurvatureTable frame_curvature(const lie::StructureConstants& L);

// Max |K| over random orthonormal planes.
double sampled_max_abs_curvature(const lie::StructureConstants& L, int planes, std::uint64_t seed);

// Solvable model with frame V_1..V_n, Y: uses K(Y,V_i) and K(V_i,V_j) in terms
// of the vertical block C, where [Y, V_i] = sum_j C(j,i) V_j.
CurvatureTable solvable_curvature_closed_form(const Matrix& C);

// Nil torus-bundle model with frame V_1..V_n, Y1, Y2 and [Y1,Y2] = eta V_1.
CurvatureTable nil_bundle_curvature_closed_form(int fiber_dim, double eta);

// sum_{i,j} (c_ii c_jj - c_ij c_ji)
double kappa_invariant(const Matrix& C);

struct TraceBoundsReport {
  double trace = 0;      // tr(C^T C)
  double kappa = 0;
  double a = 0;          // curvature bound supplied by the caller
  double max_pair = 0;   // max frame-pair |K| of the solvable model
  double upper_bound = 0;  // (n^2 + n) a + kappa
  double upper_margin = 0;  // upper_bound - trace
  double lower_margin = 0;  // 2 trace - max_pair
  bool holds = false;
};

TraceBoundsReport trace_bounds_check(const Matrix& C, double a);

// Index sets of a Riemannian submersion given by a vertical ideal.
struct SubmersionSplit {
  std::vector<int> vertical;
  std::vector<int> horizontal;
};

// Structure constants of the quotient by the vertical ideal, in the
// horizontal frame. Throws if the vertical span is not an ideal.
lie::StructureConstants base_algebra(const lie::StructureConstants& L, const SubmersionSplit& split);

// max over horizontal frame pairs of |K_base - K_total - 3/4 |[X,Y]^V|^2|.
// base_curvature is indexed by positions in split.horizontal.
double oneill_defect(const lie::StructureConstants& L, const SubmersionSplit& split,
                     const Matrix& base_curvature);

struct FormBoundReport {
  double a = 0;
  double pair_max = 0;     // max |dω(X,Y)|^2 over vertical duals ω and horizontal pairs
  double pair_bound = 0;   // 8a/3
  double global_max = 0;   // max |dω|^2
  double global_bound = 0; // 4 a N(N-1)/3, N = dim
  bool holds = false;
};

// Checks the bounds on dω for the duals ω of the vertical frame vectors.
FormBoundReport oneill_form_bound_check(const lie::StructureConstants& L,
                                        const SubmersionSplit& split, double a);

}  // namespace collapse::curvature
