#pragma once

#include "collapse/flat_torus.hpp"
#include "collapse/intlat.hpp"
#include "collapse/torus_bundle.hpp"

#include <span>
#include <string>
#include <vector>

namespace collapse::euler {

// Euler map of a principal torus bundle: columns indexed by a lattice basis
// of the dual fiber algebra, rows by an orthonormal basis of harmonic
// 2-forms on the base. gram_dual is the metric on the dual fiber algebra.
class EulerMap {
 public:
  EulerMap(Matrix E, Matrix gram_dual);

  int fiber_dim() const { return static_cast<int>(E_.cols()); }
  const Matrix& E() const { return E_; }
  const Matrix& gram_dual() const { return gram_; }
  double fiber_volume() const { return vol_; }  // 1 / sqrt(det gram_dual)

 private:
  Matrix E_, gram_;
  double vol_;
};

// E L^{-T} for gram_dual = L L^T: the map in orthonormal frames.
Matrix orthonormal_matrix(const Matrix& E, const Matrix& gram_dual);

// Matrix of e*e in the orthonormalized frame.
Matrix ee_star(const Matrix& E, const Matrix& gram_dual);

struct BoundChain {
  double lambda_min = 0;
  double det_ratio = 0;   // Det(e*e) / ||e*e||^{k-1}
  double det_bound = 0;   // (Det e)^2 / ||e||^{2k-2}
  double margin_low = 0;  // lambda_min - det_ratio
  double margin_high = 0; // det_ratio - det_bound
  bool ok = false;
};

BoundChain bound_chain(const Matrix& E, const Matrix& gram_dual);

struct DetFactorization {
  double det_lattice = 0;  // Det' e, in the lattice basis
  double fiber_volume = 0;
  double det_orth = 0;     // Det e, in the orthonormal basis
  double rel_err = 0;      // |Det e - Det'e · vol| / Det e
};

DetFactorization det_factorization(const Matrix& E, const Matrix& gram_dual);

struct NoninjectiveReduction {
  bool trivial = false;            // E = 0: no bound
  int kernel_dim = 0;
  intlat::IntegerMatrix kernel;    // lattice basis of ker e, in columns
  Matrix restricted;               // A: e on (ker e)^⊥, orthonormal frames
  Matrix lattice_block;            // A': e on the complementary lattice vectors
  double det_A = 0, det_A_lattice = 0, det_P1 = 0, det_P = 0;
  double identity_rel_err = 0;     // Det A vs Det A' · Det P1 / Det P
  double quotient_volume = 0;      // 1 / Det P1
  BoundChain chain;                // for the restriction A
};

NoninjectiveReduction noninjective_reduce(const Matrix& E, const Matrix& gram_dual);

struct RhoReport {
  double rho = 0;
  std::vector<int> coefficients;   // on dx^i ∧ dx^j, i < j, lexicographic
};

// min L² norm of a nonzero integral constant 2-form on a flat torus.
RhoReport rho_flat(const flat_torus::FlatTorus& N, int search_scale = 1);

struct VolBoundRow {
  double eps, eigenvalue, fiber_volume, ratio;
};

struct VolBoundReport {
  std::vector<VolBoundRow> rows;
  double min_ratio = 0;
  bool homothety = false;
  bool bounded_below = false;  // min over the grid attained at the largest eps
  std::string to_csv() const;
};

// Fiber scaled by eps^{alpha_i} along the lattice basis.
VolBoundReport vol_bound_experiment(const torus_bundle::TorusBundleOverT2& bundle,
                                    const std::vector<mpq_class>& alpha,
                                    std::span<const double> eps_grid);

}  // namespace collapse::euler
