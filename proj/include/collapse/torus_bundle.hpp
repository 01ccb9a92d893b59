#pragma once

#include "collapse/intlat.hpp"
#include "collapse/lie_complex.hpp"

#include <span>
#include <string>
#include <vector>

namespace collapse::torus_bundle {

// Principal T^n bundle over T^2 with [Y1, Y2] = sum_i a_i X_i, a integral.
class TorusBundleOverT2 {
 public:
  explicit TorusBundleOverT2(std::vector<mpz_class> a, double base_area = 1.0);

  int fiber_dim() const { return static_cast<int>(a_.size()); }
  const std::vector<mpz_class>& a() const { return a_; }
  double base_area() const { return base_area_; }
  Vector bracket() const;  // a as reals, in the orthonormal frame X_i

 private:
  std::vector<mpz_class> a_;
  double base_area_;
};

// M ≅ N_d × T^{n-1} via the basis change P (first column a/d).
struct Reduction {
  mpz_class d;
  intlat::IntegerMatrix P;
  std::string model;
};

Reduction reduce(const TorusBundleOverT2& bundle);

// Frame V_1..V_n, Y1, Y2 with [Y1, Y2] = sum_i b_i V_i.
lie::StructureConstants nil_algebra(const Vector& b);

// Spectrum {0, eta^2 / area^2 with multiplicity C(n, p-1)} on Λ^p of the
// (n+2)-dimensional algebra.
lie::SpectrumReport predict_spectrum(int n, int p, double eta, double base_area = 1.0);

struct SpectrumComparison {
  lie::SpectrumReport predicted, computed;
  double max_diff = 0;
};

SpectrumComparison verify_spectrum(int p, const Vector& b);

// Dimensions inside the eta^2 eigenspace of Δ_p.
struct EigenformSplit {
  int eigen_dim = 0;
  int closed_dim = 0;
  int coclosed_dim = 0;
};

EigenformSplit eigenform_split(int p, const Vector& b);

struct TrajectoryRow {
  double eps;
  double eigenvalue;  // |b(eps)|^2
};

struct Trajectory {
  std::vector<TrajectoryRow> rows;
  bool vanishes = false;
  double limit = 0;  // sum of b0_i^2 over alpha_i = 0
  std::string to_csv() const;
};

// Fiber frame scaled by eps^{alpha_i}; alpha_i >= 0 exact rationals.
Trajectory collapse_direction(const Vector& b0, const std::vector<mpq_class>& alpha,
                              std::span<const double> eps_grid);

struct CurvatureBoundReport {
  double max_abs = 0;
  double bound = 0;  // 3/4 |b|^2
  double at_base_pair = 0;  // K(Y1, Y2)
  bool holds = false;
};

CurvatureBoundReport curvature_bound_check(const Vector& b);

// Spectrum on Λ^p of the product of two nil bundles, from the factor spectra.
lie::SpectrumReport product_bundle_spectrum(const Vector& b1, const Vector& b2, int p);

}  // namespace collapse::torus_bundle
