#pragma once

#include "collapse/linalg.hpp"

#include <string>
#include <vector>

namespace collapse::flat_torus {

// R^k / Z^k with a constant metric given by its Gram matrix.
class FlatTorus {
 public:
  explicit FlatTorus(Matrix gram);

  int dim() const { return static_cast<int>(gram_.rows()); }
  const Matrix& gram() const { return gram_; }
  const Matrix& dual_gram() const { return dual_; }
  double volume() const;

 private:
  Matrix gram_, dual_;
};

// Block-diagonal product metric.
FlatTorus product(const FlatTorus& base, const FlatTorus& fiber);

struct Mode {
  std::vector<int> gamma;  // dual lattice vector
  double eigenvalue;       // 4π² γ^T G^{-1} γ
};

struct ModeSpectrum {
  int k = 0, p = 0;
  long form_multiplicity = 1;  // C(k,p) forms per mode
  double cutoff = 0;
  std::vector<Mode> modes;     // sorted by eigenvalue, then γ

  // Eigenvalues with multiplicity (each mode repeated C(k,p) times).
  std::vector<double> eigenvalues() const;
  // fiber_dims > 0 marks modes whose last fiber_dims components vanish as invariant.
  std::string to_csv(int fiber_dims = 0) const;
};

struct ShortestDual {
  std::vector<int> gamma;
  double norm2;  // γ^T G^{-1} γ
};

// Box half-widths R_i guaranteeing every γ with γ^T Q γ <= q0 lies inside.
std::vector<int> enumeration_box(const Matrix& Q, double q0);

ShortestDual shortest_dual(const FlatTorus& T, int box_scale = 1);
double lambda01(const FlatTorus& T, int box_scale = 1);

ModeSpectrum p_form_spectrum(const FlatTorus& T, int p, double cutoff, Exec exec = Exec::parallel);

struct DiameterEstimate {
  double value = 0;  // max over the grid of the distance to the lattice
  double error = 0;  // true diameter lies in [value, value + error]
};

inline constexpr double kDefaultResolution = 1.0 / 200;

DiameterEstimate diameter(const FlatTorus& T, double resolution = kDefaultResolution,
                          Exec exec = Exec::parallel);

// (dx + t dy)^2 + dy^2
FlatTorus gt_gram(double t);

struct ThresholdReport {
  double fiber_lambda01 = 0;
  double min_noninvariant = 0;  // smallest eigenvalue carried by a mode with γ_F != 0
  long below_threshold = 0;     // modes with eigenvalue < fiber_lambda01
  long violations = 0;          // of those, modes with γ_F != 0
  bool attained = false;        // min_noninvariant == fiber_lambda01
  bool holds = false;
};

// cutoff <= 0 picks 1.5 × λ01(fiber).
ThresholdReport threshold_check_product(const FlatTorus& base, const FlatTorus& fiber, int p,
                                        double cutoff = 0);

struct OddMultiplicityReport {
  int eigenvalues_checked = 0;
  int odd = 0;
  int violations = 0;  // odd eigenvalues with no invariant mode
  bool holds = false;
};

OddMultiplicityReport odd_multiplicity_check(const FlatTorus& base, const FlatTorus& fiber, int p,
                                             double cutoff);

struct DiameterBoundReport {
  double lambda01 = 0;
  DiameterEstimate diameter;
  double margin = 0;  // λ01 - π² / (value + error)²
  bool holds = false;
};

DiameterBoundReport diameter_eigenvalue_bound_check(const FlatTorus& T,
                                                    double resolution = kDefaultResolution);

}  // namespace collapse::flat_torus
