#pragma once

#include "collapse/linalg.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace collapse::lie {

inline constexpr double kJacobiTol = 1e-9;
inline constexpr double kSymTol = 1e-10;
inline constexpr double kEigTol = 1e-9;
inline constexpr double kGroupingTol = 1e-8;

// [e_i, e_j] has component `value` along e_k. Indices are 0-based.
struct BracketEntry {
  int i, j, k;
  double value;
};

// Brackets of a Lie algebra in a basis that is declared orthonormal.
// c(i,j,k) is the e_k component of [e_i, e_j]; antisymmetric in (i,j).
class StructureConstants {
 public:
  explicit StructureConstants(int n);
  StructureConstants(int n, const std::vector<BracketEntry>& entries,
                     double jacobi_tol = kJacobiTol);

  // Full tensor, index (i*n + j)*n + k. Must already be antisymmetric.
  static StructureConstants from_tensor(int n, std::vector<double> c,
                                        double jacobi_tol = kJacobiTol);

  // Skips the Jacobi check; for exercising jacobi_defect on non-algebras.
  static StructureConstants unchecked(int n, const std::vector<BracketEntry>& entries);

  int dim() const noexcept { return n_; }
  double operator()(int i, int j, int k) const noexcept {
    return c_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k];
  }
  const std::vector<double>& tensor() const noexcept { return c_; }
  double max_abs() const noexcept;

  // Nonzero entries with i < j.
  std::vector<BracketEntry> entries() const;

  friend bool operator==(const StructureConstants&, const StructureConstants&) = default;

 private:
  StructureConstants(int n, std::vector<double> c) : n_(n), c_(std::move(c)) {}
  void check_jacobi(double tol) const;

  int n_ = 0;
  std::vector<double> c_;
};

// Text form: a line "n = <dim>" then lines "c i j k = <value>" with 1-based
// indices and i < j. '#' starts a comment.
StructureConstants parse_structure_constants(std::string_view text);
std::string to_text(const StructureConstants& L);

double jacobi_defect(const StructureConstants& L);

// max_j |tr ad_{e_j}|
double unimodularity_defect(const StructureConstants& L);

// New frame f_j = sum_i P(i,j) e_i.
StructureConstants change_frame(const StructureConstants& L, const Matrix& P);

StructureConstants direct_sum(const StructureConstants& a, const StructureConstants& b);

// Basis of Λ^p over n generators, index tuples in lexicographic order.
class FormBasis {
 public:
  FormBasis(int n, int p);

  int ambient() const noexcept { return n_; }
  int degree() const noexcept { return p_; }
  int size() const noexcept { return static_cast<int>(masks_.size()); }

  std::uint32_t mask(int r) const { return masks_[r]; }
  std::vector<int> tuple(int r) const;
  int rank_of(std::uint32_t mask) const;  // -1 when the mask has the wrong degree
  std::string label(int r) const;         // 1-based, e.g. "125"

 private:
  int n_, p_;
  std::vector<std::uint32_t> masks_;
  std::vector<int> rank_;  // indexed by mask
};

// Matrix of d: Λ^p -> Λ^{p+1}; columns indexed by FormBasis(n,p),
// rows by FormBasis(n,p+1). Convention dξ^k(e_i,e_j) = -c(i,j,k).
Matrix exterior_derivative(const StructureConstants& L, int p, Exec exec = Exec::parallel);

// Λ^p -> Λ^{p-1}, the transpose of d_{p-1}.
Matrix codifferential(const StructureConstants& L, int p);

Matrix laplacian(const StructureConstants& L, int p);

struct EigenGroup {
  double value;
  int multiplicity;
};

struct SpectrumReport {
  std::vector<double> eigenvalues;  // ascending, clamped at 0
  std::vector<EigenGroup> groups;
  int kernel_dim = 0;

  std::vector<double> nonzero() const;
  double smallest_nonzero() const;  // +inf when there is none
};

// Spectrum of a symmetric positive semidefinite matrix.
SpectrumReport spectrum_of(const Matrix& sym);
SpectrumReport spectrum_of(std::vector<double> eigenvalues);

SpectrumReport spectrum(const StructureConstants& L, int p);

// Standard algebras used across the library.
StructureConstants abelian(int n);
StructureConstants heisenberg();  // [e1,e2] = e3

}  // namespace collapse::lie
