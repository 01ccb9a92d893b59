#pragma once

// Independent reference computations used by the tests and the acceptance
// suite. None of the library modules depend on this header.

#include "collapse/intlat.hpp"
#include "collapse/lie_complex.hpp"

#include <vector>

namespace collapse::oracle {

// d on Λ^p from dω(x_0..x_p) = Σ_{s<t} (-1)^{s+t} ω([x_s,x_t], ..., x̂_s, ..., x̂_t, ...).
Matrix koszul_derivative(const lie::StructureConstants& L, int p);

// <R(u,v)v, u> from the Levi-Civita connection of the left-invariant metric.
double levi_civita_curvature(const lie::StructureConstants& L, const Vector& u, const Vector& v);

// Rank over Q by fraction-free elimination.
int bareiss_rank(const intlat::IntegerMatrix& m);

// 1 + dim_Q ker(A - I).
int betti1_rational(const intlat::IntegerMatrix& a);

// Shortest nonzero γ^T Q γ over a box of half-width r in every coordinate.
double brute_min_quadratic(const Matrix& Q, int r);

// Sorted values 4π² γ^T Q γ <= cutoff over a box of half-width r.
std::vector<double> brute_spectrum(const Matrix& Q, int r, double cutoff);

// Covering radius of the planar lattice with the given gram, from the
// circumradius of a Gauss-reduced Delaunay triangle.
double planar_covering_radius(const Matrix& gram2);

// Heisenberg brackets in the frame (ε^{-α} X, ε^{-β} Y, ε^{-γ} Z) written out by hand.
lie::StructureConstants scaled_heisenberg(double eps, int alpha, int beta, int gamma);

// 1-form Laplacian of the solvable model computed entrywise from the
// brackets: Σ over 2-forms of the squared coefficients of dV_i^♭.
Matrix solvable_laplacian1(const Matrix& C);

}  // namespace collapse::oracle
