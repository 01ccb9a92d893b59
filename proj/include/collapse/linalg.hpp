#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace collapse {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Kernels that have both an OpenMP path and a serial reference path take this.
enum class Exec { serial, parallel };

double max_abs(const Matrix& m);

// Eigenvalues of a symmetric matrix, ascending.
std::vector<double> symmetric_eigenvalues(const Matrix& m);

std::vector<double> singular_values(const Matrix& m);
int numeric_rank(const Matrix& m, double tol);

Matrix random_orthogonal(std::mt19937_64& rng, int n);
Matrix random_gaussian(std::mt19937_64& rng, int rows, int cols);

// Q1 * diag(exp(u)) * Q2 with u uniform in [-spread, spread].
Matrix random_frame(std::mt19937_64& rng, int n, double spread);

// Seed derivation so that trial t of a parallel loop draws the same numbers
// whatever the thread schedule.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace collapse
