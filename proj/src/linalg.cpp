#include "collapse/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace collapse {

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

std::vector<double> symmetric_eigenvalues(const Matrix& m) {
  if (m.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  const Vector& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

std::vector<double> singular_values(const Matrix& m) {
  if (m.size() == 0) return {};
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

int numeric_rank(const Matrix& m, double tol) {
  int r = 0;
  for (double s : singular_values(m))
    if (s > tol) ++r;
  return r;
}

Matrix random_gaussian(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = g(rng);
  return m;
}

Matrix random_orthogonal(std::mt19937_64& rng, int n) {
  Eigen::HouseholderQR<Matrix> qr(random_gaussian(rng, n, n));
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

Matrix random_frame(std::mt19937_64& rng, int n, double spread) {
  std::uniform_real_distribution<double> u(-spread, spread);
  Vector scales(n);
  for (int i = 0; i < n; ++i) scales(i) = std::exp(u(rng));
  Matrix q1 = random_orthogonal(rng, n);
  Matrix q2 = random_orthogonal(rng, n);
  return q1 * scales.asDiagonal() * q2;
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace collapse
