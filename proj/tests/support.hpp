#pragma once

#include "collapse/lie_complex.hpp"
#include "collapse/mapping_torus.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace testing {

using collapse::Matrix;
using collapse::Vector;
namespace lie = collapse::lie;

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  int i = 0;
  for (const auto& r : rows) {
    int j = 0;
    for (double x : r) m(i, j++) = x;
    ++i;
  }
  return m;
}

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(xs.size());
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline lie::StructureConstants so3() {
  return lie::StructureConstants(3, std::vector<lie::BracketEntry>{
                                        {0, 1, 2, 1.0}, {1, 2, 0, 1.0}, {2, 0, 1, 1.0}});
}

// A mixed zoo of Lie algebras, all given in a random orthonormal-declared frame.
inline std::vector<lie::StructureConstants> random_algebras(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> kind(0, 4), dim(2, 4);
  std::vector<lie::StructureConstants> out;
  while (static_cast<int>(out.size()) < count) {
    lie::StructureConstants L(1);
    switch (kind(rng)) {
      case 0: {
        const int n = dim(rng);
        L = collapse::mapping_torus::solvable_algebra(collapse::random_gaussian(rng, n, n));
        break;
      }
      case 1: {
        const int n = dim(rng);
        Vector b = collapse::random_gaussian(rng, n, 1).col(0);
        std::vector<lie::BracketEntry> e;
        for (int i = 0; i < n; ++i) e.push_back({n, n + 1, i, b(i)});
        L = lie::StructureConstants(n + 2, e);
        break;
      }
      case 2: L = lie::direct_sum(lie::heisenberg(), lie::abelian(dim(rng) - 1)); break;
      case 3: L = so3(); break;
      default: L = lie::StructureConstants(2, std::vector<lie::BracketEntry>{{0, 1, 1, 1.0}}); break;
    }
    out.push_back(lie::change_frame(L, collapse::random_frame(rng, L.dim(), 0.5)));
  }
  return out;
}

}  // namespace testing
