#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace collapse::verify {

inline constexpr std::uint64_t kDefaultSeed = 1;

// Outcome of one acceptance criterion. margin is the worst slack over all of
// its sub-checks (distance to the tolerance, in the tolerance's own units);
// a negative margin means a sub-check failed.
struct Criterion {
  int id = 0;
  std::string name;
  bool pass = false;
  double margin = 0;
  std::string detail;  // first failing sub-check, empty on success
  double seconds = 0;
};

// Criteria 1..11 are self-contained numerical checks. The end-to-end
// determinism criterion lives with the scenario runner.
inline constexpr int kLibraryCriteria = 11;

Criterion run_criterion(int id, std::uint64_t seed = kDefaultSeed);
std::vector<Criterion> run_library_criteria(std::uint64_t seed = kDefaultSeed);

}  // namespace collapse::verify
