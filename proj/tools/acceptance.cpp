#include "collapse/scenarios.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

// One line per acceptance criterion; exit status 0 only when all pass.
int main(int argc, char** argv) {
  std::uint64_t seed = collapse::verify::kDefaultSeed;
  if (argc > 1) seed = std::stoull(argv[1]);
  const auto s = collapse::cli::verify_all(seed);
  for (const auto& c : s.criteria) std::puts(collapse::cli::criterion_line(c).c_str());
  std::printf("%s: %zu criteria, %.1f s\n", s.pass() ? "ALL PASS" : "FAILED", s.criteria.size(), s.seconds);
  return s.pass() ? EXIT_SUCCESS : EXIT_FAILURE;
}
