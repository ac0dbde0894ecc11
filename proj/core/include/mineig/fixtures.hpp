#pragma once

// Bundled instances: the four-vector integrality-gap example, planted
// optimum instances per (dimension, matroid kind), and planted splitting
// instances.

#include <cstdint>
#include <string>
#include <vector>

#include "mineig/instance.hpp"
#include "mineig/ks.hpp"

namespace mineig {

// e1, e1, e2, e3 in R^3 with bases {1,2,3} and {1,2,4}: every base is
// singular while the relaxation reaches 1/2.
Instance appendix_a_instance();

// Instance whose lambda-min optimum is a planted base, confirmed unique with
// a 5% margin by exhaustive search. d is 2 or 3; n <= 10.
Instance planted_instance(std::size_t d, MatroidKind kind, std::uint64_t seed);

// Planted split with m = 2d + 2 vectors and c = 0.05.
KSInstance planted_ks_fixture(std::size_t d, std::uint64_t seed);

struct FixtureFile {
  std::string file_name;
  std::string contents;
  bool split_instance = false;  // unit-decomposition format rather than an instance
};

// Every bundled fixture, serialised.
std::vector<FixtureFile> bundled_fixtures();

}  // namespace mineig
