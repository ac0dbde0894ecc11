#pragma once

// Seed enumeration with per-seed relax-and-round, and the exhaustive oracle.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mineig/instance.hpp"
#include "mineig/objective.hpp"
#include "mineig/relaxation.hpp"
#include "mineig/rounding.hpp"

namespace mineig {

struct SolveOptions {
  Objective objective = Objective::lambda_min();
  double epsilon = 0.5;
  // Seed size; the theoretical value is used when unset. Seeds never exceed
  // the matroid rank.
  std::optional<std::size_t> ell_override;
  std::size_t trials_per_seed = 25;
  std::uint64_t rng_seed = 0;
  RelaxationOptions relaxation;
  std::size_t threads = 1;
  // Guard on the number of seeds (including the empty one).
  std::uint64_t max_seeds = 2'000'000;
  // Called with the seed index for every solver iteration; must be
  // thread-safe when threads > 1.
  std::function<void(std::size_t, const IterationInfo&)> solver_observer;
};

struct SeedRecord {
  ElementSet seed;
  ElementSet long_set;
  bool feasible = false;
  double cp_value = 0.0;
  double fw_gap = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  ElementSet rounded_base;
  double rounded_value = 0.0;
  bool success = false;
};

struct SolveReport {
  std::string instance_name;
  std::string provenance;
  std::string objective;
  double epsilon = 0.0;
  std::size_t ell_used = 0;
  std::size_t ell_theoretical = 0;
  std::size_t trials_per_seed = 0;
  std::uint64_t rng_seed = 0;

  ElementSet best_base;
  double best_value = 0.0;
  double relaxation_value_at_best_seed = 0.0;
  std::size_t seeds_tried = 0;
  bool all_converged = true;
  std::vector<SeedRecord> per_seed;
  std::optional<double> brute_force_value;
};

// Throws Infeasible when no seed yields a feasible face and TooLarge when
// the seed count exceeds options.max_seeds.
SolveReport enumerate_and_solve(const Instance& instance, const SolveOptions& options,
                                const NumericPolicy& policy = kDefaultPolicy);

// Seed size the driver uses: min(ell, rank).
std::size_t seed_size(const Instance& instance, const SolveOptions& options);

struct BruteForceResult {
  ElementSet base;
  double value = 0.0;
  std::uint64_t bases_examined = 0;
};

// Exact maximiser over all bases; ties keep the lexicographically first
// base. Throws TooLarge beyond 20 elements.
BruteForceResult brute_force_opt(const Instance& instance, const Objective& objective,
                                 const NumericPolicy& policy = kDefaultPolicy);

}  // namespace mineig
