#include "mineig/driver.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "mineig/error.hpp"
#include "mineig/local_search.hpp"

namespace mineig {
namespace {

std::vector<ElementSet> enumerate_seeds(const Matroid& m, std::size_t k, std::uint64_t max_seeds) {
  const std::size_t n = m.ground_size();
  const std::uint64_t candidates = binomial(n, k);
  if (candidates >= max_seeds) {
    throw Error(ErrorCode::kTooLarge, "seed enumeration would examine " + std::to_string(candidates) +
                                          " subsets (limit " + std::to_string(max_seeds) + ")");
  }
  std::vector<ElementSet> seeds{ElementSet{}};
  if (k == 0) return seeds;
  ElementSet combo(k);
  std::iota(combo.begin(), combo.end(), Element{0});
  while (true) {
    if (m.is_independent(combo)) seeds.push_back(combo);
    std::size_t i = k;
    while (i > 0 && combo[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++combo[i - 1];
    for (std::size_t j = i; j < k; ++j) combo[j] = combo[j - 1] + 1;
  }
  return seeds;
}

SeedRecord process_seed(const Instance& instance, const SolveOptions& options,
                        const ElementSet& seed, std::size_t index, const NumericPolicy& policy) {
  SeedRecord rec;
  rec.seed = seed;
  const double threshold = leverage_threshold(instance.dim(), options.epsilon);
  const SeedResult sr = make_seed(instance.vectors, seed, threshold, policy);
  rec.long_set = sr.long_set;
  const MatroidMinor face(instance.matroid, sr.seed, sr.long_set);
  rec.feasible = face.feasible();
  if (!rec.feasible) return rec;

  RelaxationOptions relax = options.relaxation;
  if (options.solver_observer) {
    relax.observer = [&](const IterationInfo& info) { options.solver_observer(index, info); };
  }
  const RelaxationSolution sol = solve_cp(instance, face, options.objective, relax, policy);
  rec.cp_value = sol.value;
  rec.fw_gap = sol.fw_gap;
  rec.iterations = sol.iterations;
  rec.converged = sol.converged;

  RoundingOptions ropts;
  ropts.objective = options.objective;
  ropts.epsilon = options.epsilon;
  ropts.relaxation_value = sol.value;
  const bool partition = instance.matroid->kind() == MatroidKind::kPartition;
  const std::uint64_t seed_stream = Rng::derive(options.rng_seed, index);
  // An integral point always rounds to itself.
  const std::size_t trials =
      is_integral(sol.x_star, policy) ? 1 : std::max<std::size_t>(options.trials_per_seed, 1);
  bool have = false;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint64_t sub = Rng::derive(seed_stream, t);
    const RoundingOutcome out = partition
                                    ? round_partition(instance, sol.x_star, sub, ropts, policy)
                                    : round_pipage(instance, face, sol.x_star, sub, ropts, policy);
    if (!have || out.objective_value > rec.rounded_value) {
      have = true;
      rec.rounded_value = out.objective_value;
      rec.rounded_base = out.base;
      rec.success = out.success;
    }
  }
  return rec;
}

}  // namespace

std::size_t seed_size(const Instance& instance, const SolveOptions& options) {
  const std::size_t ell = options.ell_override ? *options.ell_override
                                               : theoretical_ell(instance.dim(), options.epsilon);
  return std::min(ell, instance.matroid->full_rank());
}

SolveReport enumerate_and_solve(const Instance& instance, const SolveOptions& options,
                                const NumericPolicy& policy) {
  if (!(options.epsilon > 0.0 && options.epsilon < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must lie in (0, 1)");
  }
  const Matroid& m = *instance.matroid;
  SolveReport report;
  report.instance_name = instance.name;
  report.provenance = instance.provenance;
  report.objective = options.objective.name();
  report.epsilon = options.epsilon;
  report.ell_theoretical = theoretical_ell(instance.dim(), options.epsilon);
  report.ell_used = seed_size(instance, options);
  report.trials_per_seed = options.trials_per_seed;
  report.rng_seed = options.rng_seed;

  const std::vector<ElementSet> seeds = enumerate_seeds(m, report.ell_used, options.max_seeds);
  std::vector<SeedRecord> records(seeds.size());

  const std::size_t workers = std::clamp<std::size_t>(options.threads, 1, seeds.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < seeds.size(); ++i)
      records[i] = process_seed(instance, options, seeds[i], i, policy);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < seeds.size(); i = next++) {
          try {
            records[i] = process_seed(instance, options, seeds[i], i, policy);
          } catch (...) {
            const std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = seeds.size();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  bool found = false;
  for (const SeedRecord& rec : records) {
    if (!rec.feasible) continue;
    report.all_converged = report.all_converged && rec.converged;
    if (!found || rec.rounded_value > report.best_value) {
      found = true;
      report.best_value = rec.rounded_value;
      report.best_base = rec.rounded_base;
      report.relaxation_value_at_best_seed = rec.cp_value;
    }
  }
  if (!found) throw Error(ErrorCode::kInfeasible, "no seed admits a feasible face");
  report.best_value = options.objective.value(instance.vectors.gram(report.best_base), policy);
  report.seeds_tried = seeds.size();
  report.per_seed = std::move(records);
  return report;
}

BruteForceResult brute_force_opt(const Instance& instance, const Objective& objective,
                                 const NumericPolicy& policy) {
  if (instance.size() > kMaxExhaustiveGround) {
    throw Error(ErrorCode::kTooLarge, "exhaustive search is limited to " +
                                          std::to_string(kMaxExhaustiveGround) + " elements");
  }
  BruteForceResult best;
  bool found = false;
  for_each_base(*instance.matroid, [&](const ElementSet& base) {
    ++best.bases_examined;
    const double v = objective.value(instance.vectors.gram(base), policy);
    if (!found || v > best.value) {
      found = true;
      best.value = v;
      best.base = base;
    }
    return true;
  });
  if (!found) throw Error(ErrorCode::kInfeasible, "matroid has no base");
  return best;
}

}  // namespace mineig
