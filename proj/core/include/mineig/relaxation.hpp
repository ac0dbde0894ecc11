#pragma once

// CP(S): maximise f(sum_i x_i v_i v_i^T) over the face of the base polytope
// with x = 1 on the seed and x = 0 on its long set. Both solvers use the
// greedy linear oracle: away-step Frank-Wolfe for the smooth objectives, and
// fully corrective Frank-Wolfe (Newton on the active vertices) for the
// barrier-smoothed lambda-min.

#include <cstddef>
#include <functional>

#include "mineig/instance.hpp"
#include "mineig/local_search.hpp"
#include "mineig/matroid.hpp"
#include "mineig/objective.hpp"

namespace mineig {

struct RelaxationSolution {
  Vector x_star;        // full ground-set coordinates
  SymMatrix X_star{1};  // sum_i x*_i v_i v_i^T
  double value = 0.0;   // f(X*), unsmoothed
  // Frank-Wolfe gap of the optimised function at x*, i.e. the largest
  // <G, X_B - X*> over face bases B with G = objective.surrogate(X*, beta).gradient.
  double fw_gap = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double beta = 0.0;  // final smoothing strength 1/mu; 0 when f is used directly
};

struct IterationInfo {
  std::size_t iteration;
  double beta;
  double surrogate_value;
  double gap;
  double step;
  bool away_step;
};

struct RelaxationOptions {
  double tolerance = kDefaultPolicy.relaxation_tolerance;
  std::size_t max_iterations = static_cast<std::size_t>(kDefaultPolicy.relaxation_max_iterations);
  std::function<void(const IterationInfo&)> observer;
};

// Throws DependentContraction if the seed is dependent.
MatroidMinor face_matroid(const Instance& instance, const SeedResult& seed);

// Smoothing strengths used for lambda-min at the given tolerance.
std::vector<double> smoothing_schedule(std::size_t d, double tolerance,
                                       const NumericPolicy& policy = kDefaultPolicy);

// Throws InfeasibleFace when no base contains the seed and avoids its long
// set. Hitting max_iterations returns the current iterate with
// converged == false.
RelaxationSolution solve_cp(const Instance& instance, const SeedResult& seed,
                            const Objective& objective, const RelaxationOptions& options = {},
                            const NumericPolicy& policy = kDefaultPolicy);

// Same, on a precomputed face.
RelaxationSolution solve_cp(const Instance& instance, const MatroidMinor& face,
                            const Objective& objective, const RelaxationOptions& options = {},
                            const NumericPolicy& policy = kDefaultPolicy);

// Base of `m` built greedily by volume: each step adds the element that most
// enlarges range(base_matrix + chosen), then the one with largest leverage.
ElementSet max_volume_base(const Matroid& m, const std::vector<Vector>& vectors,
                           const SymMatrix& base_matrix,
                           const NumericPolicy& policy = kDefaultPolicy);

}  // namespace mineig
