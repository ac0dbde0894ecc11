#pragma once

// Determinant-maximising single-swap local search for seed sets, and the
// long-vector classifier.

#include <cstddef>
#include <string_view>
#include <vector>

#include "mineig/matroid.hpp"
#include "mineig/numeric_policy.hpp"
#include "mineig/spectral.hpp"

namespace mineig {

// ceil(10 d log d / eps^2) + d - 1 for d >= 2, ceil(10 / eps^2) for d = 1.
std::size_t theoretical_ell(std::size_t d, double epsilon);
// eps^2 / (10 log d) for d >= 2, eps^2 / 10 for d = 1.
double leverage_threshold(std::size_t d, double epsilon);

struct SeedSearchConfig {
  double epsilon = 0.5;
  std::size_t ell = 1;
  double leverage_threshold = 0.0;
  // 0 selects the default 10 * |T| * ell.
  std::size_t max_swaps = 0;

  // Defaults derived from the dimension and epsilon.
  static SeedSearchConfig for_dimension(std::size_t d, double epsilon);
};

enum class SeedStatus {
  kLocallyOptimal,      // no improving swap remains
  kSwapBudgetExceeded,  // stopped at max_swaps; best set so far returned
  kGivenSet,            // seed supplied directly, no search performed
};
std::string_view to_string(SeedStatus status);

struct SeedResult {
  ElementSet seed;
  SymMatrix a_s{1};
  // Ground-set elements outside the seed whose leverage exceeds the
  // threshold (or that leave range(A_S)).
  ElementSet long_set;
  std::size_t swap_count = 0;
  bool certified = false;
  SeedStatus status = SeedStatus::kGivenSet;
  // Largest leverage over candidates outside the seed (0 if none).
  double max_candidate_leverage = 0.0;
  // log det(A_S) after initialisation and after every accepted swap.
  std::vector<double> log_det_trace;
};

// Local search over subsets of `candidates` of size min(ell, |T|).
// Throws RankDeficient if the candidates do not span R^d. `certified` means
// locally optimal with every candidate outside the seed at or below the
// leverage threshold.
SeedResult local_search_seed(const Vectorset& vectors, const ElementSet& candidates,
                             const SeedSearchConfig& cfg,
                             const NumericPolicy& policy = kDefaultPolicy);

// Elements outside `seed` with leverage strictly above `threshold` w.r.t.
// A_S. With allow_singular, A_S may be singular and elements outside its
// range count as long; otherwise a singular A_S throws SingularMatrix.
ElementSet classify_long(const Vectorset& vectors, const SymMatrix& a_s, double threshold,
                         const ElementSet& seed = {}, bool allow_singular = false,
                         const NumericPolicy& policy = kDefaultPolicy);

// SeedResult for a seed supplied directly (no search), with L(S) computed
// under pseudo-inverse semantics.
SeedResult make_seed(const Vectorset& vectors, const ElementSet& seed, double threshold,
                     const NumericPolicy& policy = kDefaultPolicy);

}  // namespace mineig
