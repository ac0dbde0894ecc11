#include "mineig/local_search.hpp"

#include <algorithm>
#include <cmath>

#include "mineig/error.hpp"

namespace mineig {
namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must lie in (0, 1)");
  }
}

double log_det(const SymMatrix& a, const NumericPolicy& policy) {
  double s = 0.0;
  for (double v : eigen_decompose(a, policy).values) s += std::log(std::max(v, 1e-300));
  return s;
}

// Volume greedy: grow by largest residual until spanning, then by largest
// leverage (each step maximises the determinant of the grown set).
ElementSet volume_greedy(const Vectorset& vectors, const ElementSet& candidates,
                         std::size_t ell, const NumericPolicy& policy) {
  const std::size_t d = vectors.dim();
  ElementSet chosen;
  std::vector<char> taken(candidates.size(), 0);
  std::vector<Vector> basis;
  while (basis.size() < d && chosen.size() < ell) {
    double best = -1.0;
    std::size_t pick = 0;
    Vector best_residual;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (taken[c]) continue;
      Vector r(vectors[candidates[c]].begin(), vectors[candidates[c]].end());
      for (const Vector& q : basis) {
        const double proj = dot(q, r);
        for (std::size_t k = 0; k < d; ++k) r[k] -= proj * q[k];
      }
      const double score = dot(r, r);
      if (score > best) {
        best = score;
        pick = c;
        best_residual = std::move(r);
      }
    }
    const double len = std::sqrt(best);
    if (!(len > 0.0)) break;
    for (double& v : best_residual) v /= len;
    basis.push_back(std::move(best_residual));
    taken[pick] = 1;
    chosen.push_back(candidates[pick]);
  }
  while (chosen.size() < ell) {
    const PseudoInverse inv(vectors.gram(chosen), policy);
    double best = -1.0;
    std::size_t pick = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (taken[c]) continue;
      const double score = inv.bilinear(vectors[candidates[c]], vectors[candidates[c]]);
      if (score > best) {
        best = score;
        pick = c;
      }
    }
    taken[pick] = 1;
    chosen.push_back(candidates[pick]);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace

std::size_t theoretical_ell(std::size_t d, double epsilon) {
  check_epsilon(epsilon);
  const double e2 = epsilon * epsilon;
  if (d <= 1) return static_cast<std::size_t>(std::ceil(10.0 / e2));
  const double dd = static_cast<double>(d);
  return static_cast<std::size_t>(std::ceil(10.0 * dd * std::log(dd) / e2)) + d - 1;
}

double leverage_threshold(std::size_t d, double epsilon) {
  check_epsilon(epsilon);
  const double e2 = epsilon * epsilon;
  if (d <= 1) return e2 / 10.0;
  return e2 / (10.0 * std::log(static_cast<double>(d)));
}

SeedSearchConfig SeedSearchConfig::for_dimension(std::size_t d, double epsilon) {
  return {epsilon, theoretical_ell(d, epsilon), mineig::leverage_threshold(d, epsilon), 0};
}

std::string_view to_string(SeedStatus status) {
  switch (status) {
    case SeedStatus::kLocallyOptimal: return "locally_optimal";
    case SeedStatus::kSwapBudgetExceeded: return "swap_budget_exceeded";
    case SeedStatus::kGivenSet: return "given_set";
  }
  return "unknown";
}

SeedResult local_search_seed(const Vectorset& vectors, const ElementSet& candidates_in,
                             const SeedSearchConfig& cfg, const NumericPolicy& policy) {
  const std::size_t d = vectors.dim();
  if (cfg.ell < d) throw Error(ErrorCode::kInvalidArgument, "seed size ell must be at least d");
  if (!(cfg.leverage_threshold > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "leverage threshold must be positive");
  }
  ElementSet candidates = candidates_in;
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  if (!candidates.empty() && candidates.back() >= vectors.size()) {
    throw Error(ErrorCode::kInvalidArgument, "candidate index out of range");
  }
  if (candidates.empty() || PseudoInverse(vectors.gram(candidates), policy).rank() < d) {
    throw Error(ErrorCode::kRankDeficient, "candidate vectors do not span the space");
  }

  SeedResult result;
  result.status = SeedStatus::kLocallyOptimal;
  const std::size_t max_swaps =
      cfg.max_swaps > 0 ? cfg.max_swaps : 10 * candidates.size() * cfg.ell;

  ElementSet seed = candidates.size() <= cfg.ell
                        ? candidates
                        : volume_greedy(vectors, candidates, cfg.ell, policy);
  SymMatrix a = vectors.gram(seed);
  result.log_det_trace.push_back(log_det(a, policy));

  if (seed.size() < candidates.size()) {
    SymMatrix a_inv = matrix_inverse(a, policy);
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t pos = 0; pos < seed.size() && !improved; ++pos) {
        const auto v_out = vectors[seed[pos]];
        const double out_lev = a_inv.bilinear(v_out, v_out);
        for (Element j : candidates) {
          if (std::binary_search(seed.begin(), seed.end(), j)) continue;
          const auto v_in = vectors[j];
          const double in_lev = a_inv.bilinear(v_in, v_in);
          const double cross = a_inv.bilinear(v_out, v_in);
          const double gain = (1.0 - out_lev) * (1.0 + in_lev) + cross * cross;
          if (gain > 1.0 + policy.swap_acceptance) {
            if (result.swap_count >= max_swaps) {
              result.status = SeedStatus::kSwapBudgetExceeded;
              break;
            }
            seed.erase(seed.begin() + static_cast<std::ptrdiff_t>(pos));
            seed.insert(std::upper_bound(seed.begin(), seed.end(), j), j);
            a = vectors.gram(seed);
            a_inv = matrix_inverse(a, policy);
            ++result.swap_count;
            result.log_det_trace.push_back(log_det(a, policy));
            improved = true;
            break;
          }
        }
        if (result.status == SeedStatus::kSwapBudgetExceeded) break;
      }
      if (result.status == SeedStatus::kSwapBudgetExceeded) break;
    }
  }

  const PseudoInverse inv(a, policy);
  double max_lev = 0.0;
  bool all_short = inv.invertible();
  for (Element j : candidates) {
    if (std::binary_search(seed.begin(), seed.end(), j)) continue;
    const double lev = inv.invertible() ? inv.leverage(vectors[j]) : inv.bilinear(vectors[j], vectors[j]);
    max_lev = std::max(max_lev, lev);
    if (lev > cfg.leverage_threshold) all_short = false;
  }
  result.max_candidate_leverage = max_lev;
  result.certified = result.status == SeedStatus::kLocallyOptimal && all_short;
  result.long_set = classify_long(vectors, a, cfg.leverage_threshold, seed, true, policy);
  result.seed = std::move(seed);
  result.a_s = std::move(a);
  return result;
}

ElementSet classify_long(const Vectorset& vectors, const SymMatrix& a_s, double threshold,
                         const ElementSet& seed, bool allow_singular,
                         const NumericPolicy& policy) {
  const PseudoInverse inv(a_s, policy);
  if (!inv.invertible() && !allow_singular) {
    throw Error(ErrorCode::kSingularMatrix, "A_S is singular; long-vector classification needs it invertible");
  }
  ElementSet out;
  for (Element i = 0; i < vectors.size(); ++i) {
    if (std::binary_search(seed.begin(), seed.end(), i)) continue;
    if (!inv.in_range(vectors[i]) || inv.bilinear(vectors[i], vectors[i]) > threshold) {
      out.push_back(i);
    }
  }
  return out;
}

SeedResult make_seed(const Vectorset& vectors, const ElementSet& seed_in, double threshold,
                     const NumericPolicy& policy) {
  ElementSet seed = seed_in;
  std::sort(seed.begin(), seed.end());
  seed.erase(std::unique(seed.begin(), seed.end()), seed.end());
  if (!seed.empty() && seed.back() >= vectors.size()) {
    throw Error(ErrorCode::kInvalidArgument, "seed index out of range");
  }
  SeedResult result;
  result.a_s = vectors.gram(seed);
  result.long_set = seed.empty() ? ElementSet{}
                                 : classify_long(vectors, result.a_s, threshold, seed, true, policy);
  result.status = SeedStatus::kGivenSet;
  result.seed = std::move(seed);
  return result;
}

}  // namespace mineig
