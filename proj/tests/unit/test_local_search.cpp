#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mineig/error.hpp"
#include "mineig/local_search.hpp"
#include "oracle.hpp"

using namespace mineig;

namespace {

ElementSet all_of(std::size_t n) {
  ElementSet t(n);
  std::iota(t.begin(), t.end(), std::size_t{0});
  return t;
}

// Largest det over all size-k subsets of the candidates.
double exhaustive_max_det(const std::vector<Vector>& vs, std::size_t k) {
  const std::size_t n = vs.size();
  double best = 0;
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) != k) continue;
    ElementSet s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1U) s.push_back(i);
    best = std::max(best, oracle::determinant(oracle::gram(vs, s)));
  }
  return best;
}

}  // namespace

TEST(Parameters, EllAndThreshold) {
  // ceil(10 * 2 * log 2 / 0.81) + 1 = ceil(17.11...) + 1
  EXPECT_EQ(theoretical_ell(2, 0.9), 19U);
  EXPECT_EQ(theoretical_ell(3, 0.9), 43U);
  EXPECT_EQ(theoretical_ell(1, 0.5), 40U);
  EXPECT_NEAR(leverage_threshold(2, 0.1), 0.01 / (10 * std::log(2.0)), 1e-15);
  EXPECT_NEAR(leverage_threshold(1, 0.5), 0.025, 1e-15);
  const auto cfg = SeedSearchConfig::for_dimension(3, 0.5);
  EXPECT_GE(cfg.ell, 3U);
  EXPECT_GT(cfg.leverage_threshold, 0.0);
}

TEST(LocalSearch, Examples) {
  const Vectorset vs({{10, 0}, {1, 0}, {0, 1}});
  SeedSearchConfig cfg{0.5, 2, 0.5, 0};
  const auto r = local_search_seed(vs, {0, 1, 2}, cfg);
  EXPECT_EQ(r.seed, (ElementSet{0, 2}));
  EXPECT_NEAR(leverage_score(r.a_s, vs[1]), 0.01, 1e-14);
  EXPECT_EQ(r.status, SeedStatus::kLocallyOptimal);
  EXPECT_TRUE(r.certified);
  EXPECT_TRUE(r.long_set.empty());

  const Vectorset scalar({{3}, {1}});
  const auto s = local_search_seed(scalar, {0, 1}, SeedSearchConfig{0.5, 1, 0.5, 0});
  EXPECT_EQ(s.seed, (ElementSet{0}));
  EXPECT_NEAR(s.max_candidate_leverage, 1.0 / 9, 1e-15);
}

TEST(LocalSearch, WholeCandidateSetWhenSmall) {
  const Vectorset vs({{1, 0}, {0, 1}, {5, 5}, {0.01, 0}});
  const auto r = local_search_seed(vs, {0, 1}, SeedSearchConfig{0.5, 2, 0.1, 0});
  EXPECT_EQ(r.seed, (ElementSet{0, 1}));
  EXPECT_EQ(r.swap_count, 0U);
  // (5,5) has leverage 50, (0.01,0) only 1e-4.
  EXPECT_EQ(r.long_set, (ElementSet{2}));
}

TEST(LocalSearch, RankDeficientCandidates) {
  const Vectorset vs({{1, 0}, {2, 0}, {0, 1}});
  try {
    local_search_seed(vs, {0, 1}, SeedSearchConfig{0.5, 2, 0.1, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRankDeficient);
  }
}

TEST(LocalSearch, SwapBudget) {
  oracle::Engine rng(41);
  const Vectorset vs(oracle::gaussian_vectors(rng, 14, 3));
  const auto r = local_search_seed(vs, all_of(14), SeedSearchConfig{0.5, 4, 0.1, 1});
  if (r.swap_count >= 1 && r.status == SeedStatus::kSwapBudgetExceeded) {
    EXPECT_FALSE(r.certified);
    EXPECT_EQ(r.swap_count, 1U);
  }
  const auto full = local_search_seed(vs, all_of(14), SeedSearchConfig{0.5, 4, 0.1, 0});
  EXPECT_EQ(full.status, SeedStatus::kLocallyOptimal);
}

TEST(LocalSearch, PostConditions) {
  oracle::Engine rng(42);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t d = 2 + trial % 2;
    const std::size_t ell = d + trial % 3;
    const std::size_t n = ell + 1 + trial % 6;
    const auto raw = oracle::gaussian_vectors(rng, n, d);
    const Vectorset vs(raw);
    const auto t = all_of(n);
    const auto r = local_search_seed(vs, t, SeedSearchConfig{0.5, ell, 1.0, 0});
    ASSERT_EQ(r.seed.size(), ell);
    ASSERT_EQ(r.status, SeedStatus::kLocallyOptimal);
    // det strictly increases along accepted swaps.
    for (std::size_t k = 1; k < r.log_det_trace.size(); ++k)
      EXPECT_GT(r.log_det_trace[k], r.log_det_trace[k - 1] + std::log1p(1e-9) * 0.5);
    EXPECT_EQ(r.log_det_trace.size(), r.swap_count + 1);
    // Exhaustive swap check with Eigen determinants.
    const Eigen::MatrixXd a = oracle::gram(raw, r.seed);
    const double det_a = oracle::determinant(a);
    for (auto i : r.seed) {
      for (auto j : t) {
        if (std::binary_search(r.seed.begin(), r.seed.end(), j)) continue;
        const Eigen::VectorXd vi = oracle::dense(raw[i]);
        const Eigen::VectorXd vj = oracle::dense(raw[j]);
        const double swapped = oracle::determinant(a - vi * vi.transpose() + vj * vj.transpose());
        EXPECT_LE(swapped / det_a, 1 + 1e-8);
      }
    }
    // Leverage bound from local optimality.
    for (auto j : t) {
      if (std::binary_search(r.seed.begin(), r.seed.end(), j)) continue;
      EXPECT_LE(oracle::pinv_quadratic(a, oracle::dense(raw[j])),
                static_cast<double>(d) / static_cast<double>(ell - d + 1) + 1e-9);
    }
    // Global optimum bound: local optimum is never better than the best subset.
    EXPECT_LE(det_a, exhaustive_max_det(raw, ell) * (1 + 1e-9));
  }
}

TEST(LocalSearch, PermutationInvariantDeterminant) {
  oracle::Engine rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 2 + trial % 2;
    const std::size_t n = 8;
    auto raw = oracle::gaussian_vectors(rng, n, d);
    const auto r1 = local_search_seed(Vectorset(raw), all_of(n), SeedSearchConfig{0.5, d + 1, 1.0, 0});
    std::shuffle(raw.begin(), raw.end(), rng);
    const auto r2 = local_search_seed(Vectorset(raw), all_of(n), SeedSearchConfig{0.5, d + 1, 1.0, 0});
    // Local optima may differ; both must be within the global bracket, and
    // for these sizes they typically coincide.
    const double best = exhaustive_max_det(raw, d + 1);
    EXPECT_LE(determinant(r1.a_s), best * (1 + 1e-9));
    EXPECT_LE(determinant(r2.a_s), best * (1 + 1e-9));
  }
}

TEST(ClassifyLong, Examples) {
  const Vectorset vs({{0.1, 0}, {2, 0}});
  EXPECT_EQ(classify_long(vs, SymMatrix::identity(2), 0.5), (ElementSet{1}));
  EXPECT_TRUE(classify_long(vs, SymMatrix::identity(2), 4.0).empty());  // strict
  EXPECT_EQ(classify_long(vs, SymMatrix::identity(2), 3.999), (ElementSet{1}));
  // Seed elements are never long.
  EXPECT_TRUE(classify_long(vs, SymMatrix::identity(2), 0.5, {1}).empty());
}

TEST(ClassifyLong, SingularSeedMatrix) {
  // e1, e1, e2, e3 with S = {1, 2}: A_S = 2 e1 e1^T is singular.
  const Vectorset vs({{1, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  const SymMatrix a = vs.gram(std::vector<std::size_t>{0, 1});
  EXPECT_EQ(oracle::dense(a).fullPivLu().rank(), 1);
  try {
    classify_long(vs, a, 0.1, {0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularMatrix);
  }
  EXPECT_EQ(classify_long(vs, a, 0.1, {0, 1}, true), (ElementSet{2, 3}));
  const auto seed = make_seed(vs, {0, 1}, 0.1);
  EXPECT_EQ(seed.long_set, (ElementSet{2, 3}));
  EXPECT_EQ(seed.status, SeedStatus::kGivenSet);
}

TEST(ClassifyLong, MatchesOracleLeverages) {
  oracle::Engine rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 2 + trial % 3;
    const auto raw = oracle::gaussian_vectors(rng, 10, d);
    const Vectorset vs(raw);
    const ElementSet seed{0, 1, 2, 3};
    const Eigen::MatrixXd a = oracle::gram(raw, seed);
    const double thr = 0.5;
    ElementSet want;
    for (std::size_t j = 4; j < 10; ++j)
      if (oracle::pinv_quadratic(a, oracle::dense(raw[j])) > thr) want.push_back(j);
    EXPECT_EQ(classify_long(vs, oracle::from_dense(a), thr, seed), want);
  }
}
