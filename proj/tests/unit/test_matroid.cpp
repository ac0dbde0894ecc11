#include <gtest/gtest.h>

#include <algorithm>
#include <memory>

#include "mineig/error.hpp"
#include "mineig/fixtures.hpp"
#include "mineig/matroid.hpp"
#include "oracle.hpp"

using namespace mineig;

namespace {

std::shared_ptr<const Matroid> gap_matroid() {
  return std::make_shared<ExplicitMatroid>(4, std::vector<ElementSet>{{0, 1, 2}, {0, 1, 3}});
}

std::shared_ptr<const Matroid> triangle() {
  return std::make_shared<GraphicMatroid>(3, std::vector<GraphicMatroid::Edge>{{0, 1}, {1, 2}, {2, 0}});
}

// A sample of every family, n <= 10.
std::vector<std::shared_ptr<const Matroid>> zoo() {
  std::vector<std::shared_ptr<const Matroid>> out;
  out.push_back(std::make_shared<UniformMatroid>(6, 3));
  out.push_back(std::make_shared<UniformMatroid>(10, 4));
  out.push_back(std::make_shared<PartitionMatroid>(std::vector<ElementSet>{{0, 3}, {1, 2, 5}, {4}}));
  out.push_back(std::make_shared<PartitionMatroid>(
      std::vector<ElementSet>{{0, 1, 2}, {3, 4}, {5, 6, 7}, {8, 9}}));
  out.push_back(std::make_shared<GraphicMatroid>(
      4, std::vector<GraphicMatroid::Edge>{{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {1, 3}}));
  out.push_back(std::make_shared<GraphicMatroid>(
      5, std::vector<GraphicMatroid::Edge>{{0, 1}, {1, 2}, {2, 0}, {3, 4}, {3, 4}, {2, 2}, {0, 3}}));
  out.push_back(gap_matroid());
  // Explicit copy of a graphic matroid's bases.
  std::vector<ElementSet> bases;
  const GraphicMatroid g(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {0, 2}, {1, 3}});
  for_each_base(g, [&](const ElementSet& b) {
    bases.push_back(b);
    return true;
  });
  out.push_back(std::make_shared<ExplicitMatroid>(7, bases));
  return out;
}

ElementSet random_subset(oracle::Engine& rng, std::size_t n) {
  ElementSet s;
  for (std::size_t i = 0; i < n; ++i)
    if (rng() & 1U) s.push_back(i);
  return s;
}

ElementSet set_union(const ElementSet& a, const ElementSet& b) {
  ElementSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

ElementSet set_intersection(const ElementSet& a, const ElementSet& b) {
  ElementSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::kInternalInvariantViolation;
}

}  // namespace

TEST(Greedy, Examples) {
  EXPECT_EQ(greedy_max_weight_base(UniformMatroid(3, 2), std::vector<double>{3, 1, 2}), (ElementSet{0, 2}));
  EXPECT_EQ(greedy_max_weight_base(PartitionMatroid({{0, 1}, {2}}), std::vector<double>{0.2, 0.9, 0.4}),
            (ElementSet{1, 2}));
  EXPECT_EQ(greedy_max_weight_base(*gap_matroid(), std::vector<double>{0, 0, 1, 2}),
            (ElementSet{0, 1, 3}));
}

TEST(Greedy, TiesTakeLowerIndex) {
  EXPECT_EQ(greedy_max_weight_base(UniformMatroid(4, 2), std::vector<double>{1, 1, 1, 1}), (ElementSet{0, 1}));
}

TEST(Greedy, MatchesExhaustiveArgmax) {
  oracle::Engine rng(21);
  std::normal_distribution<double> normal;
  for (const auto& m : zoo()) {
    const auto bases = oracle::RankOracle(*m).bases();
    for (int trial = 0; trial < 100; ++trial) {
      Vector w(m->ground_size());
      for (double& x : w) x = normal(rng);
      const ElementSet got = greedy_max_weight_base(*m, w);
      double best = -1e300;
      for (const auto& b : bases) {
        double s = 0;
        for (auto e : b) s += w[e];
        best = std::max(best, s);
      }
      double s = 0;
      for (auto e : got) s += w[e];
      EXPECT_NEAR(s, best, 1e-12);
      EXPECT_TRUE(std::binary_search(bases.begin(), bases.end(), got));
    }
  }
}

TEST(Rank, MatchesDefinitionalOracle) {
  oracle::Engine rng(22);
  for (const auto& m : zoo()) {
    const oracle::RankOracle ref(*m);
    EXPECT_EQ(m->rank(ElementSet{}), 0U);
    for (int trial = 0; trial < 300; ++trial) {
      const ElementSet u = random_subset(rng, m->ground_size());
      EXPECT_EQ(m->rank(u), ref.rank(u));
      EXPECT_EQ(m->is_independent(u), ref.rank(u) == u.size());
    }
  }
}

TEST(Rank, MonotoneAndSubmodular) {
  oracle::Engine rng(23);
  for (const auto& m : zoo()) {
    for (int trial = 0; trial < 1000; ++trial) {
      const ElementSet u = random_subset(rng, m->ground_size());
      const ElementSet v = random_subset(rng, m->ground_size());
      const ElementSet cup = set_union(u, v);
      const ElementSet cap = set_intersection(u, v);
      EXPECT_GE(m->rank(u) + m->rank(v), m->rank(cup) + m->rank(cap));
      EXPECT_LE(m->rank(cap), m->rank(u));
      EXPECT_LE(m->rank(u), m->rank(cup));
    }
  }
}

TEST(Axioms, DownwardClosureAndExchange) {
  for (const auto& m : zoo()) {
    const std::size_t n = m->ground_size();
    std::vector<ElementSet> indep;
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
      ElementSet s;
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1U) s.push_back(i);
      if (m->is_independent(s)) indep.push_back(s);
    }
    for (const auto& s : indep) {
      for (std::size_t drop = 0; drop < s.size(); ++drop) {
        ElementSet t = s;
        t.erase(t.begin() + static_cast<std::ptrdiff_t>(drop));
        EXPECT_TRUE(m->is_independent(t));
      }
    }
    for (const auto& i : indep) {
      for (const auto& j : indep) {
        if (i.size() >= j.size()) continue;
        bool found = false;
        for (auto e : j) {
          if (std::binary_search(i.begin(), i.end(), e)) continue;
          ElementSet t = i;
          t.insert(std::upper_bound(t.begin(), t.end(), e), e);
          if (m->is_independent(t)) {
            found = true;
            break;
          }
        }
        EXPECT_TRUE(found);
      }
    }
  }
}

TEST(ExplicitMatroidTest, RejectsBrokenExchange) {
  EXPECT_EQ(code_of([] { ExplicitMatroid(4, {{0, 1}, {2, 3}}); }), ErrorCode::kInvalidMatroid);
  EXPECT_EQ(code_of([] { ExplicitMatroid(3, {{0, 1}, {2}}); }), ErrorCode::kInvalidMatroid);
  EXPECT_EQ(code_of([] { ExplicitMatroid(3, {}); }), ErrorCode::kInvalidMatroid);
  EXPECT_TRUE(ExplicitMatroid(4, {{0, 1, 2}, {0, 1, 3}}).exchange_verified());
}

TEST(PartitionMatroidTest, ValidatesParts) {
  EXPECT_THROW(PartitionMatroid({{0, 1}, {1, 2}}), Error);
  EXPECT_THROW(PartitionMatroid({{0}, {}}), Error);
  EXPECT_THROW(PartitionMatroid({{0}, {2}}), Error);
}

TEST(Polytope, Examples) {
  EXPECT_TRUE(polytope_member(*gap_matroid(), std::vector<double>{1, 1, 0.5, 0.5}));
  EXPECT_TRUE(polytope_member(*gap_matroid(), std::vector<double>{1, 1, 0, 1}));
  EXPECT_FALSE(polytope_member(UniformMatroid(2, 1), std::vector<double>{0.8, 0.8}));
  EXPECT_FALSE(polytope_member(*gap_matroid(), std::vector<double>{1, 0.5, 0.5, 1}));
  EXPECT_FALSE(polytope_member(UniformMatroid(3, 1), std::vector<double>{1.2, -0.2, 0}));
}

TEST(Polytope, IndicatorsExactlyForBases) {
  for (const auto& m : zoo()) {
    const oracle::RankOracle ref(*m);
    const std::size_t n = m->ground_size();
    const auto bases = ref.bases();
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
      ElementSet s;
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1U) s.push_back(i);
      const bool is_base = std::binary_search(bases.begin(), bases.end(), s);
      EXPECT_EQ(polytope_member(*m, indicator(n, s)), is_base);
    }
  }
}

TEST(Polytope, ConvexCombinationsBelong) {
  oracle::Engine rng(24);
  for (const auto& m : zoo()) {
    const auto bases = oracle::RankOracle(*m).bases();
    for (int trial = 0; trial < 30; ++trial) {
      const Vector x = oracle::random_polytope_point(rng, bases, m->ground_size(), 1 + trial % 4);
      EXPECT_TRUE(polytope_member(*m, x));
    }
  }
}

TEST(StepBounds, Examples) {
  const PartitionMatroid p({{0, 1}});
  auto b = pipage_step_bounds(p, std::vector<double>{0.5, 0.5}, 0, 1);
  EXPECT_NEAR(b.down, 0.5, 1e-15);
  EXPECT_NEAR(b.up, 0.5, 1e-15);

  b = pipage_step_bounds(UniformMatroid(3, 1), std::vector<double>{0.2, 0.3, 0.5}, 0, 2);
  EXPECT_NEAR(b.down, 0.2, 1e-15);
  EXPECT_NEAR(b.up, 0.5, 1e-15);

  // Triangle: moving along e1 - e2 saturates x1 (or x2) at 1 after 1/3.
  b = pipage_step_bounds(*triangle(), std::vector<double>{2.0 / 3, 2.0 / 3, 2.0 / 3}, 0, 1);
  EXPECT_NEAR(b.down, 1.0 / 3, 1e-12);
  EXPECT_NEAR(b.up, 1.0 / 3, 1e-12);
}

TEST(StepBounds, TriangleAgreesWithExhaustiveTightSetScan) {
  // Independent scan: largest y with sum_{U} x(y) <= r(U) for all 2^3 sets.
  const auto m = triangle();
  const oracle::RankOracle ref(*m);
  const Vector x{2.0 / 3, 2.0 / 3, 2.0 / 3};
  double up = 1e300;
  for (std::uint64_t mask = 1; mask < 8; ++mask) {
    ElementSet u;
    for (std::size_t i = 0; i < 3; ++i)
      if (mask >> i & 1U) u.push_back(i);
    const bool has_a = mask & 1U;
    const bool has_b = mask & 2U;
    if (has_a == has_b) continue;
    double s = 0;
    for (auto e : u) s += x[e];
    const double slack = static_cast<double>(ref.rank(u)) - s;
    if (has_a) up = std::min(up, slack);
  }
  up = std::min({up, 1 - x[0], x[1]});
  EXPECT_NEAR(pipage_step_bounds(*m, x, 0, 1).up, up, 1e-12);
}

TEST(StepBounds, NothingToRound) {
  EXPECT_EQ(code_of([] { pipage_step_bounds(UniformMatroid(3, 2), std::vector<double>{1, 0.5, 0.5}, 0, 1); }),
            ErrorCode::kNothingToRound);
}

TEST(StepBounds, EndpointsAreMembersAndTight) {
  oracle::Engine rng(25);
  for (const auto& m : zoo()) {
    const auto bases = oracle::RankOracle(*m).bases();
    const std::size_t n = m->ground_size();
    for (int trial = 0; trial < 40; ++trial) {
      const Vector x = oracle::random_polytope_point(rng, bases, n, 2 + trial % 3);
      const auto pair = find_fractional_pair(*m, x);
      if (!pair) continue;
      const auto [a, b] = *pair;
      const auto bounds = pipage_step_bounds(*m, x, a, b);
      EXPECT_GT(bounds.down + bounds.up, 0.0);
      Vector lo = x;
      Vector hi = x;
      lo[a] -= bounds.down;
      lo[b] += bounds.down;
      hi[a] += bounds.up;
      hi[b] -= bounds.up;
      EXPECT_TRUE(polytope_member(*m, lo));
      EXPECT_TRUE(polytope_member(*m, hi));
      // Slightly beyond an endpoint leaves the polytope.
      Vector past = hi;
      past[a] += 1e-6;
      past[b] -= 1e-6;
      EXPECT_FALSE(polytope_member(*m, past));
    }
  }
}

TEST(FractionalPair, Examples) {
  const UniformMatroid u(3, 2);
  EXPECT_FALSE(find_fractional_pair(u, std::vector<double>{1, 0, 1}).has_value());
  const PartitionMatroid p({{0, 1}, {2}});
  EXPECT_EQ(find_fractional_pair(p, std::vector<double>{0.3, 0.7, 1}), (std::pair<Element, Element>{0, 1}));
  EXPECT_EQ(find_fractional_pair(u, std::vector<double>{0.5, 0.5, 1.0}), (std::pair<Element, Element>{0, 1}));
  // x +- 0.1 (e1 - e2) both stay in the polytope.
  EXPECT_TRUE(polytope_member(u, std::vector<double>{0.6, 0.4, 1.0}));
  EXPECT_TRUE(polytope_member(u, std::vector<double>{0.4, 0.6, 1.0}));
}

TEST(Minor, Examples) {
  const auto u = std::make_shared<UniformMatroid>(4, 2);
  const MatroidMinor same(u, {}, {});
  EXPECT_EQ(same.kept(), (ElementSet{0, 1, 2, 3}));
  EXPECT_EQ(same.reduced().full_rank(), 2U);

  const MatroidMinor a(gap_matroid(), {0, 1}, {});
  ASSERT_TRUE(a.feasible());
  std::vector<ElementSet> lifted;
  for_each_base(a.reduced(), [&](const ElementSet& b) {
    lifted.push_back(a.lift(b));
    return true;
  });
  EXPECT_EQ(lifted, (std::vector<ElementSet>{{0, 1, 2}, {0, 1, 3}}));

  const MatroidMinor c(u, {0}, {1});
  EXPECT_EQ(c.kept(), (ElementSet{2, 3}));
  EXPECT_EQ(c.reduced().kind(), MatroidKind::kUniform);
  EXPECT_EQ(c.reduced().full_rank(), 1U);
  EXPECT_EQ(c.reduced().ground_size(), 2U);
}

TEST(Minor, DependentContraction) {
  EXPECT_EQ(code_of([] { MatroidMinor(std::make_shared<UniformMatroid>(4, 1), {0, 1}, {}); }),
            ErrorCode::kDependentContraction);
  EXPECT_EQ(code_of([] { MatroidMinor(std::make_shared<UniformMatroid>(4, 2), {0}, {0}); }),
            ErrorCode::kInvalidArgument);
}

TEST(Minor, InfeasibleWhenDeletionKillsAllBases) {
  const MatroidMinor m(gap_matroid(), {}, {0});
  EXPECT_FALSE(m.feasible());
}

TEST(Minor, BasesMatchFaceAndRankIdentity) {
  oracle::Engine rng(26);
  for (const auto& m : zoo()) {
    const oracle::RankOracle ref(*m);
    const std::size_t n = m->ground_size();
    for (int trial = 0; trial < 40; ++trial) {
      ElementSet s = random_subset(rng, n);
      while (!m->is_independent(s)) s.pop_back();
      ElementSet l;
      for (std::size_t i = 0; i < n; ++i)
        if (!std::binary_search(s.begin(), s.end(), i) && rng() % 4 == 0) l.push_back(i);
      const MatroidMinor minor(m, s, l);
      const auto want = oracle::face_bases(ref, s, l);
      EXPECT_EQ(minor.feasible(), !want.empty());
      if (!minor.feasible()) continue;
      std::vector<ElementSet> got;
      for_each_base(minor.reduced(), [&](const ElementSet& b) {
        got.push_back(minor.lift(b));
        return true;
      });
      std::sort(got.begin(), got.end());
      EXPECT_EQ(got, want);
      for (int q = 0; q < 20; ++q) {
        ElementSet u;
        for (std::size_t i = 0; i < n; ++i) {
          const bool used = std::binary_search(s.begin(), s.end(), i) || std::binary_search(l.begin(), l.end(), i);
          if (!used && rng() & 1U) u.push_back(i);
        }
        EXPECT_EQ(minor.rank(u), ref.rank(set_union(u, s)) - s.size());
      }
    }
  }
}

TEST(Enumeration, TooLarge) {
  EXPECT_EQ(code_of([] { for_each_base(UniformMatroid(40, 20), [](const ElementSet&) { return true; }, 1000); }),
            ErrorCode::kTooLarge);
  std::size_t count = 0;
  for_each_base(UniformMatroid(6, 3), [&](const ElementSet&) { return ++count < 5; });
  EXPECT_EQ(count, 5U);
  EXPECT_EQ(binomial(10, 3), 120U);
}
