#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "mineig/error.hpp"
#include "mineig/fixtures.hpp"
#include "mineig/relaxation.hpp"
#include "oracle.hpp"

using namespace mineig;

namespace {

Instance three_vectors() {
  const double r = 1 / std::sqrt(2.0);
  return make_instance(Vectorset({{1, 0}, {0, 1}, {r, r}}), std::make_shared<UniformMatroid>(3, 2));
}

Instance random_instance(oracle::Engine& rng, std::size_t d, std::size_t n, int kind) {
  std::shared_ptr<const Matroid> m;
  if (kind == 0) {
    m = std::make_shared<UniformMatroid>(n, d + 1);
  } else if (kind == 1) {
    std::vector<ElementSet> parts(d + 1);
    for (std::size_t i = 0; i < n; ++i) parts[i % parts.size()].push_back(i);
    m = std::make_shared<PartitionMatroid>(parts);
  } else {
    // Graphic: a cycle on d + 2 nodes plus chords.
    std::vector<GraphicMatroid::Edge> edges;
    const std::size_t nodes = d + 2;
    for (std::size_t i = 0; i < n; ++i) edges.emplace_back(i % nodes, (i + 1 + i / nodes) % nodes);
    m = std::make_shared<GraphicMatroid>(nodes, edges);
  }
  return make_instance(Vectorset(oracle::gaussian_vectors(rng, n, d)), m);
}

double exhaustive_face_max(const Instance& inst, const MatroidMinor& face, double (*f)(const Eigen::MatrixXd&)) {
  const oracle::RankOracle ref(face.base());
  const auto bases = oracle::face_bases(ref, face.contracted(), face.deleted());
  return oracle::brute(inst.vectors.vectors(), bases, f).value;
}

// Independent Frank-Wolfe gap: exhaustive max of <G, X_B - X*> over face bases.
double exhaustive_gap(const Instance& inst, const MatroidMinor& face, const SymMatrix& g,
                      std::span<const double> x) {
  const oracle::RankOracle ref(face.base());
  const auto bases = oracle::face_bases(ref, face.contracted(), face.deleted());
  const Eigen::MatrixXd gd = oracle::dense(g);
  const Eigen::MatrixXd xs = oracle::weighted_gram(inst.vectors.vectors(), x);
  double best = -1e300;
  for (const auto& b : bases) {
    const Eigen::MatrixXd xb = oracle::gram(inst.vectors.vectors(), b);
    best = std::max(best, (gd.array() * (xb - xs).array()).sum());
  }
  return best;
}

}  // namespace

TEST(Relaxation, IntegralityGapInstance) {
  const Instance inst = appendix_a_instance();
  const auto seed = make_seed(inst.vectors, {}, 0.1);
  const auto sol = solve_cp(inst, seed, Objective::lambda_min());
  EXPECT_TRUE(sol.converged);
  EXPECT_NEAR(sol.value, 0.5, 1e-6);
  EXPECT_NEAR(sol.x_star[0], 1.0, 1e-6);
  EXPECT_NEAR(sol.x_star[1], 1.0, 1e-6);
  EXPECT_NEAR(sol.x_star[2], 0.5, 1e-3);
  EXPECT_NEAR(sol.x_star[3], 0.5, 1e-3);
}

TEST(Relaxation, ThreeVectorExample) {
  const Instance inst = three_vectors();
  const auto sol = solve_cp(inst, make_seed(inst.vectors, {}, 0.1), Objective::lambda_min());
  EXPECT_TRUE(sol.converged);
  EXPECT_NEAR(sol.value, 1.0, 1e-6);
  EXPECT_NEAR(sol.x_star[0], 1.0, 1e-5);
  EXPECT_NEAR(sol.x_star[1], 1.0, 1e-5);
  EXPECT_NEAR(sol.x_star[2], 0.0, 1e-5);
  EXPECT_GT(sol.beta, 0.0);
}

TEST(Relaxation, SingleBaseFace) {
  const Instance inst = appendix_a_instance();
  // Contract {1,2,3}: the face is the single base.
  const MatroidMinor face(inst.matroid, {0, 1, 2}, {});
  const auto sol = solve_cp(inst, face, Objective::det_root());
  EXPECT_EQ(sol.x_star, (Vector{1, 1, 1, 0}));
  EXPECT_EQ(sol.value, 0.0);
  const MatroidMinor face2(inst.matroid, {}, {2});
  const auto sol2 = solve_cp(inst, face2, Objective::lambda_min());
  EXPECT_EQ(sol2.x_star, (Vector{1, 1, 0, 1}));
}

TEST(Relaxation, FaceMatroidExamples) {
  const Instance inst = appendix_a_instance();
  const auto f0 = face_matroid(inst, make_seed(inst.vectors, {}, 0.1));
  EXPECT_EQ(f0.kept(), (ElementSet{0, 1, 2, 3}));
  SeedResult s;
  s.seed = {0, 1};
  const auto f1 = face_matroid(inst, s);
  EXPECT_EQ(f1.kept(), (ElementSet{2, 3}));
  EXPECT_EQ(f1.reduced().full_rank(), 1U);

  const Instance u = make_instance(Vectorset({{1}, {1}, {1}, {1}}), std::make_shared<UniformMatroid>(4, 2));
  SeedResult t;
  t.seed = {0};
  t.long_set = {1};
  const auto f2 = face_matroid(u, t);
  EXPECT_EQ(f2.kept(), (ElementSet{2, 3}));
  EXPECT_EQ(f2.reduced().kind(), MatroidKind::kUniform);
  EXPECT_EQ(f2.reduced().full_rank(), 1U);

  SeedResult bad;
  bad.seed = {0, 1, 2};
  try {
    face_matroid(make_instance(Vectorset({{1}, {1}, {1}, {1}}), std::make_shared<UniformMatroid>(4, 2)), bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDependentContraction);
  }
}

TEST(Relaxation, InfeasibleFace) {
  const Instance inst = appendix_a_instance();
  const auto seed = make_seed(inst.vectors, {0, 1}, 0.1);
  ASSERT_EQ(seed.long_set, (ElementSet{2, 3}));
  try {
    solve_cp(inst, seed, Objective::lambda_min());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasibleFace);
  }
}

TEST(Relaxation, IterationCapReportsNotConverged) {
  oracle::Engine rng(51);
  const Instance inst = random_instance(rng, 3, 9, 0);
  RelaxationOptions opt;
  opt.max_iterations = 1;
  opt.tolerance = 1e-12;
  const auto sol = solve_cp(inst, make_seed(inst.vectors, {}, 0.1), Objective::det_root(), opt);
  EXPECT_FALSE(sol.converged);
  EXPECT_TRUE(polytope_member(*inst.matroid, sol.x_star));
}

TEST(Relaxation, ScheduleScalesWithTolerance) {
  const auto s = smoothing_schedule(3, 1e-6);
  ASSERT_EQ(s.size(), 3U);
  EXPECT_NEAR(s[0], 10 * std::log(3.0) / 1e-6, 1e-3);
  EXPECT_NEAR(s[2], 160 * std::log(3.0) / 1e-6, 1e-2);
  EXPECT_NEAR(smoothing_schedule(1, 1e-3)[1], 40 / 1e-3, 1e-9);
}

TEST(Relaxation, MaxVolumeBaseIsInvertibleWhenPossible) {
  oracle::Engine rng(52);
  for (int trial = 0; trial < 20; ++trial) {
    const Instance inst = random_instance(rng, 3, 8, trial % 3);
    const ElementSet b = max_volume_base(*inst.matroid, inst.vectors.vectors(), SymMatrix(3));
    EXPECT_EQ(inst.matroid->rank(b), b.size());
    EXPECT_EQ(b.size(), inst.matroid->full_rank());
    EXPECT_GT(oracle::lambda_min(oracle::gram(inst.vectors.vectors(), b)), 1e-10);
  }
}

class RelaxationProperties : public ::testing::TestWithParam<int> {};

TEST_P(RelaxationProperties, RelaxesDominatesAndCertifiesGap) {
  const int objective_index = GetParam();
  const Objective obj = objective_index == 0 ? Objective::lambda_min()
                        : objective_index == 1 ? Objective::det_root()
                                               : Objective::inv_eig_norm(1.0);
  auto f = objective_index == 0 ? &oracle::lambda_min_value : &oracle::det_root_value;
  oracle::Engine rng(53 + static_cast<unsigned>(objective_index));
  for (int trial = 0; trial < 24; ++trial) {
    const std::size_t d = 2 + trial % 2;
    const Instance inst = random_instance(rng, d, 7 + trial % 3, trial % 3);
    const auto seed = make_seed(inst.vectors, {}, 0.1);
    const auto face = face_matroid(inst, seed);
    const auto sol = solve_cp(inst, face, obj);
    ASSERT_TRUE(sol.converged) << "trial " << trial;
    EXPECT_TRUE(polytope_member(*inst.matroid, sol.x_star));
    const Eigen::MatrixXd xs = oracle::weighted_gram(inst.vectors.vectors(), sol.x_star);
    EXPECT_LT((xs - oracle::dense(sol.X_star)).norm(), 1e-9 * (1 + xs.norm()));
    if (objective_index < 2) {
      EXPECT_LE(exhaustive_face_max(inst, face, f), sol.value + 1e-5);
      EXPECT_NEAR(sol.value, f(xs), 1e-9 * (1 + sol.value));
    }
    const SymMatrix g = obj.surrogate(sol.X_star, sol.beta).gradient;
    EXPECT_NEAR(exhaustive_gap(inst, face, g, sol.x_star), sol.fw_gap, 1e-8 * (1 + std::abs(sol.fw_gap)));
  }
}

INSTANTIATE_TEST_SUITE_P(Objectives, RelaxationProperties, ::testing::Values(0, 1, 2));

TEST(Relaxation, ScalingMultipliesValueBySquare) {
  oracle::Engine rng(57);
  for (int trial = 0; trial < 10; ++trial) {
    const Instance inst = random_instance(rng, 2, 7, trial % 3);
    std::vector<Vector> scaled = inst.vectors.vectors();
    const double c = 1.5 + trial * 0.25;
    for (auto& v : scaled)
      for (double& x : v) x *= c;
    const Instance inst2 = make_instance(Vectorset(scaled), inst.matroid);
    for (const auto& obj : {Objective::lambda_min(), Objective::det_root()}) {
      const auto a = solve_cp(inst, make_seed(inst.vectors, {}, 0.1), obj);
      const auto b = solve_cp(inst2, make_seed(inst2.vectors, {}, 0.1), obj);
      EXPECT_NEAR(b.value, c * c * a.value, 1e-5 * c * c * (1 + a.value));
    }
  }
}

TEST(Relaxation, SeedExtendingOptimumDominatesBruteForce) {
  oracle::Engine rng(58);
  for (int trial = 0; trial < 10; ++trial) {
    const Instance inst = random_instance(rng, 2, 8, trial % 2);
    const auto bases = oracle::RankOracle(*inst.matroid).bases();
    const auto best = oracle::brute(inst.vectors.vectors(), bases, &oracle::lambda_min_value);
    const ElementSet s(best.base.begin(), best.base.begin() + 2);
    SeedResult seed = make_seed(inst.vectors, s, leverage_threshold(2, 0.3));
    // The optimum base must survive in the face for dominance to apply.
    bool survives = true;
    for (auto e : seed.long_set) survives &= !std::binary_search(best.base.begin(), best.base.end(), e);
    if (!survives) continue;
    const auto sol = solve_cp(inst, seed, Objective::lambda_min());
    EXPECT_GE(sol.value, best.value - 1e-5);
  }
}
