#include <gtest/gtest.h>

#include <cmath>

#include "mineig/error.hpp"
#include "mineig/objective.hpp"
#include "oracle.hpp"

using namespace mineig;

namespace {

double inv_norm_oracle(const Eigen::MatrixXd& x, double p) {
  const Eigen::VectorXd ev = oracle::eigenvalues(x);
  if (ev(0) <= 0) return 0.0;
  double s = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) s += std::pow(1.0 / ev(i), p);
  return 1.0 / std::pow(s, 1.0 / p);
}

}  // namespace

TEST(ObjectiveTest, Parse) {
  EXPECT_EQ(Objective::parse("lambda-min"), Objective::lambda_min());
  EXPECT_EQ(Objective::parse("det-root"), Objective::det_root());
  EXPECT_EQ(Objective::parse("neg-inv-norm:2"), Objective::inv_eig_norm(2.0));
  EXPECT_EQ(Objective::parse("neg-inv-norm:2").name(), "neg-inv-norm:2");
  EXPECT_THROW(Objective::parse("max-eig"), Error);
  EXPECT_THROW(Objective::parse("neg-inv-norm:-1"), Error);
  EXPECT_THROW(Objective::parse("neg-inv-norm:"), Error);
  EXPECT_TRUE(Objective::lambda_min().smoothed());
  EXPECT_FALSE(Objective::det_root().smoothed());
}

TEST(ObjectiveTest, ValuesMatchEigenvalueOracle) {
  oracle::Engine rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + trial % 5;
    const Eigen::MatrixXd a = oracle::random_pd(rng, d);
    const SymMatrix x = oracle::from_dense(a);
    EXPECT_NEAR(Objective::lambda_min().value(x), oracle::lambda_min_value(a), 1e-10);
    EXPECT_NEAR(Objective::det_root().value(x), oracle::det_root_value(a), 1e-9 * oracle::lambda_max(a));
    for (double p : {0.5, 1.0, 2.0, 5.0})
      EXPECT_NEAR(Objective::inv_eig_norm(p).value(x), inv_norm_oracle(a, p), 1e-9 * oracle::lambda_max(a));
  }
}

TEST(ObjectiveTest, SingularValues) {
  const SymMatrix x = SymMatrix::diagonal({1, 0});
  EXPECT_EQ(Objective::det_root().value(x), 0.0);
  EXPECT_EQ(Objective::inv_eig_norm(1).value(x), 0.0);
  EXPECT_NEAR(Objective::lambda_min().value(x), 0.0, 1e-15);
}

TEST(ObjectiveTest, HomogeneousMonotoneConcave) {
  oracle::Engine rng(32);
  std::uniform_real_distribution<double> unif(0.1, 3.0);
  const std::vector<Objective> objs{Objective::lambda_min(), Objective::det_root(), Objective::inv_eig_norm(1.5)};
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 2 + trial % 3;
    const SymMatrix a = oracle::from_dense(oracle::random_pd(rng, d));
    const SymMatrix b = oracle::from_dense(oracle::random_pd(rng, d));
    const double c = unif(rng);
    for (const auto& f : objs) {
      const double fa = f.value(a);
      const double fb = f.value(b);
      const double scale = 1e-9 * (1 + std::abs(fa) + std::abs(fb));
      EXPECT_NEAR(f.value(c * a), c * fa, scale * c);
      EXPECT_GE(f.value(a + b) + scale, fa);
      EXPECT_GE(f.value(0.5 * a + 0.5 * b) + scale, 0.5 * fa + 0.5 * fb);
    }
  }
}

TEST(ObjectiveTest, SupergradientInequality) {
  // f(Y) <= f(X) + <G, Y - X> for concave f.
  oracle::Engine rng(33);
  const std::vector<Objective> objs{Objective::lambda_min(), Objective::det_root(), Objective::inv_eig_norm(2)};
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 2 + trial % 3;
    const SymMatrix x = oracle::from_dense(oracle::random_pd(rng, d));
    const SymMatrix y = oracle::from_dense(oracle::random_pd(rng, d));
    for (const auto& f : objs) {
      const SymMatrix g = f.supergradient(x);
      EXPECT_LE(f.value(y), f.value(x) + frobenius_inner(g, y - x) + 1e-8 * (1 + f.value(y)));
    }
  }
}

TEST(ObjectiveTest, SmoothGradientsByFiniteDifference) {
  oracle::Engine rng(34);
  const std::vector<Objective> objs{Objective::det_root(), Objective::inv_eig_norm(2)};
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = 2 + trial % 3;
    const SymMatrix x = oracle::from_dense(oracle::random_pd(rng, d));
    const SymMatrix dir = oracle::from_dense(oracle::random_pd(rng, d));
    const double h = 1e-6;
    for (const auto& f : objs) {
      const double fd = (f.value(x + h * dir) - f.value(x - h * dir)) / (2 * h);
      EXPECT_NEAR(frobenius_inner(f.supergradient(x), dir), fd, 1e-5 * (1 + std::abs(fd)));
      const auto s = f.surrogate(x, 123.0);
      EXPECT_NEAR(s.value, f.value(x), 1e-12 * (1 + s.value));
    }
  }
}

TEST(ObjectiveTest, LambdaMinSurrogateBracketsAndConverges) {
  oracle::Engine rng(35);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 2 + trial % 4;
    const SymMatrix x = oracle::from_dense(oracle::random_pd(rng, d));
    const Eigen::VectorXd ev = oracle::eigenvalues(oracle::dense(x));
    const double lm = ev(0);
    double prev = 1e300;
    for (double beta : {1.0, 10.0, 100.0, 1e4, 1e6}) {
      const auto s = Objective::lambda_min().surrogate(x, beta);
      EXPECT_GE(s.value, lm - 1e-12);
      // Upper bound from log(shift + slack) <= log(shift + d mu).
      const double mu = 1.0 / beta;
      double excess = static_cast<double>(d - 1) * mu;
      for (Eigen::Index i = 1; i < ev.size(); ++i) excess += mu * std::log1p((ev(i) - lm) / (static_cast<double>(d) * mu));
      EXPECT_LE(s.value, lm + excess + 1e-9);
      EXPECT_NEAR(s.gradient.trace(), 1.0, 1e-9);
      EXPECT_GE(lambda_min(s.gradient), -1e-12);
      EXPECT_LE(s.value, prev + 1e-12);
      prev = s.value;
    }
  }
}
