#pragma once

// Rounding a fractional point to a base: independent per-part sampling for
// partition matroids and randomized pipage rounding in general, with the
// matrix pessimistic estimator as an optional monitor.

#include <cstdint>
#include <functional>
#include <vector>

#include "mineig/instance.hpp"
#include "mineig/local_search.hpp"
#include "mineig/matroid.hpp"
#include "mineig/objective.hpp"
#include "mineig/rng.hpp"

namespace mineig {

// g(x) = e^{-theta t} tr exp( sum_k log(x_k e^{theta M_k} + (1 - x_k) I) ),
// where x_k is the coordinate of the element owning matrix k.
class PessimisticEstimator {
 public:
  // owner[k] is the ground-set element carrying matrix k (identity when empty).
  PessimisticEstimator(std::vector<SymMatrix> matrices, double theta, double t,
                       std::vector<Element> owner = {});

  // theta = log(1 - eps), t = (1 - eps) lambda_min(sum_k x_k M_k).
  static PessimisticEstimator at_point(std::vector<SymMatrix> matrices, std::span<const double> x,
                                       double epsilon, std::vector<Element> owner = {});

  double theta() const noexcept { return theta_; }
  double t() const noexcept { return t_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return eig_.size(); }
  const std::vector<Element>& owner() const noexcept { return owner_; }

  // Matrix inside the trace exponential.
  SymMatrix exponent(std::span<const double> x) const;
  double eval(std::span<const double> x) const;

 private:
  std::vector<EigenDecomp> eig_;
  std::vector<Element> owner_;
  double theta_;
  double t_;
  std::size_t dim_;
};

struct EstimatorStep {
  std::size_t step;
  double g;
  std::size_t support_frac;  // fractional coordinates remaining
};

struct RoundingOutcome {
  ElementSet base;
  double objective_value = 0.0;
  // objective_value >= (1 - epsilon) * relaxation_value
  bool success = false;
  std::vector<EstimatorStep> estimator_trace;
  std::uint64_t rng_seed = 0;
  std::size_t steps = 0;
};

struct RoundingOptions {
  Objective objective = Objective::lambda_min();
  double epsilon = 0.5;
  double relaxation_value = 0.0;
  // Evaluated on the full point after every step when set.
  const PessimisticEstimator* estimator = nullptr;
};

// One element per part, drawn independently with the marginals of x.
// Throws InvalidArgument unless the matroid is a partition matroid and
// InfeasiblePart when a part carries no mass.
RoundingOutcome round_partition(const Instance& instance, std::span<const double> x,
                                std::uint64_t rng_seed, const RoundingOptions& options = {},
                                const NumericPolicy& policy = kDefaultPolicy);

// Randomized pipage rounding of a full point x lying in the face.
RoundingOutcome round_pipage(const Instance& instance, const MatroidMinor& face,
                             std::span<const double> x, std::uint64_t rng_seed,
                             const RoundingOptions& options = {},
                             const NumericPolicy& policy = kDefaultPolicy);

// The pipage walk itself on a point of P(m). on_step(k, y) sees the point
// after step k (k = 0 is the input). Returns the final integral point.
// Throws InternalInvariantViolation if the walk exceeds n^2 + n steps.
Vector pipage_walk(const Matroid& m, Vector y, Rng& rng,
                   const std::function<void(std::size_t, const Vector&)>& on_step = {},
                   const NumericPolicy& policy = kDefaultPolicy);

// ceil(10 log d / eps^2); ceil(10 / eps^2) for d = 1.
std::size_t replication_count(std::size_t d, double epsilon);

struct Replication {
  // X^{-1/2} v v^T X^{-1/2} for every non-seed element with x > 0, and r
  // copies scaled by 1/r for each seed element.
  std::vector<SymMatrix> matrices;
  std::vector<Element> owner;
  std::vector<double> weights;  // x of the owner
  SymMatrix transform{1};       // X^{-1/2}
  std::size_t copies = 0;       // r
};

// Throws LongVectorLeak if a non-seed element with positive mass has
// leverage above the threshold w.r.t. X.
Replication replicate_seed_vectors(const Instance& instance, const SeedResult& seed,
                                   std::span<const double> x_star, double epsilon,
                                   const NumericPolicy& policy = kDefaultPolicy);

}  // namespace mineig
