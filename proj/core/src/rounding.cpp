#include "mineig/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mineig/error.hpp"

namespace mineig {
namespace {

std::size_t count_fractional(std::span<const double> x, const NumericPolicy& policy) {
  return static_cast<std::size_t>(std::count_if(x.begin(), x.end(), [&](double v) {
    return v > policy.integrality_tolerance && v < 1.0 - policy.integrality_tolerance;
  }));
}

void snap(Vector& y, const NumericPolicy& policy) {
  for (double& v : y) {
    if (std::abs(v) <= policy.integrality_tolerance) v = 0.0;
    if (std::abs(v - 1.0) <= policy.integrality_tolerance) v = 1.0;
  }
}

void finish(RoundingOutcome& out, const Instance& instance, const RoundingOptions& options,
            const NumericPolicy& policy) {
  out.objective_value = options.objective.value(instance.vectors.gram(out.base), policy);
  out.success = out.objective_value >= (1.0 - options.epsilon) * options.relaxation_value;
}

}  // namespace

// Estimator ----------------------------------------------------------------

PessimisticEstimator::PessimisticEstimator(std::vector<SymMatrix> matrices, double theta,
                                           double t, std::vector<Element> owner)
    : owner_(std::move(owner)), theta_(theta), t_(t) {
  if (matrices.empty()) throw Error(ErrorCode::kInvalidArgument, "estimator needs at least one matrix");
  if (!(theta < 0.0)) throw Error(ErrorCode::kInvalidArgument, "estimator needs theta < 0");
  dim_ = matrices.front().dim();
  if (owner_.empty()) {
    owner_.resize(matrices.size());
    std::iota(owner_.begin(), owner_.end(), Element{0});
  }
  if (owner_.size() != matrices.size()) {
    throw Error(ErrorCode::kInvalidArgument, "owner map size differs from matrix count");
  }
  eig_.reserve(matrices.size());
  for (const SymMatrix& m : matrices) {
    if (m.dim() != dim_) throw Error(ErrorCode::kInvalidArgument, "estimator matrices differ in size");
    eig_.push_back(eigen_decompose(m));
  }
}

PessimisticEstimator PessimisticEstimator::at_point(std::vector<SymMatrix> matrices,
                                                    std::span<const double> x, double epsilon,
                                                    std::vector<Element> owner) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorCode::kInvalidArgument, "epsilon must lie in (0, 1)");
  if (matrices.empty()) throw Error(ErrorCode::kInvalidArgument, "estimator needs at least one matrix");
  SymMatrix mean(matrices.front().dim());
  for (std::size_t k = 0; k < matrices.size(); ++k) {
    mean.add_scaled(matrices[k], x[owner.empty() ? k : owner[k]]);
  }
  const double t = (1.0 - epsilon) * lambda_min(mean);
  return PessimisticEstimator(std::move(matrices), std::log(1.0 - epsilon), t, std::move(owner));
}

SymMatrix PessimisticEstimator::exponent(std::span<const double> x) const {
  SymMatrix s(dim_);
  for (std::size_t k = 0; k < eig_.size(); ++k) {
    const double xk = x[owner_[k]];
    if (xk == 0.0) continue;
    s += eig_[k].map([&](double mu) {
      if (xk == 1.0) return theta_ * mu;
      return std::log1p(xk * std::expm1(theta_ * mu));
    });
  }
  return s;
}

double PessimisticEstimator::eval(std::span<const double> x) const {
  const EigenDecomp e = eigen_decompose(exponent(x));
  double tr = 0.0;
  for (double v : e.values) tr += std::exp(v);
  return std::exp(-theta_ * t_) * tr;
}

// Pipage --------------------------------------------------------------------

Vector pipage_walk(const Matroid& m, Vector y, Rng& rng,
                   const std::function<void(std::size_t, const Vector&)>& on_step,
                   const NumericPolicy& policy) {
  const std::size_t n = m.ground_size();
  if (y.size() != n) throw Error(ErrorCode::kInvalidArgument, "point size differs from ground size");
  snap(y, policy);
  if (on_step) on_step(0, y);
  const std::size_t cap = n * n + n;
  for (std::size_t step = 1;; ++step) {
    const auto pair = find_fractional_pair(m, y, policy);
    if (!pair) return y;
    if (step > cap) throw Error(ErrorCode::kInternalInvariantViolation, "pipage exceeded its step bound");
    const auto [a, b] = *pair;
    const ExchangeBounds bd = m.exchange_bounds(y, a, b, policy);
    if (bd.down + bd.up <= 0.0) {
      throw Error(ErrorCode::kInternalInvariantViolation, "pipage step bounds are both zero");
    }
    // Expectation-preserving: move down by ell w.p. h/(ell+h), up by h otherwise.
    const double shift = rng.uniform() * (bd.down + bd.up) < bd.up ? -bd.down : bd.up;
    y[a] += shift;
    y[b] -= shift;
    snap(y, policy);
    if (on_step) on_step(step, y);
  }
}

RoundingOutcome round_pipage(const Instance& instance, const MatroidMinor& face,
                             std::span<const double> x, std::uint64_t rng_seed,
                             const RoundingOptions& options, const NumericPolicy& policy) {
  if (!face.feasible()) throw Error(ErrorCode::kInfeasibleFace, "cannot round on an empty face");
  if (x.size() != instance.size()) throw Error(ErrorCode::kInvalidArgument, "point size differs from instance");
  RoundingOutcome out;
  out.rng_seed = rng_seed;
  Rng rng(rng_seed);
  Vector full(x.begin(), x.end());
  const auto on_step = [&](std::size_t k, const Vector& y) {
    out.steps = k;
    if (options.estimator == nullptr) return;
    for (std::size_t j = 0; j < face.kept().size(); ++j) full[face.kept()[j]] = y[j];
    out.estimator_trace.push_back({k, options.estimator->eval(full), count_fractional(y, policy)});
  };
  const Vector y = pipage_walk(face.reduced(), face.restrict(x), rng, on_step, policy);
  ElementSet reduced_base;
  for (Element j = 0; j < y.size(); ++j)
    if (y[j] == 1.0) reduced_base.push_back(j);
  out.base = face.lift(reduced_base);
  if (!instance.matroid->is_independent(out.base) ||
      out.base.size() != instance.matroid->full_rank()) {
    throw Error(ErrorCode::kInternalInvariantViolation, "pipage did not end at a base");
  }
  finish(out, instance, options, policy);
  return out;
}

RoundingOutcome round_partition(const Instance& instance, std::span<const double> x,
                                std::uint64_t rng_seed, const RoundingOptions& options,
                                const NumericPolicy& policy) {
  const auto* pm = dynamic_cast<const PartitionMatroid*>(instance.matroid.get());
  if (pm == nullptr) throw Error(ErrorCode::kInvalidArgument, "independent rounding needs a partition matroid");
  if (x.size() != instance.size()) throw Error(ErrorCode::kInvalidArgument, "point size differs from instance");
  RoundingOutcome out;
  out.rng_seed = rng_seed;
  Rng rng(rng_seed);
  Vector point(x.begin(), x.end());
  if (options.estimator != nullptr) {
    out.estimator_trace.push_back({0, options.estimator->eval(point), count_fractional(point, policy)});
  }
  for (const ElementSet& part : pm->parts()) {
    double mass = 0.0;
    for (Element e : part) mass += std::max(x[e], 0.0);
    if (!(mass > policy.integrality_tolerance)) {
      throw Error(ErrorCode::kInfeasiblePart, "a part carries no mass");
    }
    const double u = rng.uniform() * mass;
    double acc = 0.0;
    Element pick = part.back();
    for (Element e : part) {
      if (x[e] <= 0.0) continue;
      acc += x[e];
      pick = e;
      if (u < acc) break;
    }
    out.base.push_back(pick);
    for (Element e : part) point[e] = e == pick ? 1.0 : 0.0;
  }
  std::sort(out.base.begin(), out.base.end());
  out.steps = 1;
  if (options.estimator != nullptr) {
    out.estimator_trace.push_back({1, options.estimator->eval(point), 0});
  }
  finish(out, instance, options, policy);
  return out;
}

// Replication ---------------------------------------------------------------

std::size_t replication_count(std::size_t d, double epsilon) {
  const double e2 = epsilon * epsilon;
  const double logd = d <= 1 ? 1.0 : std::log(static_cast<double>(d));
  return static_cast<std::size_t>(std::ceil(10.0 * logd / e2));
}

Replication replicate_seed_vectors(const Instance& instance, const SeedResult& seed,
                                   std::span<const double> x_star, double epsilon,
                                   const NumericPolicy& policy) {
  if (x_star.size() != instance.size()) throw Error(ErrorCode::kInvalidArgument, "point size differs from instance");
  for (Element e : seed.seed) {
    if (std::abs(x_star[e] - 1.0) > policy.integrality_tolerance) {
      throw Error(ErrorCode::kInvalidArgument, "seed coordinates must equal 1");
    }
  }
  const SymMatrix x = instance.vectors.weighted_gram(x_star);
  Replication rep;
  rep.transform = matrix_inverse_sqrt(x, policy);
  rep.copies = replication_count(instance.dim(), epsilon);
  const double threshold = leverage_threshold(instance.dim(), epsilon);
  for (Element i = 0; i < instance.size(); ++i) {
    const bool in_seed = std::binary_search(seed.seed.begin(), seed.seed.end(), i);
    if (!in_seed && x_star[i] <= policy.integrality_tolerance) continue;
    const Vector w = rep.transform.apply(instance.vectors[i]);
    if (in_seed) {
      const SymMatrix copy = SymMatrix::outer(w, 1.0 / static_cast<double>(rep.copies));
      for (std::size_t c = 0; c < rep.copies; ++c) {
        rep.matrices.push_back(copy);
        rep.owner.push_back(i);
        rep.weights.push_back(1.0);
      }
    } else {
      if (dot(w, w) > threshold + 1e-9) {
        throw Error(ErrorCode::kLongVectorLeak,
                    "element " + std::to_string(i + 1) + " has mass but exceeds the leverage threshold");
      }
      rep.matrices.push_back(SymMatrix::outer(w));
      rep.owner.push_back(i);
      rep.weights.push_back(x_star[i]);
    }
  }
  return rep;
}

}  // namespace mineig
