#pragma once

// Concave, monotone, degree-1 homogeneous spectral objectives f(X).

#include <string>
#include <string_view>

#include "mineig/numeric_policy.hpp"
#include "mineig/spectral.hpp"

namespace mineig {

enum class ObjectiveKind {
  kLambdaMin,     // lambda_min(X)
  kDetRoot,       // det(X)^(1/d)
  kInvEigNorm,    // 1 / ||eig(X^-1)||_p
};

class Objective {
 public:
  static Objective lambda_min();
  static Objective det_root();
  // p must be positive.
  static Objective inv_eig_norm(double p);
  // "lambda-min" | "det-root" | "neg-inv-norm:<p>"; throws InvalidArgument.
  static Objective parse(std::string_view spec);

  ObjectiveKind kind() const noexcept { return kind_; }
  double p() const noexcept { return p_; }
  std::string name() const;
  // True when the solver optimises a smoothed surrogate instead of f.
  bool smoothed() const noexcept { return kind_ == ObjectiveKind::kLambdaMin; }

  // 0 for det-root and inv-eig-norm at singular X.
  double value(const SymMatrix& x, const NumericPolicy& policy = kDefaultPolicy) const;
  // A supergradient at X; at singular X the smooth objectives are
  // differentiated at X + delta I with delta = singular_regularization (1 + tr X).
  SymMatrix supergradient(const SymMatrix& x,
                          const NumericPolicy& policy = kDefaultPolicy) const;

  struct Evaluation {
    double value;
    SymMatrix gradient;
  };
  // Function the solver maximises: for lambda-min the log-barrier smoothing
  // with mu = 1/beta, f itself otherwise (beta ignored).
  Evaluation surrogate(const SymMatrix& x, double beta,
                       const NumericPolicy& policy = kDefaultPolicy) const;

  friend bool operator==(const Objective&, const Objective&) = default;

 private:
  Objective(ObjectiveKind kind, double p) : kind_(kind), p_(p) {}
  ObjectiveKind kind_;
  double p_;
};

}  // namespace mineig
