#include "mineig/objective.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "mineig/error.hpp"

namespace mineig {
namespace {

bool numerically_singular(const EigenDecomp& eig, const NumericPolicy& policy) {
  const double scale = std::max(std::abs(eig.max()), 1e-300);
  return eig.min() <= policy.pinv_relative_cutoff * scale;
}

// Eigendecomposition of X, or of X + delta I when X is numerically singular.
EigenDecomp regularized(const SymMatrix& x, const NumericPolicy& policy) {
  EigenDecomp eig = eigen_decompose(x, policy);
  if (numerically_singular(eig, policy)) {
    const double delta = policy.singular_regularization * (1.0 + std::abs(x.trace()));
    for (double& v : eig.values) v = std::max(v, 0.0) + delta;
  }
  return eig;
}

double det_root_of(const Vector& values) {
  double log_sum = 0.0;
  for (double v : values) log_sum += std::log(v);
  return std::exp(log_sum / static_cast<double>(values.size()));
}

// (sum lambda^-p)^(-1/p), evaluated relative to lambda_min.
double inv_norm_of(const Vector& values, double p) {
  const double lo = values.front();
  double s = 0.0;
  for (double v : values) s += std::pow(lo / v, p);
  return lo * std::pow(s, -1.0 / p);
}

}  // namespace

Objective Objective::lambda_min() { return {ObjectiveKind::kLambdaMin, 0.0}; }
Objective Objective::det_root() { return {ObjectiveKind::kDetRoot, 0.0}; }

Objective Objective::inv_eig_norm(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw Error(ErrorCode::kInvalidArgument, "inverse-eigenvalue norm needs a finite p > 0");
  }
  return {ObjectiveKind::kInvEigNorm, p};
}

Objective Objective::parse(std::string_view spec) {
  if (spec == "lambda-min") return lambda_min();
  if (spec == "det-root") return det_root();
  constexpr std::string_view prefix = "neg-inv-norm:";
  if (spec.substr(0, prefix.size()) == prefix) {
    const std::string_view tail = spec.substr(prefix.size());
    double p = 0.0;
    const auto [end, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), p);
    if (ec == std::errc{} && end == tail.data() + tail.size()) return inv_eig_norm(p);
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown objective '" + std::string(spec) +
                  "' (expected lambda-min, det-root or neg-inv-norm:<p>)");
}

std::string Objective::name() const {
  switch (kind_) {
    case ObjectiveKind::kLambdaMin: return "lambda-min";
    case ObjectiveKind::kDetRoot: return "det-root";
    case ObjectiveKind::kInvEigNorm: {
      std::ostringstream os;
      os.imbue(std::locale::classic());
      os << "neg-inv-norm:" << p_;
      return os.str();
    }
  }
  return "unknown";
}

double Objective::value(const SymMatrix& x, const NumericPolicy& policy) const {
  const EigenDecomp eig = eigen_decompose(x, policy);
  switch (kind_) {
    case ObjectiveKind::kLambdaMin:
      return eig.min();
    case ObjectiveKind::kDetRoot:
      return eig.min() <= 0.0 ? 0.0 : det_root_of(eig.values);
    case ObjectiveKind::kInvEigNorm:
      return eig.min() <= 0.0 ? 0.0 : inv_norm_of(eig.values, p_);
  }
  return 0.0;
}

SymMatrix Objective::supergradient(const SymMatrix& x, const NumericPolicy& policy) const {
  const std::size_t d = x.dim();
  switch (kind_) {
    case ObjectiveKind::kLambdaMin: {
      const EigenDecomp eig = eigen_decompose(x, policy);
      return SymMatrix::outer(eig.vector(0));
    }
    case ObjectiveKind::kDetRoot: {
      const EigenDecomp eig = regularized(x, policy);
      const double phi = det_root_of(eig.values);
      return eig.map([&](double l) { return phi / (static_cast<double>(d) * l); });
    }
    case ObjectiveKind::kInvEigNorm: {
      const EigenDecomp eig = regularized(x, policy);
      const double phi = inv_norm_of(eig.values, p_);
      const double lo = eig.min();
      double s = 0.0;
      for (double v : eig.values) s += std::pow(lo / v, p_);
      return eig.map([&](double l) { return phi * std::pow(lo / l, p_) / (s * l); });
    }
  }
  return SymMatrix(d);
}

Objective::Evaluation Objective::surrogate(const SymMatrix& x, double beta,
                                           const NumericPolicy& policy) const {
  if (kind_ == ObjectiveKind::kLambdaMin) {
    BarrierMinResult r = barrier_min_eig(x, 1.0 / beta, policy);
    return {r.value, std::move(r.gradient)};
  }
  return {value(x, policy), supergradient(x, policy)};
}

}  // namespace mineig
