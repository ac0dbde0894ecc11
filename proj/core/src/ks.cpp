#include "mineig/ks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mineig/error.hpp"

namespace mineig {
namespace {

SymMatrix split_gram(const KSInstance& ks, const ElementSet& t) {
  SymMatrix x(ks.dim());
  for (Element i : t) x.add_outer(ks.u[i]);
  return x;
}

}  // namespace

KSInstance make_ks_instance(std::vector<Vector> u, double c) {
  if (u.empty()) throw Error(ErrorCode::kInvalidArgument, "unit decomposition needs vectors");
  const Vectorset vs(u);  // validates shape and finiteness
  KSInstance ks;
  ks.c = c;
  std::vector<std::size_t> all(u.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const SymMatrix deviation = vs.gram(all) - SymMatrix::identity(vs.dim());
  if (deviation.frobenius_norm() > 1e-6) {
    throw Error(ErrorCode::kInvalidArgument, "vectors do not sum to the identity");
  }
  for (const Vector& v : u) ks.alpha = std::max(ks.alpha, dot(v, v));
  ks.u = std::move(u);
  return ks;
}

Instance ks_reduce(const KSInstance& ks) {
  const std::size_t d = ks.dim();
  std::vector<Vector> lifted;
  std::vector<ElementSet> parts;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    Vector first(2 * d, 0.0);
    Vector second(2 * d, 0.0);
    std::copy(ks.u[i].begin(), ks.u[i].end(), first.begin());
    std::copy(ks.u[i].begin(), ks.u[i].end(), second.begin() + static_cast<std::ptrdiff_t>(d));
    lifted.push_back(std::move(first));
    lifted.push_back(std::move(second));
    parts.push_back({2 * i, 2 * i + 1});
  }
  return make_instance(Vectorset(std::move(lifted)),
                       std::make_shared<PartitionMatroid>(std::move(parts)), "ks-lift", kKsProvenance);
}

ElementSet ks_extract(const SolveReport& report, std::size_t m) {
  if (report.provenance != kKsProvenance) {
    throw Error(ErrorCode::kWrongProvenance, "report does not come from a lifted split instance");
  }
  ElementSet t;
  for (Element e : report.best_base) {
    if (e >= 2 * m) throw Error(ErrorCode::kWrongProvenance, "base element outside the lifted instance");
    if (e % 2 == 0) t.push_back(e / 2);
  }
  return t;
}

double ks_lifted_lambda_min(const KSInstance& ks, const ElementSet& t) {
  const SymMatrix x = split_gram(ks, t);
  const EigenDecomp e = eigen_decompose(x);
  // The complement sums to I - X.
  return std::min(e.min(), 1.0 - e.max());
}

bool ks_balanced(const KSInstance& ks, const ElementSet& t, double delta) {
  const EigenDecomp e = eigen_decompose(split_gram(ks, t));
  return e.min() >= 0.5 - delta && e.max() <= 0.5 + delta;
}

KSCertificate ks_certify(const KSInstance& ks, const ElementSet& t_prime, double epsilon) {
  KSCertificate cert;
  cert.t_prime = t_prime;
  const EigenDecomp e = eigen_decompose(split_gram(ks, t_prime));
  cert.lambda_min = e.min();
  cert.lambda_max = e.max();
  const double slack = ks.c * std::sqrt(ks.alpha);
  cert.lower_bound = (1.0 - epsilon) * (0.5 - slack);
  cert.upper_bound = (1.0 + epsilon) * (0.5 + slack);
  cert.lifted_lambda_min = std::min(e.min(), 1.0 - e.max());
  cert.passed = cert.lambda_min >= cert.lower_bound && cert.lambda_max <= cert.upper_bound;
  return cert;
}

KSInstance planted_ks_instance(std::size_t d, std::size_t m, double c, Rng& rng) {
  if (d == 0 || m < 2 * d) throw Error(ErrorCode::kInvalidArgument, "planted split needs m >= 2d");
  const std::size_t half = m / 2;
  std::vector<Vector> u(m, Vector(d));
  const auto fill_half = [&](std::size_t begin, std::size_t end) {
    while (true) {
      SymMatrix g(d);
      for (std::size_t i = begin; i < end; ++i) {
        for (double& x : u[i]) x = rng.normal();
        g.add_outer(u[i]);
      }
      if (lambda_min(g) > 1e-3 * g.trace() / static_cast<double>(d)) {
        // Rescale so this half sums to I/2.
        const SymMatrix t = std::sqrt(0.5) * matrix_inverse_sqrt(g);
        for (std::size_t i = begin; i < end; ++i) u[i] = t.apply(u[i]);
        return;
      }
    }
  };
  fill_half(0, half);
  fill_half(half, m);
  return make_ks_instance(std::move(u), c);
}

KSResult ks_solve(const KSInstance& ks, const SolveOptions& options, const NumericPolicy& policy) {
  const Instance lifted = ks_reduce(ks);
  KSResult result;
  result.report = enumerate_and_solve(lifted, options, policy);
  result.certificate = ks_certify(ks, ks_extract(result.report, ks.size()), options.epsilon);
  return result;
}

}  // namespace mineig
