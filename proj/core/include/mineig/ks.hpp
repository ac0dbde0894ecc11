#pragma once

// Two-way spectral splitting of a unit decomposition, via the lifted
// partition-matroid instance in R^{2d}.

#include <cstdint>
#include <vector>

#include "mineig/driver.hpp"
#include "mineig/instance.hpp"
#include "mineig/rng.hpp"

namespace mineig {

inline constexpr const char* kKsProvenance = "ks-lift";

struct KSInstance {
  std::vector<Vector> u;
  double alpha = 0.0;  // max squared norm
  double c = 0.0;
  std::size_t dim() const { return u.empty() ? 0 : u.front().size(); }
  std::size_t size() const { return u.size(); }
};

// Computes alpha and checks ||sum u u^T - I||_F <= 1e-6; throws
// InvalidArgument otherwise.
KSInstance make_ks_instance(std::vector<Vector> u, double c);

// Element 2i is [u_i; 0], element 2i+1 is [0; u_i], parts {2i, 2i+1}.
Instance ks_reduce(const KSInstance& ks);

// T' = {i : element 2i chosen}. Throws WrongProvenance unless the report
// came from a lifted instance.
ElementSet ks_extract(const SolveReport& report, std::size_t m);

struct KSCertificate {
  ElementSet t_prime;
  double lambda_min = 0.0;  // of sum_{T'} u u^T
  double lambda_max = 0.0;
  double lower_bound = 0.0;  // (1 - eps)(1/2 - c sqrt(alpha))
  double upper_bound = 0.0;  // (1 + eps)(1/2 + c sqrt(alpha))
  double lifted_lambda_min = 0.0;
  bool passed = false;
};

KSCertificate ks_certify(const KSInstance& ks, const ElementSet& t_prime, double epsilon);

// lambda_min of the lifted selection for the split T: min over both halves.
double ks_lifted_lambda_min(const KSInstance& ks, const ElementSet& t);

// Two-sided check (1/2 - delta) I <= sum_T u u^T <= (1/2 + delta) I.
bool ks_balanced(const KSInstance& ks, const ElementSet& t, double delta);

// Random instance in R^d with m vectors whose first half sums to I/2 exactly.
KSInstance planted_ks_instance(std::size_t d, std::size_t m, double c, Rng& rng);

struct KSResult {
  SolveReport report;
  KSCertificate certificate;
};
KSResult ks_solve(const KSInstance& ks, const SolveOptions& options,
                  const NumericPolicy& policy = kDefaultPolicy);

}  // namespace mineig
