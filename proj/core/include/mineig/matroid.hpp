#pragma once

// Matroids over the ground set {0, ..., n-1}: rank/independence oracles, the
// four concrete families, minors, greedy optimisation and base polytope
// geometry (membership and exchange-step lengths).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "mineig/numeric_policy.hpp"
#include "mineig/spectral.hpp"

namespace mineig {

using Element = std::size_t;
using ElementSet = std::vector<Element>;  // ascending, distinct

// Ground sets up to this size support exhaustive rank-constraint scans.
inline constexpr std::size_t kMaxExhaustiveGround = 20;

enum class MatroidKind { kUniform, kPartition, kGraphic, kExplicit };
std::string_view to_string(MatroidKind kind);

// Longest feasible moves from x along -(e_a - e_b) (`down`) and +(e_a - e_b)
// (`up`) inside the base polytope.
struct ExchangeBounds {
  double down = 0.0;
  double up = 0.0;
};

class Matroid {
 public:
  explicit Matroid(std::size_t ground_size);
  virtual ~Matroid() = default;
  Matroid(const Matroid&) = delete;
  Matroid& operator=(const Matroid&) = delete;

  virtual MatroidKind kind() const = 0;
  std::size_t ground_size() const noexcept { return n_; }

  // Elements of `subset` must be distinct and in range.
  virtual std::size_t rank(std::span<const Element> subset) const = 0;
  std::size_t full_rank() const;
  bool is_independent(std::span<const Element> subset) const {
    return rank(subset) == subset.size();
  }

  // Point-set queries on the base polytope. The defaults scan every rank
  // constraint and need ground_size() <= kMaxExhaustiveGround.
  virtual bool base_polytope_contains(std::span<const double> x,
                                      const NumericPolicy& policy) const;
  virtual ExchangeBounds exchange_bounds(std::span<const double> x, Element a, Element b,
                                         const NumericPolicy& policy) const;

  // Minor with `contract` contracted and `remove` deleted. Elements that are
  // loops in the minor are dropped too; `kept` receives the surviving
  // original elements in ascending order, which index the returned
  // matroid's ground set.
  virtual std::unique_ptr<Matroid> reduce(const ElementSet& contract,
                                          const ElementSet& remove,
                                          ElementSet& kept) const = 0;

 protected:
  // rank of every subset, indexed by bitmask; built once on first use.
  const std::vector<std::uint8_t>& rank_table() const;

 private:
  std::size_t n_;
  mutable std::once_flag table_once_;
  mutable std::vector<std::uint8_t> table_;
};

// Sets of size at most k are independent.
class UniformMatroid final : public Matroid {
 public:
  UniformMatroid(std::size_t ground_size, std::size_t rank);

  MatroidKind kind() const override { return MatroidKind::kUniform; }
  std::size_t rank_bound() const noexcept { return k_; }

  std::size_t rank(std::span<const Element> subset) const override;
  bool base_polytope_contains(std::span<const double> x,
                              const NumericPolicy& policy) const override;
  ExchangeBounds exchange_bounds(std::span<const double> x, Element a, Element b,
                                 const NumericPolicy& policy) const override;
  std::unique_ptr<Matroid> reduce(const ElementSet& contract, const ElementSet& remove,
                                  ElementSet& kept) const override;

 private:
  std::size_t k_;
};

// At most one element from each part. Parts are disjoint, non-empty and
// cover the ground set.
class PartitionMatroid final : public Matroid {
 public:
  explicit PartitionMatroid(std::vector<ElementSet> parts);

  MatroidKind kind() const override { return MatroidKind::kPartition; }
  const std::vector<ElementSet>& parts() const noexcept { return parts_; }
  std::size_t part_of(Element e) const { return part_of_[e]; }

  std::size_t rank(std::span<const Element> subset) const override;
  bool base_polytope_contains(std::span<const double> x,
                              const NumericPolicy& policy) const override;
  ExchangeBounds exchange_bounds(std::span<const double> x, Element a, Element b,
                                 const NumericPolicy& policy) const override;
  std::unique_ptr<Matroid> reduce(const ElementSet& contract, const ElementSet& remove,
                                  ElementSet& kept) const override;

 private:
  std::vector<ElementSet> parts_;
  std::vector<std::size_t> part_of_;
};

// Forests of a multigraph; element i is edge i. Self-loops are allowed.
class GraphicMatroid final : public Matroid {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;
  GraphicMatroid(std::size_t num_nodes, std::vector<Edge> edges);

  MatroidKind kind() const override { return MatroidKind::kGraphic; }
  std::size_t num_nodes() const noexcept { return num_nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::size_t rank(std::span<const Element> subset) const override;
  std::unique_ptr<Matroid> reduce(const ElementSet& contract, const ElementSet& remove,
                                  ElementSet& kept) const override;

 private:
  std::size_t num_nodes_;
  std::vector<Edge> edges_;
};

// Matroid given by its list of bases (ground size at most 64). The base
// exchange axiom is verified at construction when the ground set has at most
// 10 elements; larger inputs are accepted as given and report
// exchange_verified() == false.
class ExplicitMatroid final : public Matroid {
 public:
  ExplicitMatroid(std::size_t ground_size, std::vector<ElementSet> bases);

  MatroidKind kind() const override { return MatroidKind::kExplicit; }
  const std::vector<ElementSet>& bases() const noexcept { return bases_; }
  bool exchange_verified() const noexcept { return verified_; }

  std::size_t rank(std::span<const Element> subset) const override;
  std::unique_ptr<Matroid> reduce(const ElementSet& contract, const ElementSet& remove,
                                  ElementSet& kept) const override;

 private:
  std::vector<ElementSet> bases_;
  std::vector<std::uint64_t> masks_;
  bool verified_ = false;
};

// Base maximising sum of weights; equal weights are taken in ascending
// element order.
ElementSet greedy_max_weight_base(const Matroid& m, std::span<const double> weights);

bool polytope_member(const Matroid& m, std::span<const double> x,
                     const NumericPolicy& policy = kDefaultPolicy);

// Pipage step lengths (ell, h) for the pair (a, b). Throws NothingToRound if
// x_a or x_b is integral.
ExchangeBounds pipage_step_bounds(const Matroid& m, std::span<const double> x,
                                  Element a, Element b,
                                  const NumericPolicy& policy = kDefaultPolicy);

// First pair (a, b), in lexicographic order over fractional coordinates,
// that can move both ways along e_a - e_b. nullopt iff x is integral.
std::optional<std::pair<Element, Element>> find_fractional_pair(
    const Matroid& m, std::span<const double> x,
    const NumericPolicy& policy = kDefaultPolicy);

bool is_integral(std::span<const double> x, const NumericPolicy& policy = kDefaultPolicy);

// Calls visit(base) for every base in lexicographic order; stops early when
// visit returns false. Throws TooLarge when more than `limit` candidate
// subsets would have to be examined.
void for_each_base(const Matroid& m, const std::function<bool(const ElementSet&)>& visit,
                   std::uint64_t limit = 50'000'000);

std::uint64_t binomial(std::size_t n, std::size_t k);

ElementSet indicator_support(std::span<const double> x, const NumericPolicy& policy = kDefaultPolicy);
Vector indicator(std::size_t n, std::span<const Element> set);

// M / contracted \ deleted, re-indexed onto the surviving elements.
class MatroidMinor {
 public:
  // Throws DependentContraction if `contracted` is dependent and
  // InvalidArgument if the sets overlap or leave the ground set.
  MatroidMinor(std::shared_ptr<const Matroid> base, ElementSet contracted, ElementSet deleted);

  const Matroid& base() const noexcept { return *base_; }
  const std::shared_ptr<const Matroid>& base_ptr() const noexcept { return base_; }
  const Matroid& reduced() const noexcept { return *reduced_; }
  const ElementSet& contracted() const noexcept { return contracted_; }
  const ElementSet& deleted() const noexcept { return deleted_; }
  // Original index of each reduced element.
  const ElementSet& kept() const noexcept { return kept_; }

  // True iff some base of the original matroid contains `contracted` and
  // avoids `deleted`.
  bool feasible() const noexcept { return feasible_; }

  // rank(U ∪ S) - |S| for U disjoint from S ∪ L, in original indices.
  std::size_t rank(std::span<const Element> subset) const;

  // Reduced set -> original set united with the contracted elements.
  ElementSet lift(std::span<const Element> reduced_set) const;
  // Full point -> reduced coordinates.
  Vector restrict(std::span<const double> x_full) const;
  // Reduced point -> full point with contracted coordinates at 1.
  Vector extend(std::span<const double> x_reduced) const;
  // Membership in the face {x in P(M) : x_S = 1, x_L = 0}.
  bool face_contains(std::span<const double> x_full,
                     const NumericPolicy& policy = kDefaultPolicy) const;

 private:
  std::shared_ptr<const Matroid> base_;
  ElementSet contracted_;
  ElementSet deleted_;
  ElementSet kept_;
  std::vector<std::size_t> reduced_index_;  // original -> reduced, npos if dropped
  std::unique_ptr<Matroid> reduced_;
  bool feasible_ = false;
};

MatroidMinor minor(std::shared_ptr<const Matroid> m, ElementSet contract, ElementSet remove);

}  // namespace mineig
