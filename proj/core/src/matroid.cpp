#include "mineig/matroid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "mineig/error.hpp"

namespace mineig {
namespace {

constexpr std::size_t kNotKept = std::numeric_limits<std::size_t>::max();

ElementSet normalized(ElementSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

std::uint64_t mask_of(std::span<const Element> subset) {
  std::uint64_t mask = 0;
  for (Element e : subset) mask |= std::uint64_t{1} << e;
  return mask;
}

// Subset sums x(U) for every bitmask U.
std::vector<double> subset_sums(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> sums(std::size_t{1} << n, 0.0);
  for (std::size_t mask = 1; mask < sums.size(); ++mask) {
    const std::size_t low = static_cast<std::size_t>(std::countr_zero(mask));
    sums[mask] = sums[mask & (mask - 1)] + x[low];
  }
  return sums;
}

void require_exhaustive(std::size_t n) {
  if (n > kMaxExhaustiveGround) {
    throw Error(ErrorCode::kTooLarge,
                "exhaustive rank-constraint scan needs at most " +
                    std::to_string(kMaxExhaustiveGround) + " elements");
  }
}

bool finite_and_nonnegative(std::span<const double> x, const NumericPolicy& policy) {
  return std::all_of(x.begin(), x.end(), [&](double v) {
    return std::isfinite(v) && v >= -policy.polytope_nonnegativity;
  });
}

ExchangeBounds clamp_bounds(ExchangeBounds b, const NumericPolicy& policy) {
  if (b.down <= policy.step_tolerance) b.down = 0.0;
  if (b.up <= policy.step_tolerance) b.up = 0.0;
  return b;
}

ExchangeBounds box_bounds(std::span<const double> x, Element a, Element b) {
  return {std::min(x[a], 1.0 - x[b]), std::min(1.0 - x[a], x[b])};
}

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
  std::vector<std::size_t> parent;
};

}  // namespace

std::string_view to_string(MatroidKind kind) {
  switch (kind) {
    case MatroidKind::kUniform: return "uniform";
    case MatroidKind::kPartition: return "partition";
    case MatroidKind::kGraphic: return "graphic";
    case MatroidKind::kExplicit: return "explicit";
  }
  return "unknown";
}

// Matroid ------------------------------------------------------------------

Matroid::Matroid(std::size_t ground_size) : n_(ground_size) {}

std::size_t Matroid::full_rank() const {
  ElementSet all(n_);
  std::iota(all.begin(), all.end(), Element{0});
  return rank(all);
}

const std::vector<std::uint8_t>& Matroid::rank_table() const {
  require_exhaustive(n_);
  std::call_once(table_once_, [this] {
    table_.assign(std::size_t{1} << n_, 0);
    ElementSet subset;
    for (std::size_t mask = 1; mask < table_.size(); ++mask) {
      subset.clear();
      for (std::size_t e = 0; e < n_; ++e)
        if (mask >> e & 1U) subset.push_back(e);
      table_[mask] = static_cast<std::uint8_t>(rank(subset));
    }
  });
  return table_;
}

bool Matroid::base_polytope_contains(std::span<const double> x,
                                     const NumericPolicy& policy) const {
  if (x.size() != n_ || !finite_and_nonnegative(x, policy)) return false;
  const auto& ranks = rank_table();
  const std::vector<double> sums = subset_sums(x);
  if (std::abs(sums.back() - static_cast<double>(ranks.back())) > policy.polytope_tolerance) {
    return false;
  }
  for (std::size_t mask = 1; mask < sums.size(); ++mask) {
    if (sums[mask] > ranks[mask] + policy.polytope_tolerance) return false;
  }
  return true;
}

ExchangeBounds Matroid::exchange_bounds(std::span<const double> x, Element a, Element b,
                                        const NumericPolicy& policy) const {
  const auto& ranks = rank_table();
  ExchangeBounds bounds = box_bounds(x, a, b);
  // Gray-code walk over subsets W of E - {a, b}; U = W + a bounds the upward
  // move and U = W + b the downward one.
  ElementSet others;
  for (Element e = 0; e < n_; ++e)
    if (e != a && e != b) others.push_back(e);
  const std::size_t bit_a = std::size_t{1} << a;
  const std::size_t bit_b = std::size_t{1} << b;
  std::size_t mask = 0;
  double sum = 0.0;
  const std::size_t count = std::size_t{1} << others.size();
  for (std::size_t g = 0; g < count; ++g) {
    if (g > 0) {
      const auto k = static_cast<std::size_t>(std::countr_zero(g));
      const std::size_t bit = std::size_t{1} << others[k];
      if (mask & bit) {
        mask ^= bit;
        sum -= x[others[k]];
      } else {
        mask |= bit;
        sum += x[others[k]];
      }
    }
    bounds.up = std::min(bounds.up, ranks[mask | bit_a] - (sum + x[a]));
    bounds.down = std::min(bounds.down, ranks[mask | bit_b] - (sum + x[b]));
  }
  return clamp_bounds(bounds, policy);
}

// Uniform ------------------------------------------------------------------

UniformMatroid::UniformMatroid(std::size_t ground_size, std::size_t rank)
    : Matroid(ground_size), k_(rank) {
  if (rank > ground_size) throw Error(ErrorCode::kInvalidMatroid, "uniform rank exceeds ground size");
}

std::size_t UniformMatroid::rank(std::span<const Element> subset) const {
  return std::min(subset.size(), k_);
}

bool UniformMatroid::base_polytope_contains(std::span<const double> x,
                                            const NumericPolicy& policy) const {
  if (x.size() != ground_size() || !finite_and_nonnegative(x, policy)) return false;
  double total = 0.0;
  for (double v : x) {
    if (v > 1.0 + policy.polytope_tolerance) return false;
    total += v;
  }
  return std::abs(total - static_cast<double>(k_)) <= policy.polytope_tolerance;
}

ExchangeBounds UniformMatroid::exchange_bounds(std::span<const double> x, Element a,
                                               Element b, const NumericPolicy& policy) const {
  return clamp_bounds(box_bounds(x, a, b), policy);
}

std::unique_ptr<Matroid> UniformMatroid::reduce(const ElementSet& contract,
                                                const ElementSet& remove,
                                                ElementSet& kept) const {
  kept.clear();
  const std::size_t remaining_rank = k_ - contract.size();
  if (remaining_rank == 0) return std::make_unique<UniformMatroid>(0, 0);
  for (Element e = 0; e < ground_size(); ++e) {
    if (!std::binary_search(contract.begin(), contract.end(), e) &&
        !std::binary_search(remove.begin(), remove.end(), e)) {
      kept.push_back(e);
    }
  }
  return std::make_unique<UniformMatroid>(kept.size(), std::min(remaining_rank, kept.size()));
}

// Partition ----------------------------------------------------------------

namespace {
std::size_t partition_ground_size(const std::vector<ElementSet>& parts) {
  std::size_t n = 0;
  for (const auto& p : parts) n += p.size();
  return n;
}
}  // namespace

PartitionMatroid::PartitionMatroid(std::vector<ElementSet> parts)
    : Matroid(partition_ground_size(parts)), parts_(std::move(parts)) {
  part_of_.assign(ground_size(), kNotKept);
  for (std::size_t p = 0; p < parts_.size(); ++p) {
    if (parts_[p].empty()) throw Error(ErrorCode::kInvalidMatroid, "partition has an empty part");
    std::sort(parts_[p].begin(), parts_[p].end());
    for (Element e : parts_[p]) {
      if (e >= ground_size()) throw Error(ErrorCode::kInvalidMatroid, "part element out of range");
      if (part_of_[e] != kNotKept) throw Error(ErrorCode::kInvalidMatroid, "element listed in two parts");
      part_of_[e] = p;
    }
  }
}

std::size_t PartitionMatroid::rank(std::span<const Element> subset) const {
  std::vector<char> hit(parts_.size(), 0);
  std::size_t r = 0;
  for (Element e : subset) {
    const std::size_t p = part_of_[e];
    if (!hit[p]) {
      hit[p] = 1;
      ++r;
    }
  }
  return r;
}

bool PartitionMatroid::base_polytope_contains(std::span<const double> x,
                                              const NumericPolicy& policy) const {
  if (x.size() != ground_size() || !finite_and_nonnegative(x, policy)) return false;
  double total = 0.0;
  for (const auto& part : parts_) {
    double s = 0.0;
    for (Element e : part) s += x[e];
    if (s > 1.0 + policy.polytope_tolerance) return false;
    total += s;
  }
  return std::abs(total - static_cast<double>(parts_.size())) <= policy.polytope_tolerance;
}

ExchangeBounds PartitionMatroid::exchange_bounds(std::span<const double> x, Element a,
                                                 Element b, const NumericPolicy& policy) const {
  ExchangeBounds bounds = box_bounds(x, a, b);
  if (part_of_[a] != part_of_[b]) {
    auto part_slack = [&](Element e) {
      double s = 0.0;
      for (Element f : parts_[part_of_[e]]) s += x[f];
      return 1.0 - s;
    };
    bounds.up = std::min(bounds.up, part_slack(a));
    bounds.down = std::min(bounds.down, part_slack(b));
  }
  return clamp_bounds(bounds, policy);
}

std::unique_ptr<Matroid> PartitionMatroid::reduce(const ElementSet& contract,
                                                  const ElementSet& remove,
                                                  ElementSet& kept) const {
  std::vector<char> part_used(parts_.size(), 0);
  for (Element e : contract) part_used[part_of_[e]] = 1;
  std::vector<ElementSet> surviving;
  kept.clear();
  for (std::size_t p = 0; p < parts_.size(); ++p) {
    if (part_used[p]) continue;
    ElementSet rest;
    for (Element e : parts_[p])
      if (!std::binary_search(remove.begin(), remove.end(), e)) rest.push_back(e);
    if (rest.empty()) continue;
    kept.insert(kept.end(), rest.begin(), rest.end());
    surviving.push_back(std::move(rest));
  }
  std::sort(kept.begin(), kept.end());
  for (auto& part : surviving) {
    for (Element& e : part) {
      e = static_cast<Element>(std::lower_bound(kept.begin(), kept.end(), e) - kept.begin());
    }
  }
  return std::make_unique<PartitionMatroid>(std::move(surviving));
}

// Graphic ------------------------------------------------------------------

GraphicMatroid::GraphicMatroid(std::size_t num_nodes, std::vector<Edge> edges)
    : Matroid(edges.size()), num_nodes_(num_nodes), edges_(std::move(edges)) {
  for (const auto& [u, v] : edges_) {
    if (u >= num_nodes_ || v >= num_nodes_) {
      throw Error(ErrorCode::kInvalidMatroid, "edge endpoint out of range");
    }
  }
}

std::size_t GraphicMatroid::rank(std::span<const Element> subset) const {
  DisjointSets dsu(num_nodes_);
  std::size_t r = 0;
  for (Element e : subset) {
    if (dsu.unite(edges_[e].first, edges_[e].second)) ++r;
  }
  return r;
}

std::unique_ptr<Matroid> GraphicMatroid::reduce(const ElementSet& contract,
                                                const ElementSet& remove,
                                                ElementSet& kept) const {
  DisjointSets dsu(num_nodes_);
  for (Element e : contract) dsu.unite(edges_[e].first, edges_[e].second);
  std::vector<std::size_t> label(num_nodes_, kNotKept);
  std::size_t next = 0;
  for (std::size_t v = 0; v < num_nodes_; ++v) {
    const std::size_t root = dsu.find(v);
    if (label[root] == kNotKept) label[root] = next++;
  }
  kept.clear();
  std::vector<Edge> reduced_edges;
  for (Element e = 0; e < ground_size(); ++e) {
    if (std::binary_search(contract.begin(), contract.end(), e) ||
        std::binary_search(remove.begin(), remove.end(), e)) {
      continue;
    }
    const std::size_t u = label[dsu.find(edges_[e].first)];
    const std::size_t v = label[dsu.find(edges_[e].second)];
    if (u == v) continue;  // loop in the minor
    kept.push_back(e);
    reduced_edges.emplace_back(u, v);
  }
  return std::make_unique<GraphicMatroid>(std::max<std::size_t>(next, 1), std::move(reduced_edges));
}

// Explicit -----------------------------------------------------------------

ExplicitMatroid::ExplicitMatroid(std::size_t ground_size, std::vector<ElementSet> bases)
    : Matroid(ground_size) {
  if (ground_size > 64) throw Error(ErrorCode::kInvalidMatroid, "explicit matroids support at most 64 elements");
  if (bases.empty()) throw Error(ErrorCode::kInvalidMatroid, "explicit matroid needs at least one base");
  std::set<ElementSet> unique;
  for (ElementSet& b : bases) {
    const std::size_t listed = b.size();
    b = normalized(std::move(b));
    if (b.size() != listed) throw Error(ErrorCode::kInvalidMatroid, "base lists an element twice");
    if (!b.empty() && b.back() >= ground_size) throw Error(ErrorCode::kInvalidMatroid, "base element out of range");
    if (b.size() != bases.front().size()) throw Error(ErrorCode::kInvalidMatroid, "bases differ in size");
    unique.insert(b);
  }
  bases_.assign(unique.begin(), unique.end());
  for (const ElementSet& b : bases_) masks_.push_back(mask_of(b));

  if (ground_size <= 10) {
    const std::set<std::uint64_t> lookup(masks_.begin(), masks_.end());
    for (std::uint64_t b1 : masks_) {
      for (std::uint64_t b2 : masks_) {
        for (std::uint64_t out = b1 & ~b2; out != 0; out &= out - 1) {
          const std::uint64_t x = out & (~out + 1);
          bool exchanged = false;
          for (std::uint64_t in = b2 & ~b1; in != 0 && !exchanged; in &= in - 1) {
            const std::uint64_t y = in & (~in + 1);
            exchanged = lookup.count((b1 & ~x) | y) > 0;
          }
          if (!exchanged) throw Error(ErrorCode::kInvalidMatroid, "bases violate the exchange axiom");
        }
      }
    }
    verified_ = true;
  }
}

std::size_t ExplicitMatroid::rank(std::span<const Element> subset) const {
  const std::uint64_t u = mask_of(subset);
  int best = 0;
  for (std::uint64_t b : masks_) best = std::max(best, std::popcount(u & b));
  return static_cast<std::size_t>(best);
}

std::unique_ptr<Matroid> ExplicitMatroid::reduce(const ElementSet& contract,
                                                 const ElementSet& remove,
                                                 ElementSet& kept) const {
  const std::uint64_t s = mask_of(contract);
  const std::uint64_t l = mask_of(remove);
  std::vector<std::uint64_t> selected;
  std::uint64_t support = 0;
  for (std::uint64_t b : masks_) {
    if ((b & s) == s && (b & l) == 0) {
      selected.push_back(b & ~s);
      support |= b & ~s;
    }
  }
  kept.clear();
  for (Element e = 0; e < ground_size(); ++e)
    if (support >> e & 1U) kept.push_back(e);
  std::vector<ElementSet> reduced_bases;
  for (std::uint64_t b : selected) {
    ElementSet rb;
    for (std::size_t j = 0; j < kept.size(); ++j)
      if (b >> kept[j] & 1U) rb.push_back(j);
    reduced_bases.push_back(std::move(rb));
  }
  if (reduced_bases.empty()) reduced_bases.emplace_back();
  return std::make_unique<ExplicitMatroid>(kept.size(), std::move(reduced_bases));
}

// Free functions -----------------------------------------------------------

ElementSet greedy_max_weight_base(const Matroid& m, std::span<const double> weights) {
  const std::size_t n = m.ground_size();
  if (weights.size() != n) throw Error(ErrorCode::kInvalidArgument, "weight vector size mismatch");
  std::vector<Element> order(n);
  std::iota(order.begin(), order.end(), Element{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Element i, Element j) { return weights[i] > weights[j]; });
  const std::size_t target = m.full_rank();
  ElementSet chosen;
  for (Element e : order) {
    if (chosen.size() == target) break;
    ElementSet trial = chosen;
    trial.insert(std::upper_bound(trial.begin(), trial.end(), e), e);
    if (m.is_independent(trial)) chosen = std::move(trial);
  }
  return chosen;
}

bool polytope_member(const Matroid& m, std::span<const double> x, const NumericPolicy& policy) {
  return m.base_polytope_contains(x, policy);
}

bool is_integral(std::span<const double> x, const NumericPolicy& policy) {
  return std::all_of(x.begin(), x.end(), [&](double v) {
    return std::abs(v) <= policy.integrality_tolerance ||
           std::abs(v - 1.0) <= policy.integrality_tolerance;
  });
}

namespace {
bool is_fractional(double v, const NumericPolicy& policy) {
  return v > policy.integrality_tolerance && v < 1.0 - policy.integrality_tolerance;
}
}  // namespace

ExchangeBounds pipage_step_bounds(const Matroid& m, std::span<const double> x, Element a,
                                  Element b, const NumericPolicy& policy) {
  if (a == b || a >= m.ground_size() || b >= m.ground_size()) {
    throw Error(ErrorCode::kInvalidArgument, "pipage pair must be two distinct elements");
  }
  if (!is_fractional(x[a], policy) || !is_fractional(x[b], policy)) {
    throw Error(ErrorCode::kNothingToRound, "pipage pair has an integral coordinate");
  }
  return m.exchange_bounds(x, a, b, policy);
}

std::optional<std::pair<Element, Element>> find_fractional_pair(const Matroid& m,
                                                                std::span<const double> x,
                                                                const NumericPolicy& policy) {
  ElementSet fractional;
  for (Element e = 0; e < x.size(); ++e)
    if (is_fractional(x[e], policy)) fractional.push_back(e);
  if (fractional.empty()) return std::nullopt;
  for (std::size_t i = 0; i < fractional.size(); ++i) {
    for (std::size_t j = i + 1; j < fractional.size(); ++j) {
      const ExchangeBounds b = m.exchange_bounds(x, fractional[i], fractional[j], policy);
      if (b.down > 0.0 && b.up > 0.0) return std::make_pair(fractional[i], fractional[j]);
    }
  }
  throw Error(ErrorCode::kInternalInvariantViolation,
              "fractional point admits no exchange direction; is it in the base polytope?");
}

std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::uint64_t num = n - k + i;
    if (result > std::numeric_limits<std::uint64_t>::max() / num) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    result = result * num / i;
  }
  return result;
}

void for_each_base(const Matroid& m, const std::function<bool(const ElementSet&)>& visit,
                   std::uint64_t limit) {
  const std::size_t n = m.ground_size();
  const std::size_t r = m.full_rank();
  if (binomial(n, r) > limit) {
    throw Error(ErrorCode::kTooLarge, "too many candidate bases to enumerate");
  }
  ElementSet combo(r);
  std::iota(combo.begin(), combo.end(), Element{0});
  while (true) {
    if (m.is_independent(combo) && !visit(combo)) return;
    // advance to the next r-combination in lexicographic order
    std::size_t i = r;
    while (i > 0 && combo[i - 1] == n - r + i - 1) --i;
    if (i == 0) return;
    ++combo[i - 1];
    for (std::size_t j = i; j < r; ++j) combo[j] = combo[j - 1] + 1;
  }
}

ElementSet indicator_support(std::span<const double> x, const NumericPolicy& policy) {
  ElementSet support;
  for (Element e = 0; e < x.size(); ++e)
    if (x[e] > 1.0 - policy.integrality_tolerance) support.push_back(e);
  return support;
}

Vector indicator(std::size_t n, std::span<const Element> set) {
  Vector x(n, 0.0);
  for (Element e : set) x[e] = 1.0;
  return x;
}

// MatroidMinor -------------------------------------------------------------

MatroidMinor::MatroidMinor(std::shared_ptr<const Matroid> base, ElementSet contracted,
                           ElementSet deleted)
    : base_(std::move(base)),
      contracted_(normalized(std::move(contracted))),
      deleted_(normalized(std::move(deleted))) {
  const std::size_t n = base_->ground_size();
  for (const ElementSet* s : {&contracted_, &deleted_}) {
    if (!s->empty() && s->back() >= n) throw Error(ErrorCode::kInvalidArgument, "minor element out of range");
  }
  for (Element e : contracted_) {
    if (std::binary_search(deleted_.begin(), deleted_.end(), e)) {
      throw Error(ErrorCode::kInvalidArgument, "contracted and deleted sets overlap");
    }
  }
  if (!base_->is_independent(contracted_)) {
    throw Error(ErrorCode::kDependentContraction, "contracted set is dependent");
  }
  ElementSet survivors;
  for (Element e = 0; e < n; ++e)
    if (!std::binary_search(deleted_.begin(), deleted_.end(), e)) survivors.push_back(e);
  feasible_ = base_->rank(survivors) == base_->full_rank();
  if (feasible_) {
    reduced_ = base_->reduce(contracted_, deleted_, kept_);
    if (reduced_->full_rank() + contracted_.size() != base_->full_rank()) {
      throw Error(ErrorCode::kInternalInvariantViolation, "minor rank does not match contraction");
    }
  } else {
    kept_.clear();
    reduced_ = std::make_unique<UniformMatroid>(0, 0);
  }
  reduced_index_.assign(n, kNotKept);
  for (std::size_t j = 0; j < kept_.size(); ++j) reduced_index_[kept_[j]] = j;
}

std::size_t MatroidMinor::rank(std::span<const Element> subset) const {
  ElementSet mapped;
  for (Element e : subset) {
    if (std::binary_search(contracted_.begin(), contracted_.end(), e) ||
        std::binary_search(deleted_.begin(), deleted_.end(), e)) {
      throw Error(ErrorCode::kInvalidArgument, "minor rank query touches a fixed element");
    }
    if (reduced_index_[e] != kNotKept) mapped.push_back(reduced_index_[e]);
  }
  std::sort(mapped.begin(), mapped.end());
  return reduced_->rank(mapped);
}

ElementSet MatroidMinor::lift(std::span<const Element> reduced_set) const {
  ElementSet out = contracted_;
  for (Element j : reduced_set) out.push_back(kept_[j]);
  std::sort(out.begin(), out.end());
  return out;
}

Vector MatroidMinor::restrict(std::span<const double> x_full) const {
  Vector out(kept_.size());
  for (std::size_t j = 0; j < kept_.size(); ++j) out[j] = x_full[kept_[j]];
  return out;
}

Vector MatroidMinor::extend(std::span<const double> x_reduced) const {
  Vector out(base_->ground_size(), 0.0);
  for (Element e : contracted_) out[e] = 1.0;
  for (std::size_t j = 0; j < kept_.size(); ++j) out[kept_[j]] = x_reduced[j];
  return out;
}

bool MatroidMinor::face_contains(std::span<const double> x_full,
                                 const NumericPolicy& policy) const {
  if (!feasible_ || x_full.size() != base_->ground_size()) return false;
  for (Element e = 0; e < x_full.size(); ++e) {
    if (std::binary_search(contracted_.begin(), contracted_.end(), e)) {
      if (std::abs(x_full[e] - 1.0) > policy.polytope_tolerance) return false;
    } else if (reduced_index_[e] == kNotKept) {
      if (std::abs(x_full[e]) > policy.polytope_tolerance) return false;
    }
  }
  return reduced_->base_polytope_contains(restrict(x_full), policy);
}

MatroidMinor minor(std::shared_ptr<const Matroid> m, ElementSet contract, ElementSet remove) {
  return MatroidMinor(std::move(m), std::move(contract), std::move(remove));
}

}  // namespace mineig
