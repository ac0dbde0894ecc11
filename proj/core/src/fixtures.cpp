#include "mineig/fixtures.hpp"

#include <cmath>

#include "mineig/driver.hpp"
#include "mineig/error.hpp"
#include "mineig/io.hpp"
#include "mineig/rng.hpp"

namespace mineig {
namespace {

std::vector<ElementSet> graphic_bases(std::size_t nodes, const std::vector<GraphicMatroid::Edge>& edges) {
  const GraphicMatroid g(nodes, edges);
  std::vector<ElementSet> bases;
  for_each_base(g, [&](const ElementSet& b) {
    bases.push_back(b);
    return true;
  });
  return bases;
}

std::shared_ptr<const Matroid> fixture_matroid(std::size_t d, MatroidKind kind) {
  const bool small = d == 2;
  switch (kind) {
    case MatroidKind::kUniform:
      return small ? std::make_shared<UniformMatroid>(7, 3) : std::make_shared<UniformMatroid>(9, 4);
    case MatroidKind::kPartition:
      if (small) return std::make_shared<PartitionMatroid>(std::vector<ElementSet>{{0, 1, 2}, {3, 4}, {5, 6, 7}});
      return std::make_shared<PartitionMatroid>(
          std::vector<ElementSet>{{0, 1, 2}, {3, 4}, {5, 6, 7}, {8, 9}});
    case MatroidKind::kGraphic:
      if (small) {
        return std::make_shared<GraphicMatroid>(
            4, std::vector<GraphicMatroid::Edge>{{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {1, 3}});
      }
      return std::make_shared<GraphicMatroid>(
          5, std::vector<GraphicMatroid::Edge>{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {0, 2}, {0, 3}, {1, 4}});
    case MatroidKind::kExplicit:
      if (small) {
        return std::make_shared<ExplicitMatroid>(
            5, graphic_bases(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}}));
      }
      return std::make_shared<ExplicitMatroid>(
          6, graphic_bases(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {0, 2}}));
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown matroid kind");
}

ElementSet random_base(const Matroid& m, Rng& rng) {
  Vector w(m.ground_size());
  for (double& x : w) x = rng.uniform();
  return greedy_max_weight_base(m, w);
}

// k rows of a k x d matrix with orthonormal columns (so their Gram is I).
std::vector<Vector> tight_rows(std::size_t k, std::size_t d, Rng& rng) {
  std::vector<Vector> cols(d, Vector(k));
  for (std::size_t c = 0; c < d; ++c) {
    while (true) {
      for (double& x : cols[c]) x = rng.normal();
      for (std::size_t p = 0; p < c; ++p) {
        const double proj = dot(cols[p], cols[c]);
        for (std::size_t r = 0; r < k; ++r) cols[c][r] -= proj * cols[p][r];
      }
      const double len = norm(cols[c]);
      if (len > 1e-6) {
        for (double& x : cols[c]) x /= len;
        break;
      }
    }
  }
  std::vector<Vector> rows(k, Vector(d));
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < d; ++c) rows[r][c] = cols[c][r];
  return rows;
}

std::string kind_label(MatroidKind kind) { return std::string(to_string(kind)); }

}  // namespace

Instance appendix_a_instance() {
  std::vector<Vector> v{{1, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  auto m = std::make_shared<ExplicitMatroid>(4, std::vector<ElementSet>{{0, 1, 2}, {0, 1, 3}});
  return make_instance(Vectorset(std::move(v)), std::move(m), "appendix-a");
}

Instance planted_instance(std::size_t d, MatroidKind kind, std::uint64_t seed) {
  if (d != 2 && d != 3) throw Error(ErrorCode::kInvalidArgument, "planted fixtures exist for d = 2 and 3");
  const auto matroid = fixture_matroid(d, kind);
  Rng rng(seed);
  const Objective obj = Objective::lambda_min();
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const ElementSet planted = random_base(*matroid, rng);
    const std::vector<Vector> rows = tight_rows(planted.size(), d, rng);
    std::vector<Vector> vectors(matroid->ground_size(), Vector(d));
    std::size_t next_row = 0;
    for (Element e = 0; e < vectors.size(); ++e) {
      if (std::binary_search(planted.begin(), planted.end(), e)) {
        vectors[e] = rows[next_row++];
      } else {
        for (double& x : vectors[e]) x = rng.normal() * 0.35 / std::sqrt(static_cast<double>(d));
      }
    }
    Instance inst = make_instance(Vectorset(vectors), matroid,
                                  "planted-d" + std::to_string(d) + "-" + kind_label(kind));
    double best = -1.0;
    double runner_up = -1.0;
    ElementSet arg;
    for_each_base(*matroid, [&](const ElementSet& b) {
      const double v = obj.value(inst.vectors.gram(b));
      if (v > best) {
        runner_up = best;
        best = v;
        arg = b;
      } else if (v > runner_up) {
        runner_up = v;
      }
      return true;
    });
    if (arg == planted && runner_up <= 0.95 * best) return inst;
  }
  throw Error(ErrorCode::kInternalInvariantViolation, "could not plant a unique optimum");
}

KSInstance planted_ks_fixture(std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  return planted_ks_instance(d, 2 * d + 2, 0.05, rng);
}

std::vector<FixtureFile> bundled_fixtures() {
  std::vector<FixtureFile> files;
  files.push_back({"appendix-a.json", write_instance(appendix_a_instance())});
  const MatroidKind kinds[] = {MatroidKind::kUniform, MatroidKind::kPartition, MatroidKind::kGraphic,
                               MatroidKind::kExplicit};
  for (std::size_t d : {2, 3}) {
    for (MatroidKind kind : kinds) {
      for (int i = 1; i <= 3; ++i) {
        const std::uint64_t seed = 1000 * d + 100 * static_cast<std::uint64_t>(kind) + static_cast<std::uint64_t>(i);
        Instance inst = planted_instance(d, kind, seed);
        inst.name += "-" + std::to_string(i);
        files.push_back({inst.name + ".json", write_instance(inst)});
      }
    }
  }
  for (std::size_t d : {1, 2, 3}) {
    const std::string name = "ks-d" + std::to_string(d);
    files.push_back({name + ".json", write_ks_instance(planted_ks_fixture(d, 7000 + d), name), true});
  }
  return files;
}

}  // namespace mineig
