#include "mineig/io.hpp"

#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <set>

#include <json.hpp>

#include "mineig/error.hpp"

namespace mineig {
namespace {

using json = nlohmann::json;

std::string child(const std::string& ptr, std::string_view key) {
  std::string escaped;
  for (char ch : key) {
    if (ch == '~') {
      escaped += "~0";
    } else if (ch == '/') {
      escaped += "~1";
    } else {
      escaped += ch;
    }
  }
  return ptr + "/" + escaped;
}
std::string child(const std::string& ptr, std::size_t index) {
  return ptr + "/" + std::to_string(index);
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("malformed JSON: ") + e.what());
  }
}

void expect_object(const json& j, const std::string& ptr, std::initializer_list<std::string_view> required,
                   std::initializer_list<std::string_view> optional = {}) {
  if (!j.is_object()) throw ParseError(ptr, "expected an object");
  std::set<std::string_view> allowed(required);
  allowed.insert(optional.begin(), optional.end());
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ParseError(child(ptr, key), "unknown field '" + key + "'");
  }
  for (std::string_view key : required) {
    if (!j.contains(std::string(key))) {
      throw ParseError(child(ptr, key), "missing required field '" + std::string(key) + "'");
    }
  }
}

const json& at(const json& j, std::string_view key) { return j.at(std::string(key)); }

double get_number(const json& j, const std::string& ptr) {
  if (!j.is_number()) throw ParseError(ptr, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(ptr, "number is not finite");
  return v;
}

std::int64_t get_integer(const json& j, const std::string& ptr) {
  if (j.is_number_unsigned()) {
    const auto u = j.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(INT64_MAX)) throw ParseError(ptr, "integer out of range");
    return static_cast<std::int64_t>(u);
  }
  if (j.is_number_integer()) return j.get<std::int64_t>();
  throw ParseError(ptr, "expected an integer");
}

std::uint64_t get_unsigned(const json& j, const std::string& ptr) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  throw ParseError(ptr, "expected a non-negative integer");
}

std::string get_string(const json& j, const std::string& ptr) {
  if (!j.is_string()) throw ParseError(ptr, "expected a string");
  return j.get<std::string>();
}

bool get_bool(const json& j, const std::string& ptr) {
  if (!j.is_boolean()) throw ParseError(ptr, "expected a boolean");
  return j.get<bool>();
}

const json& get_array(const json& j, const std::string& ptr) {
  if (!j.is_array()) throw ParseError(ptr, "expected an array");
  return j;
}

// 1-based index in [1, n] -> 0-based.
Element get_index(const json& j, const std::string& ptr, std::size_t n) {
  const std::int64_t v = get_integer(j, ptr);
  if (v < 1 || static_cast<std::uint64_t>(v) > n) {
    throw ParseError(ptr, "index " + std::to_string(v) + " outside 1.." + std::to_string(n));
  }
  return static_cast<Element>(v - 1);
}

ElementSet get_index_set(const json& j, const std::string& ptr, std::size_t n) {
  get_array(j, ptr);
  ElementSet out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_index(j[i], child(ptr, i), n));
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw ParseError(ptr, "index listed twice");
  }
  return out;
}

Vector get_vector(const json& j, const std::string& ptr, std::size_t d) {
  get_array(j, ptr);
  if (j.size() != d) {
    throw ParseError(ptr, "expected " + std::to_string(d) + " entries, found " + std::to_string(j.size()));
  }
  Vector v(d);
  for (std::size_t k = 0; k < d; ++k) v[k] = get_number(j[k], child(ptr, k));
  return v;
}

std::vector<Vector> get_vectors(const json& j, const std::string& ptr, std::size_t d) {
  get_array(j, ptr);
  if (j.empty()) throw ParseError(ptr, "vector list is empty");
  std::vector<Vector> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_vector(j[i], child(ptr, i), d));
  return out;
}

std::size_t get_dimension(const json& j, const std::string& ptr) {
  const std::int64_t d = get_integer(j, ptr);
  if (d < 1) throw ParseError(ptr, "dimension must be positive");
  return static_cast<std::size_t>(d);
}

void check_version(const json& j, const std::string& ptr) {
  if (get_integer(j, ptr) != kFormatVersion) {
    throw ParseError(ptr, "unsupported format_version (expected " + std::to_string(kFormatVersion) + ")");
  }
}

json one_based(const ElementSet& s) {
  json a = json::array();
  for (Element e : s) a.push_back(e + 1);
  return a;
}

std::shared_ptr<const Matroid> parse_matroid(const json& j, const std::string& ptr, std::size_t n) {
  if (!j.is_object()) throw ParseError(ptr, "expected an object");
  if (!j.contains("type")) throw ParseError(child(ptr, "type"), "missing required field 'type'");
  const std::string type = get_string(at(j, "type"), child(ptr, "type"));
  try {
    if (type == "uniform") {
      expect_object(j, ptr, {"type", "rank"});
      const std::string p = child(ptr, "rank");
      const std::int64_t k = get_integer(at(j, "rank"), p);
      if (k < 0 || static_cast<std::uint64_t>(k) > n) throw ParseError(p, "rank outside 0..n");
      return std::make_shared<UniformMatroid>(n, static_cast<std::size_t>(k));
    }
    if (type == "partition") {
      expect_object(j, ptr, {"type", "parts"});
      const std::string p = child(ptr, "parts");
      const json& parts = get_array(at(j, "parts"), p);
      std::vector<ElementSet> out;
      std::vector<char> seen(n, 0);
      for (std::size_t i = 0; i < parts.size(); ++i) {
        ElementSet part = get_index_set(parts[i], child(p, i), n);
        if (part.empty()) throw ParseError(child(p, i), "part is empty");
        for (Element e : part) {
          if (seen[e]) throw ParseError(p, "element " + std::to_string(e + 1) + " belongs to two parts");
          seen[e] = 1;
        }
        out.push_back(std::move(part));
      }
      for (std::size_t e = 0; e < n; ++e) {
        if (!seen[e]) throw ParseError(p, "element " + std::to_string(e + 1) + " belongs to no part");
      }
      return std::make_shared<PartitionMatroid>(std::move(out));
    }
    if (type == "graphic") {
      expect_object(j, ptr, {"type", "num_nodes", "edges"});
      const std::string pn = child(ptr, "num_nodes");
      const std::int64_t nodes = get_integer(at(j, "num_nodes"), pn);
      if (nodes < 1) throw ParseError(pn, "graph needs at least one node");
      const std::string pe = child(ptr, "edges");
      const json& edges = get_array(at(j, "edges"), pe);
      if (edges.size() != n) throw ParseError(pe, "edge count must equal the vector count");
      std::vector<GraphicMatroid::Edge> out;
      for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string pi = child(pe, i);
        get_array(edges[i], pi);
        if (edges[i].size() != 2) throw ParseError(pi, "an edge has two endpoints");
        out.emplace_back(get_index(edges[i][0], child(pi, 0), static_cast<std::size_t>(nodes)),
                         get_index(edges[i][1], child(pi, 1), static_cast<std::size_t>(nodes)));
      }
      return std::make_shared<GraphicMatroid>(static_cast<std::size_t>(nodes), std::move(out));
    }
    if (type == "explicit") {
      expect_object(j, ptr, {"type", "bases"});
      const std::string p = child(ptr, "bases");
      const json& bases = get_array(at(j, "bases"), p);
      if (bases.empty()) throw ParseError(p, "at least one base is required");
      std::vector<ElementSet> out;
      for (std::size_t i = 0; i < bases.size(); ++i) out.push_back(get_index_set(bases[i], child(p, i), n));
      try {
        return std::make_shared<ExplicitMatroid>(n, std::move(out));
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        throw ParseError(p, e.what());
      }
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(ptr, e.what());
  }
  throw ParseError(child(ptr, "type"), "unknown matroid type '" + type + "'");
}

json matroid_json(const Matroid& m) {
  json j;
  j["type"] = std::string(to_string(m.kind()));
  switch (m.kind()) {
    case MatroidKind::kUniform:
      j["rank"] = static_cast<const UniformMatroid&>(m).rank_bound();
      break;
    case MatroidKind::kPartition: {
      json parts = json::array();
      for (const ElementSet& p : static_cast<const PartitionMatroid&>(m).parts()) parts.push_back(one_based(p));
      j["parts"] = std::move(parts);
      break;
    }
    case MatroidKind::kGraphic: {
      const auto& g = static_cast<const GraphicMatroid&>(m);
      j["num_nodes"] = g.num_nodes();
      json edges = json::array();
      for (const auto& [u, v] : g.edges()) edges.push_back({u + 1, v + 1});
      j["edges"] = std::move(edges);
      break;
    }
    case MatroidKind::kExplicit: {
      json bases = json::array();
      for (const ElementSet& b : static_cast<const ExplicitMatroid&>(m).bases()) bases.push_back(one_based(b));
      j["bases"] = std::move(bases);
      break;
    }
  }
  return j;
}

json vectors_json(const std::vector<Vector>& vs) {
  json a = json::array();
  for (const Vector& v : vs) a.push_back(v);
  return a;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json symmatrix_json(const SymMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < m.dim(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

json seed_record_json(const SeedRecord& r) {
  return {{"seed", one_based(r.seed)},
          {"long_set", one_based(r.long_set)},
          {"feasible", r.feasible},
          {"cp_value", r.cp_value},
          {"fw_gap", r.fw_gap},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"rounded_base", one_based(r.rounded_base)},
          {"rounded_value", r.rounded_value},
          {"success", r.success}};
}

ElementSet get_base_list(const json& j, const std::string& ptr) {
  get_array(j, ptr);
  ElementSet out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::int64_t v = get_integer(j[i], child(ptr, i));
    if (v < 1) throw ParseError(child(ptr, i), "indices are 1-based");
    out.push_back(static_cast<Element>(v - 1));
  }
  return out;
}

}  // namespace

Instance parse_instance(std::string_view text) {
  const json j = parse_json(text);
  expect_object(j, "", {"format_version", "d", "vectors", "matroid"}, {"name", "provenance"});
  check_version(at(j, "format_version"), "/format_version");
  const std::size_t d = get_dimension(at(j, "d"), "/d");
  std::vector<Vector> vectors = get_vectors(at(j, "vectors"), "/vectors", d);
  const std::size_t n = vectors.size();
  auto matroid = parse_matroid(at(j, "matroid"), "/matroid", n);
  std::string name = j.contains("name") ? get_string(at(j, "name"), "/name") : std::string{};
  std::string provenance =
      j.contains("provenance") ? get_string(at(j, "provenance"), "/provenance") : std::string{};
  return make_instance(Vectorset(std::move(vectors)), std::move(matroid), std::move(name),
                       std::move(provenance));
}

std::string write_instance(const Instance& instance) {
  json j;
  j["format_version"] = kFormatVersion;
  j["d"] = instance.dim();
  j["vectors"] = vectors_json(instance.vectors.vectors());
  j["matroid"] = matroid_json(*instance.matroid);
  if (!instance.name.empty()) j["name"] = instance.name;
  if (!instance.provenance.empty()) j["provenance"] = instance.provenance;
  return dump(j);
}

std::string instance_hash(const Instance& instance) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : write_instance(instance)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

KSInstance parse_ks_instance(std::string_view text) {
  const json j = parse_json(text);
  expect_object(j, "", {"format_version", "d", "u", "c"}, {"name"});
  check_version(at(j, "format_version"), "/format_version");
  const std::size_t d = get_dimension(at(j, "d"), "/d");
  std::vector<Vector> u = get_vectors(at(j, "u"), "/u", d);
  const double c = get_number(at(j, "c"), "/c");
  if (j.contains("name")) get_string(at(j, "name"), "/name");
  try {
    return make_ks_instance(std::move(u), c);
  } catch (const Error& e) {
    throw ParseError("/u", e.what());
  }
}

std::string write_ks_instance(const KSInstance& ks, const std::string& name) {
  json j;
  j["format_version"] = kFormatVersion;
  j["d"] = ks.dim();
  j["u"] = vectors_json(ks.u);
  j["c"] = ks.c;
  if (!name.empty()) j["name"] = name;
  return dump(j);
}

Vector parse_point(std::string_view text, std::size_t n) {
  const json j = parse_json(text);
  expect_object(j, "", {"x"});
  return get_vector(at(j, "x"), "/x", n);
}

std::string write_report(const SolveReport& report, const ReportExtras& extras) {
  json j;
  j["format_version"] = kFormatVersion;
  j["instance"] = {{"name", report.instance_name},
                   {"provenance", report.provenance},
                   {"hash", extras.instance_hash}};
  j["objective"] = report.objective;
  j["epsilon"] = report.epsilon;
  j["ell"] = {{"used", report.ell_used}, {"theoretical", report.ell_theoretical}};
  j["trials_per_seed"] = report.trials_per_seed;
  j["rng_seed"] = report.rng_seed;
  j["best_base"] = one_based(report.best_base);
  j["best_value"] = report.best_value;
  j["relaxation_value_at_best_seed"] = report.relaxation_value_at_best_seed;
  j["seeds_tried"] = report.seeds_tried;
  j["all_converged"] = report.all_converged;
  json records = json::array();
  for (const SeedRecord& r : report.per_seed) records.push_back(seed_record_json(r));
  j["per_seed"] = std::move(records);
  if (report.brute_force_value) j["brute_force_value"] = *report.brute_force_value;
  if (extras.wall_time_seconds) j["wall_time_seconds"] = *extras.wall_time_seconds;
  return dump(j);
}

SolveReport parse_report(std::string_view text, ReportExtras* extras) {
  const json j = parse_json(text);
  expect_object(j, "",
                {"format_version", "instance", "objective", "epsilon", "ell", "trials_per_seed",
                 "rng_seed", "best_base", "best_value", "relaxation_value_at_best_seed",
                 "seeds_tried", "all_converged", "per_seed"},
                {"brute_force_value", "wall_time_seconds"});
  check_version(at(j, "format_version"), "/format_version");
  SolveReport r;
  const json& inst = at(j, "instance");
  expect_object(inst, "/instance", {"name", "provenance", "hash"});
  r.instance_name = get_string(at(inst, "name"), "/instance/name");
  r.provenance = get_string(at(inst, "provenance"), "/instance/provenance");
  const std::string hash = get_string(at(inst, "hash"), "/instance/hash");
  r.objective = get_string(at(j, "objective"), "/objective");
  r.epsilon = get_number(at(j, "epsilon"), "/epsilon");
  const json& ell = at(j, "ell");
  expect_object(ell, "/ell", {"used", "theoretical"});
  r.ell_used = get_unsigned(at(ell, "used"), "/ell/used");
  r.ell_theoretical = get_unsigned(at(ell, "theoretical"), "/ell/theoretical");
  r.trials_per_seed = get_unsigned(at(j, "trials_per_seed"), "/trials_per_seed");
  r.rng_seed = get_unsigned(at(j, "rng_seed"), "/rng_seed");
  r.best_base = get_base_list(at(j, "best_base"), "/best_base");
  r.best_value = get_number(at(j, "best_value"), "/best_value");
  r.relaxation_value_at_best_seed =
      get_number(at(j, "relaxation_value_at_best_seed"), "/relaxation_value_at_best_seed");
  r.seeds_tried = get_unsigned(at(j, "seeds_tried"), "/seeds_tried");
  r.all_converged = get_bool(at(j, "all_converged"), "/all_converged");
  const json& records = get_array(at(j, "per_seed"), "/per_seed");
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::string p = child("/per_seed", i);
    const json& rec = records[i];
    expect_object(rec, p,
                  {"seed", "long_set", "feasible", "cp_value", "fw_gap", "iterations", "converged",
                   "rounded_base", "rounded_value", "success"});
    SeedRecord s;
    s.seed = get_base_list(at(rec, "seed"), child(p, "seed"));
    s.long_set = get_base_list(at(rec, "long_set"), child(p, "long_set"));
    s.feasible = get_bool(at(rec, "feasible"), child(p, "feasible"));
    s.cp_value = get_number(at(rec, "cp_value"), child(p, "cp_value"));
    s.fw_gap = get_number(at(rec, "fw_gap"), child(p, "fw_gap"));
    s.iterations = get_unsigned(at(rec, "iterations"), child(p, "iterations"));
    s.converged = get_bool(at(rec, "converged"), child(p, "converged"));
    s.rounded_base = get_base_list(at(rec, "rounded_base"), child(p, "rounded_base"));
    s.rounded_value = get_number(at(rec, "rounded_value"), child(p, "rounded_value"));
    s.success = get_bool(at(rec, "success"), child(p, "success"));
    r.per_seed.push_back(std::move(s));
  }
  if (j.contains("brute_force_value")) {
    r.brute_force_value = get_number(at(j, "brute_force_value"), "/brute_force_value");
  }
  if (extras != nullptr) {
    extras->instance_hash = hash;
    extras->wall_time_seconds.reset();
    if (j.contains("wall_time_seconds")) {
      extras->wall_time_seconds = get_number(at(j, "wall_time_seconds"), "/wall_time_seconds");
    }
  }
  return r;
}

std::string write_relaxation(const RelaxationSolution& sol, const SeedResult& seed,
                             const Objective& objective) {
  json j;
  j["objective"] = objective.name();
  j["seed"] = one_based(seed.seed);
  j["long_set"] = one_based(seed.long_set);
  j["x"] = sol.x_star;
  j["X"] = symmatrix_json(sol.X_star);
  j["value"] = sol.value;
  j["fw_gap"] = sol.fw_gap;
  j["iterations"] = sol.iterations;
  j["converged"] = sol.converged;
  j["beta"] = sol.beta;
  return dump(j);
}

std::string write_seed_result(const SeedResult& seed, const SeedSearchConfig& cfg) {
  json j;
  j["seed"] = one_based(seed.seed);
  j["A_S"] = symmatrix_json(seed.a_s);
  j["long_set"] = one_based(seed.long_set);
  j["swap_count"] = seed.swap_count;
  j["certified"] = seed.certified;
  j["status"] = std::string(to_string(seed.status));
  j["max_candidate_leverage"] = seed.max_candidate_leverage;
  j["log_det_trace"] = seed.log_det_trace;
  j["epsilon"] = cfg.epsilon;
  j["ell"] = cfg.ell;
  j["leverage_threshold"] = cfg.leverage_threshold;
  return dump(j);
}

std::string write_rounding(const RoundingOutcome& outcome, const Objective& objective) {
  json j;
  j["objective"] = objective.name();
  j["base"] = one_based(outcome.base);
  j["objective_value"] = outcome.objective_value;
  j["success"] = outcome.success;
  j["rng_seed"] = outcome.rng_seed;
  j["steps"] = outcome.steps;
  json trace = json::array();
  for (const EstimatorStep& s : outcome.estimator_trace) {
    trace.push_back({{"step", s.step}, {"g", s.g}, {"support_frac", s.support_frac}});
  }
  j["estimator_trace"] = std::move(trace);
  return dump(j);
}

std::string write_brute_force(const BruteForceResult& result, const Objective& objective) {
  json j;
  j["objective"] = objective.name();
  j["base"] = one_based(result.base);
  j["value"] = result.value;
  j["bases_examined"] = result.bases_examined;
  return dump(j);
}

std::string write_ks_result(const KSResult& result, const KSInstance& ks) {
  const KSCertificate& c = result.certificate;
  json j;
  j["t_prime"] = one_based(c.t_prime);
  j["alpha"] = ks.alpha;
  j["c"] = ks.c;
  j["epsilon"] = result.report.epsilon;
  j["certificate"] = {{"lambda_min", c.lambda_min},      {"lambda_max", c.lambda_max},
                      {"lower_bound", c.lower_bound},    {"upper_bound", c.upper_bound},
                      {"lifted_lambda_min", c.lifted_lambda_min}, {"passed", c.passed}};
  j["best_value"] = result.report.best_value;
  j["seeds_tried"] = result.report.seeds_tried;
  j["rng_seed"] = result.report.rng_seed;
  return dump(j);
}

std::string trace_line(std::size_t seed_index, const IterationInfo& info) {
  const json j = {{"kind", "frank_wolfe"},       {"seed_index", seed_index},
                  {"iteration", info.iteration}, {"beta", info.beta},
                  {"value", info.surrogate_value}, {"gap", info.gap},
                  {"step", info.step},           {"away", info.away_step}};
  return j.dump();
}

std::string trace_line(const EstimatorStep& step) {
  const json j = {{"step", step.step}, {"g", step.g}, {"support_frac", step.support_frac}};
  return j.dump();
}

}  // namespace mineig
