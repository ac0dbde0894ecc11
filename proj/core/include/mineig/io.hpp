#pragma once

// JSON documents: instance files, unit-decomposition files, fractional
// points, and result reports. Indices are 1-based in files. Output uses
// sorted keys and shortest round-trip decimals.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "mineig/driver.hpp"
#include "mineig/instance.hpp"
#include "mineig/ks.hpp"
#include "mineig/local_search.hpp"
#include "mineig/relaxation.hpp"
#include "mineig/rounding.hpp"

namespace mineig {

inline constexpr int kFormatVersion = 1;

// Throw ParseError with a JSON pointer to the offending value.
Instance parse_instance(std::string_view text);
std::string write_instance(const Instance& instance);

// 64-bit FNV-1a of write_instance(instance), as 16 hex digits.
std::string instance_hash(const Instance& instance);

// {"format_version":1,"d":d,"u":[[...],...],"c":c,"name":...}
KSInstance parse_ks_instance(std::string_view text);
std::string write_ks_instance(const KSInstance& ks, const std::string& name = {});

// {"x":[...]} with one coordinate per ground-set element.
Vector parse_point(std::string_view text, std::size_t n);

struct ReportExtras {
  std::string instance_hash;
  std::optional<double> wall_time_seconds;
};

std::string write_report(const SolveReport& report, const ReportExtras& extras = {});
SolveReport parse_report(std::string_view text, ReportExtras* extras = nullptr);

std::string write_relaxation(const RelaxationSolution& sol, const SeedResult& seed,
                             const Objective& objective);
std::string write_seed_result(const SeedResult& seed, const SeedSearchConfig& cfg);
std::string write_rounding(const RoundingOutcome& outcome, const Objective& objective);
std::string write_brute_force(const BruteForceResult& result, const Objective& objective);
std::string write_ks_result(const KSResult& result, const KSInstance& ks);

// JSON lines for --trace side files.
std::string trace_line(std::size_t seed_index, const IterationInfo& info);
std::string trace_line(const EstimatorStep& step);

}  // namespace mineig
