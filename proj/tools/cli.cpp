#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <mutex>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "mineig/driver.hpp"
#include "mineig/error.hpp"
#include "mineig/fixtures.hpp"
#include "mineig/io.hpp"
#include "mineig/ks.hpp"
#include "mineig/local_search.hpp"
#include "mineig/relaxation.hpp"
#include "mineig/rounding.hpp"

namespace mineig::cli {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + out_path + "'");
  f << text;
}

ElementSet parse_index_list(const std::string& text, std::size_t n) {
  ElementSet out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size() || v < 1 || v > n) {
      throw UsageError("index '" + item + "' is not in 1.." + std::to_string(n));
    }
    out.push_back(v - 1);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Line-oriented side file shared by solver and estimator traces.
class TraceSink {
 public:
  explicit TraceSink(const std::string& path) {
    if (path.empty()) return;
    file_.open(path, std::ios::binary);
    if (!file_) throw UsageError("cannot write trace file '" + path + "'");
  }
  bool enabled() const { return file_.is_open(); }
  void write(const std::string& line) {
    const std::lock_guard lock(mutex_);
    file_ << line << '\n';
  }

 private:
  std::ofstream file_;
  std::mutex mutex_;
};

std::size_t default_threads() {
  if (const char* env = std::getenv("MINEIG_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return 1;
}

struct Common {
  std::string input;
  std::string out;
  std::string trace;
  std::string objective = "lambda-min";
  double epsilon = 0.5;
  double tolerance = kDefaultPolicy.relaxation_tolerance;
  std::size_t max_iters = static_cast<std::size_t>(kDefaultPolicy.relaxation_max_iterations);
};

void add_relaxation_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--tol", c.tolerance, "Relaxation tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iters", c.max_iters, "Relaxation iteration cap");
}

void add_objective_flag(CLI::App* cmd, Common& c) {
  cmd->add_option("--objective", c.objective, "lambda-min | det-root | neg-inv-norm:<p>");
}

void add_epsilon_flag(CLI::App* cmd, Common& c) {
  cmd->add_option("--epsilon", c.epsilon, "Accuracy parameter in (0, 1)")
      ->check(CLI::Range(0.0, 1.0));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimum-eigenvalue base selection under matroid constraints"};
  app.name("mineig");
  app.require_subcommand(1);

  Common c;
  std::optional<std::size_t> ell;
  std::size_t trials = 25;
  std::uint64_t seed = 0;
  std::size_t threads = default_threads();
  bool timing = false;
  bool brute = false;
  std::string seed_set;
  std::string point;
  std::string candidates;
  std::size_t max_swaps = 0;
  std::optional<double> ks_c;
  std::string fixtures_dir = "fixtures";

  auto* solve = app.add_subcommand("solve", "Enumerate seeds, relax and round; print the report");
  solve->add_option("instance", c.input, "Instance file")->required();
  add_objective_flag(solve, c);
  add_epsilon_flag(solve, c);
  solve->add_option("--ell", ell, "Seed size override");
  solve->add_option("--trials", trials, "Rounding trials per seed");
  solve->add_option("--seed", seed, "Master RNG seed");
  solve->add_option("--threads", threads, "Worker threads for the seed loop");
  solve->add_option("--out", c.out, "Write the report here instead of stdout");
  solve->add_option("--trace", c.trace, "Stream solver iterations as JSON lines to this file");
  solve->add_flag("--timing", timing, "Record wall time in the report");
  solve->add_flag("--brute", brute, "Also record the exhaustive optimum");
  add_relaxation_flags(solve, c);

  auto* relax = app.add_subcommand("relax", "Solve the relaxation for one seed set");
  relax->add_option("instance", c.input, "Instance file")->required();
  relax->add_option("--seed-set", seed_set, "Comma-separated 1-based seed indices");
  add_objective_flag(relax, c);
  add_epsilon_flag(relax, c);
  relax->add_option("--out", c.out, "Output file");
  relax->add_option("--trace", c.trace, "Solver trace file (JSON lines)");
  add_relaxation_flags(relax, c);

  auto* round = app.add_subcommand("round", "Round a fractional point to a base");
  round->add_option("instance", c.input, "Instance file")->required();
  round->add_option("--point", point, "File holding {\"x\": [...]}")->required();
  round->add_option("--seed", seed, "RNG seed");
  add_objective_flag(round, c);
  add_epsilon_flag(round, c);
  round->add_option("--out", c.out, "Output file");
  round->add_option("--trace", c.trace, "Estimator trace file (JSON lines)");

  auto* ls = app.add_subcommand("localsearch", "Determinant local search for a seed set");
  ls->add_option("instance", c.input, "Instance file")->required();
  add_epsilon_flag(ls, c);
  ls->add_option("--ell", ell, "Seed size override");
  ls->add_option("--candidates", candidates, "Comma-separated 1-based candidate indices (default all)");
  ls->add_option("--max-swaps", max_swaps, "Swap budget (default 10 |T| ell)");
  ls->add_option("--out", c.out, "Output file");

  auto* br = app.add_subcommand("brute", "Exhaustive optimum over all bases");
  br->add_option("instance", c.input, "Instance file")->required();
  add_objective_flag(br, c);
  br->add_option("--out", c.out, "Output file");

  auto* ks = app.add_subcommand("ks", "Split a unit decomposition into two balanced halves");
  ks->add_option("instance", c.input, "Unit-decomposition file")->required();
  ks->add_option("--c", ks_c, "Balance constant (overrides the file)");
  add_epsilon_flag(ks, c);
  ks->add_option("--ell", ell, "Seed size override");
  ks->add_option("--trials", trials, "Rounding trials per seed");
  ks->add_option("--seed", seed, "Master RNG seed");
  ks->add_option("--threads", threads, "Worker threads");
  ks->add_option("--out", c.out, "Output file");

  auto* fx = app.add_subcommand("fixtures", "Write the bundled fixture files");
  fx->add_option("dir", fixtures_dir, "Target directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  const Objective objective = Objective::parse(c.objective);
  const NumericPolicy& policy = kDefaultPolicy;
  RelaxationOptions relax_opts;
  relax_opts.tolerance = c.tolerance;
  relax_opts.max_iterations = c.max_iters;

  if (*fx) {
    std::filesystem::create_directories(fixtures_dir);
    for (const FixtureFile& f : bundled_fixtures()) {
      emit(f.contents, (std::filesystem::path(fixtures_dir) / f.file_name).string(), out);
      out << (std::filesystem::path(fixtures_dir) / f.file_name).string() << "\n";
    }
    return kExitOk;
  }

  if (*ks) {
    KSInstance inst = parse_ks_instance(read_file(c.input));
    if (ks_c) inst.c = *ks_c;
    SolveOptions opts;
    opts.objective = Objective::lambda_min();
    opts.epsilon = c.epsilon;
    opts.ell_override = ell;
    opts.trials_per_seed = trials;
    opts.rng_seed = seed;
    opts.threads = threads;
    const KSResult result = ks_solve(inst, opts, policy);
    emit(write_ks_result(result, inst), c.out, out);
    return result.certificate.passed ? kExitOk : kExitInfeasible;
  }

  const Instance instance = parse_instance(read_file(c.input));
  TraceSink trace(c.trace);

  if (*solve) {
    SolveOptions opts;
    opts.objective = objective;
    opts.epsilon = c.epsilon;
    opts.ell_override = ell;
    opts.trials_per_seed = trials;
    opts.rng_seed = seed;
    opts.threads = threads;
    opts.relaxation = relax_opts;
    if (trace.enabled()) {
      opts.solver_observer = [&](std::size_t idx, const IterationInfo& info) {
        trace.write(trace_line(idx, info));
      };
    }
    const auto start = std::chrono::steady_clock::now();
    SolveReport report = enumerate_and_solve(instance, opts, policy);
    if (brute) report.brute_force_value = brute_force_opt(instance, objective, policy).value;
    ReportExtras extras;
    extras.instance_hash = instance_hash(instance);
    if (timing) {
      extras.wall_time_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    emit(write_report(report, extras), c.out, out);
    return report.all_converged ? kExitOk : kExitNotConverged;
  }

  if (*relax) {
    const ElementSet s = parse_index_list(seed_set, instance.size());
    if (!instance.matroid->is_independent(s)) throw UsageError("seed set is dependent in the matroid");
    const SeedResult sr =
        make_seed(instance.vectors, s, leverage_threshold(instance.dim(), c.epsilon), policy);
    if (trace.enabled()) {
      relax_opts.observer = [&](const IterationInfo& info) { trace.write(trace_line(0, info)); };
    }
    const RelaxationSolution sol = solve_cp(instance, sr, objective, relax_opts, policy);
    emit(write_relaxation(sol, sr, objective), c.out, out);
    return sol.converged ? kExitOk : kExitNotConverged;
  }

  if (*round) {
    const Vector x = parse_point(read_file(point), instance.size());
    if (!polytope_member(*instance.matroid, x, policy)) {
      throw UsageError("point is not in the base polytope");
    }
    const MatroidMinor face(instance.matroid, {}, {});
    RoundingOptions ropts;
    ropts.objective = objective;
    ropts.epsilon = c.epsilon;
    ropts.relaxation_value = objective.value(instance.vectors.weighted_gram(x), policy);
    std::optional<PessimisticEstimator> estimator;
    const SymMatrix xm = instance.vectors.weighted_gram(x);
    if (trace.enabled() && PseudoInverse(xm, policy).invertible()) {
      const SymMatrix t = matrix_inverse_sqrt(xm, policy);
      std::vector<SymMatrix> mats;
      std::vector<Element> owner;
      for (Element i = 0; i < instance.size(); ++i) {
        if (x[i] <= 0.0) continue;
        mats.push_back(SymMatrix::outer(t.apply(instance.vectors[i])));
        owner.push_back(i);
      }
      estimator = PessimisticEstimator::at_point(std::move(mats), x, c.epsilon, std::move(owner));
      ropts.estimator = &*estimator;
    }
    const RoundingOutcome outcome =
        instance.matroid->kind() == MatroidKind::kPartition
            ? round_partition(instance, x, seed, ropts, policy)
            : round_pipage(instance, face, x, seed, ropts, policy);
    for (const EstimatorStep& s : outcome.estimator_trace) trace.write(trace_line(s));
    emit(write_rounding(outcome, objective), c.out, out);
    return kExitOk;
  }

  if (*ls) {
    SeedSearchConfig cfg = SeedSearchConfig::for_dimension(instance.dim(), c.epsilon);
    if (ell) cfg.ell = *ell;
    cfg.max_swaps = max_swaps;
    ElementSet cand;
    if (candidates.empty()) {
      for (Element i = 0; i < instance.size(); ++i) cand.push_back(i);
    } else {
      cand = parse_index_list(candidates, instance.size());
    }
    const SeedResult sr = local_search_seed(instance.vectors, cand, cfg, policy);
    emit(write_seed_result(sr, cfg), c.out, out);
    return kExitOk;
  }

  if (*br) {
    emit(write_brute_force(brute_force_opt(instance, objective, policy), objective), c.out, out);
    return kExitOk;
  }
  return kExitUsage;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return run(args, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::kInfeasible:
      case ErrorCode::kInfeasibleFace:
        return kExitInfeasible;
      case ErrorCode::kNotConverged:
        return kExitNotConverged;
      case ErrorCode::kInvalidArgument:
        return kExitUsage;
      default:
        return kExitFailure;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace mineig::cli
