#include "cli.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mec/algorithms.hpp"
#include "mec/serialization.hpp"
#include "mec/sweep.hpp"

namespace mec::cli {
namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw std::invalid_argument(fmt::format("'{}' is not a number", s));
  return v;
}

std::uint64_t parse_seed(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw std::invalid_argument(fmt::format("'{}' is not a seed", s));
  }
  return std::stoull(s);
}

// "A..B" (inclusive) or "A,B,C".
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const std::uint64_t a = parse_seed(text.substr(0, dots));
    const std::uint64_t b = parse_seed(text.substr(dots + 2));
    if (b < a) throw std::invalid_argument(fmt::format("empty seed range '{}'", text));
    for (std::uint64_t s = a; s <= b; ++s) seeds.push_back(s);
  } else {
    for (const auto& part : split(text, ',')) seeds.push_back(parse_seed(part));
  }
  if (seeds.empty()) throw std::invalid_argument("no seeds given");
  return seeds;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument(fmt::format("cannot write '{}'", path));
  f << text;
}

struct SolveArgs {
  std::string instance;
  std::string scheme = "proposed";
  std::uint64_t seed = 0;
  int draws = kDefaultRandomDraws;
  std::size_t limit = kDefaultExhaustiveLimit;
  std::string out;
};

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  const Instance instance = instance_from_json(read_json_file(a.instance));
  SchemeOptions options;
  options.seed = a.seed;
  options.draws = a.draws;
  options.exhaustive_limit = a.limit;
  const SchemeLabel scheme = parse_scheme(a.scheme);
  const Solution sol = run_scheme(instance, scheme, options);
  const std::string doc = solution_to_json(sol, instance).dump(2) + "\n";
  const std::string summary =
      fmt::format("{}: status={} feasible={} objective={:.9g} s", to_string(sol.scheme),
                  to_string(sol.status), sol.feasible, sol.objective);
  if (a.out.empty()) {
    out << doc;
    err << summary << '\n';
  } else {
    write_text(a.out, doc);
    out << summary << '\n';
  }
  return sol.status == SolveStatus::kMaxIter ? kSolverMaxIter : kOk;
}

struct SweepArgs {
  std::string preset;
  std::string config;
  std::string axis;
  std::string values;
  std::string schemes =
      "proposed,heuristic1,heuristic2,random_selection,random_search,local_execution";
  std::string seeds = "0..19";
  int jobs = 1;
  int draws = kDefaultRandomDraws;
  std::string out;
  bool no_timing = false;
  bool no_regenerate = false;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  SweepSpec spec;
  if (!a.preset.empty()) {
    const auto preset = find_preset(a.preset);
    if (!preset) throw std::invalid_argument(fmt::format("unknown preset '{}'", a.preset));
    spec.config = preset->config;
    spec.axis = preset->axis;
    spec.values = preset->values;
    spec.regenerate = preset->regenerate;
  }
  if (!a.config.empty()) spec.config = config_from_json(read_json_file(a.config));
  if (!a.axis.empty()) spec.axis = parse_axis(a.axis);
  if (!a.values.empty()) {
    spec.values.clear();
    for (const auto& v : split(a.values, ',')) spec.values.push_back(parse_double(v));
  }
  if (spec.values.empty()) throw std::invalid_argument("no axis values: pass --values or --preset");
  for (const auto& s : split(a.schemes, ',')) spec.schemes.push_back(parse_scheme(s));
  spec.seeds = parse_seeds(a.seeds);
  spec.jobs = a.jobs;
  spec.timing = !a.no_timing;
  if (a.no_regenerate) spec.regenerate = false;
  spec.scheme_options.draws = a.draws;

  const SweepResult result = run_sweep(spec);
  std::ostringstream csv;
  write_sweep_csv(csv, result.rows);
  if (a.out.empty()) {
    out << csv.str();
    return kOk;
  }
  write_text(a.out, csv.str());
  int regenerated = 0;
  for (int r : result.regenerations) regenerated += r;
  out << fmt::format("{} rows written to {} ({} instance redraws)\n", result.rows.size(), a.out,
                     regenerated);
  out << fmt::format("{:<18} {:>12} {:>14} {:>9}\n", "scheme", to_string(spec.axis), "mean_s",
                     "feasible");
  for (const SchemeMean& m : summarize(result.rows)) {
    out << fmt::format("{:<18} {:>12} {:>14.6g} {:>5}/{:<3}\n", to_string(m.scheme), m.value,
                       m.mean_objective, m.feasible, m.total);
  }
  return kOk;
}

struct GenerateArgs {
  std::string config;
  std::string preset;
  std::uint64_t seed = 0;
  bool no_regenerate = false;
  std::string out;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  ScenarioConfig config;
  if (!a.preset.empty()) {
    const auto preset = find_preset(a.preset);
    if (!preset) throw std::invalid_argument(fmt::format("unknown preset '{}'", a.preset));
    config = preset->config;
  }
  if (!a.config.empty()) config = config_from_json(read_json_file(a.config));
  config.seed = a.seed;
  const Instance instance =
      a.no_regenerate ? generate_instance(config) : generate_feasible_instance(config).instance;
  const std::string doc = instance_to_json(instance).dump(2) + "\n";
  if (a.out.empty()) {
    out << doc;
  } else {
    write_text(a.out, doc);
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Task assignment and TDMA time/power allocation for multi-helper edge computing"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Run one scheme on an instance file");
  solve_cmd->add_option("--instance", solve.instance, "Instance JSON")->required();
  solve_cmd->add_option("--scheme", solve.scheme, "Scheme name")->capture_default_str();
  solve_cmd->add_option("--seed", solve.seed, "Seed for the random schemes")->capture_default_str();
  solve_cmd->add_option("--draws", solve.draws, "random_search draws")->capture_default_str();
  solve_cmd->add_option("--limit", solve.limit, "exhaustive enumeration limit")
      ->capture_default_str();
  solve_cmd->add_option("--out", solve.out, "Solution JSON path (default: stdout)");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run schemes over an axis and write CSV rows");
  sweep_cmd->add_option("--preset", sweep.preset, "fig2, fig3 or fig4");
  sweep_cmd->add_option("--config", sweep.config, "Scenario config JSON");
  sweep_cmd->add_option("--axis", sweep.axis, "energy_db, helper_freq or num_tasks");
  sweep_cmd->add_option("--values", sweep.values, "Comma-separated axis values");
  sweep_cmd->add_option("--schemes", sweep.schemes, "Comma-separated scheme names")
      ->capture_default_str();
  sweep_cmd->add_option("--seeds", sweep.seeds, "A..B or comma list")->capture_default_str();
  sweep_cmd->add_option("--jobs", sweep.jobs, "Worker threads")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--draws", sweep.draws, "random_search draws")->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out, "CSV path (default: stdout)");
  sweep_cmd->add_flag("--no-timing", sweep.no_timing, "Write wall_ms as 0");
  sweep_cmd->add_flag("--no-regenerate", sweep.no_regenerate,
                      "Keep instances that fail the sufficient feasibility check");

  int seed_count = 3;
  auto* verify_cmd = app.add_subcommand("verify", "Run the property suite on small instances");
  verify_cmd->add_option("--seed-count", seed_count, "Instances per check")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  GenerateArgs generate;
  auto* generate_cmd = app.add_subcommand("generate", "Draw an instance and write it as JSON");
  generate_cmd->add_option("--config", generate.config, "Scenario config JSON");
  generate_cmd->add_option("--preset", generate.preset, "Start from a preset's config");
  generate_cmd->add_option("--seed", generate.seed, "Seed")->capture_default_str();
  generate_cmd->add_flag("--no-regenerate", generate.no_regenerate,
                         "Keep the first draw even if it fails the sufficient feasibility check");
  generate_cmd->add_option("--out", generate.out, "Instance JSON path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInvalidInput;
  }

  try {
    if (*solve_cmd) return cmd_solve(solve, out, err);
    if (*sweep_cmd) return cmd_sweep(sweep, out);
    if (*verify_cmd) return run_verify(seed_count, out);
    if (*generate_cmd) return cmd_generate(generate, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
  return kInvalidInput;
}

}  // namespace mec::cli
