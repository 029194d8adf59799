// Acceptance suite: one PASS/FAIL line per criterion. Criteria 4-8 are run
// twice and their CSV renderings compared for criterion 9.

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mec/algorithms.hpp"
#include "mec/convex_core.hpp"
#include "mec/latency.hpp"
#include "mec/perspective.hpp"
#include "mec/scenario.hpp"
#include "mec/sweep.hpp"
#include "oracles.hpp"

namespace {

using namespace mec;
using Clock = std::chrono::steady_clock;

constexpr double kSolverRelTol = 1e-6;

struct Outcome {
  bool pass = true;
  std::string detail;
  std::string csv;  // deterministic rendering for criterion 9
  double seconds = 0.0;
};

void report(int id, const Outcome& o) {
  std::printf("criterion %d: %s  %s [%.2f s]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
              o.seconds);
  std::fflush(stdout);
}

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

Instance seeded(std::size_t K, std::size_t L, std::uint64_t seed) {
  ScenarioConfig c;
  c.num_helpers = K;
  c.num_tasks = L;
  c.seed = seed;
  return generate_feasible_instance(c).instance;
}

Outcome criterion1() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> bits(1.0, 1e5), dur(1e-4, 1.0), stretch(1.0, 10.0);
  std::uniform_int_distribution<int> bw(10000, 1000000);
  int failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const double y = bits(rng), t1 = dur(rng);
    double t2 = t1 * stretch(rng);
    if (t2 == t1) t2 = std::nextafter(t1, 2.0 * t1);
    const double b = bw(rng);
    if (!(perspective_eval(y, t2, b).value < perspective_eval(y, t1, b).value)) ++failures;
  }
  Outcome o;
  o.seconds = since(t0);
  o.pass = failures == 0 && o.seconds < 1.0;
  o.detail = fmt::format("energy strictly decreasing in slot length: {} failures in 1000 triples",
                         failures);
  return o;
}

Outcome criterion2() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> bits(1.0, 1e5), bw(1e4, 1e6), ratio(0.05, 5.0);
  double worst_g = 0.0, worst_h = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double y = bits(rng), b = bw(rng);
    const double t = std::numbers::ln2 * y / (b * ratio(rng));
    const testing::FdErrors e = testing::finite_difference_errors(y, t, b);
    worst_g = std::max(worst_g, e.gradient);
    worst_h = std::max(worst_h, e.hessian);
  }
  Outcome o;
  o.seconds = since(t0);
  o.pass = worst_g <= 1e-5 && worst_h <= 1e-5 && o.seconds < 1.0;
  o.detail = fmt::format("worst relative error: gradient {:.2e}, hessian {:.2e}", worst_g, worst_h);
  return o;
}

Outcome criterion3() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(303);
  int pairs = 0, checks = 0, tries = 0;
  double worst = -std::numeric_limits<double>::infinity();
  std::vector<double> a, b;
  // Relaxed programs (the superset of the fixed ones) on small and
  // full-size instances, 200 pairs each.
  const std::vector<std::pair<std::size_t, std::size_t>> shapes = {
      {1, 1}, {2, 3}, {3, 5}, {5, 10}, {4, 8}};
  for (std::size_t s = 0; s < shapes.size(); ++s) {
    const Instance inst = seeded(shapes[s].first, shapes[s].second, s);
    const AllocationProgram ap = build_relaxed_program(inst);
    std::vector<double> mid(ap.start.size());
    for (int got = 0; got < 200 && tries < 1000000; ++tries) {
      if (!testing::sample_feasible_point(ap, rng, a) ||
          !testing::sample_feasible_point(ap, rng, b)) {
        continue;
      }
      for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (a[i] + b[i]);
      for (const auto& c : ap.program.energy) {
        const double gap = convex::energy_value(c, mid) -
                           0.5 * (convex::energy_value(c, a) + convex::energy_value(c, b));
        worst = std::max(worst, gap);
        ++checks;
      }
      ++got;
      ++pairs;
    }
  }
  Outcome o;
  o.seconds = since(t0);
  o.pass = pairs == 1000 && worst <= 1e-9 && o.seconds < 5.0;
  o.detail = fmt::format("{} pairs, {} constraint evaluations, worst midpoint excess {:.3e}", pairs,
                         checks, worst);
  return o;
}

Outcome criterion4() {
  const auto t0 = Clock::now();
  Outcome o;
  double worst = 0.0;
  std::ostringstream csv;
  csv << "seed,solver_s,grid_s\n";
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Instance inst = seeded(1, 1, seed);
    const ConvexSolveReport r = solve_fixed(inst, Assignment::all_on(0, 1, 2));
    const double grid = testing::grid_search_single_offload(inst);
    const double err = r.status == SolveStatus::kOptimal ? std::abs(r.objective - grid) / grid
                                                         : std::numeric_limits<double>::infinity();
    worst = std::max(worst, err);
    csv << fmt::format("{},{:.17g},{:.17g}\n", seed, r.objective, grid);
  }
  o.seconds = since(t0);
  o.pass = worst <= 1e-4 && o.seconds < 30.0;
  o.detail = fmt::format("10 single-offload instances, worst relative gap to grid {:.2e}", worst);
  o.csv = csv.str();
  return o;
}

bool schedule_consistent(const Instance& inst, const Solution& s) {
  if (!s.feasible || !s.assignment.is_binary()) return false;
  const ResourceAllocation t = tighten_schedule(s.assignment, s.allocation, inst);
  const double simulated = simulate_schedule(s.assignment, t, inst).total_latency;
  return std::abs(simulated - s.objective) <= kSolverRelTol * s.objective &&
         energy_audit(s.assignment, t, inst).ok;
}

// Criteria 5 and 6 share their solves.
std::pair<Outcome, Outcome> criteria5and6() {
  const auto t0 = Clock::now();
  int lower = 0, upper = 0, consistent = 0, sufficient = 0;
  std::ostringstream csv;
  csv << "seed,relaxed_s,exhaustive_s,proposed_s\n";
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = seeded(2, 3, seed);
    if (sufficient_feasibility(inst).ok) ++sufficient;
    const Solution relaxed = relaxed_bound(inst);
    const Solution best = exhaustive(inst);
    const Solution proposed = algorithm1(inst);
    if (relaxed.feasible && best.feasible &&
        testing::rel_leq(relaxed.objective, best.objective, kSolverRelTol)) {
      ++lower;
    }
    if (best.feasible && proposed.feasible &&
        testing::rel_leq(best.objective, proposed.objective, kSolverRelTol)) {
      ++upper;
    }
    if (schedule_consistent(inst, best) && schedule_consistent(inst, proposed)) ++consistent;
    csv << fmt::format("{},{:.17g},{:.17g},{:.17g}\n", seed, relaxed.objective, best.objective,
                       proposed.objective);
  }
  const double seconds = since(t0);
  Outcome o5, o6;
  o5.seconds = seconds;
  o5.pass = sufficient == 20 && lower == 20 && upper == 20 && seconds < 300.0;
  o5.detail = fmt::format(
      "{}/20 instances pass the sufficient condition; relaxed <= exhaustive on {}/20, "
      "exhaustive <= proposed on {}/20",
      sufficient, lower, upper);
  o5.csv = csv.str();
  o6.seconds = 0.0;
  o6.pass = consistent == 20;
  o6.detail = fmt::format(
      "tightened schedules reproduce the objective with budgets met on {}/20 instances "
      "(exhaustive and proposed; runtime counted in criterion 5)",
      consistent);
  return {o5, o6};
}

std::string sweep_csv(const SweepResult& r) {
  std::ostringstream out;
  write_sweep_csv(out, r.rows);
  return out.str();
}

// mean[value][scheme] over feasible rows.
std::map<double, std::map<SchemeLabel, double>> means_of(const std::vector<SweepRow>& rows) {
  std::map<double, std::map<SchemeLabel, double>> out;
  for (const SchemeMean& m : summarize(rows)) out[m.value][m.scheme] = m.mean_objective;
  return out;
}

SweepSpec preset_spec(const char* name, std::vector<SchemeLabel> schemes) {
  const Preset p = *find_preset(name);
  SweepSpec spec;
  spec.config = p.config;
  spec.axis = p.axis;
  spec.values = p.values;
  spec.regenerate = p.regenerate;
  spec.schemes = std::move(schemes);
  for (std::uint64_t s = 0; s < 20; ++s) spec.seeds.push_back(s);
  spec.jobs = jobs();
  spec.timing = false;
  return spec;
}

Outcome criterion7() {
  const auto t0 = Clock::now();
  const SweepSpec spec =
      preset_spec("fig2", {SchemeLabel::kProposed, SchemeLabel::kHeuristic1,
                           SchemeLabel::kHeuristic2, SchemeLabel::kRandomSelection});
  const SweepResult r = run_sweep(spec);

  int mean_violations = 0;
  std::string mean_notes;
  for (const auto& [value, by_scheme] : means_of(r.rows)) {
    const double proposed = by_scheme.at(SchemeLabel::kProposed);
    for (const auto& [scheme, mean] : by_scheme) {
      if (scheme == SchemeLabel::kProposed) continue;
      if (!(std::isfinite(proposed) && testing::rel_leq(proposed, mean, kSolverRelTol))) {
        ++mean_violations;
        mean_notes += fmt::format(" [{} dB: proposed {:.6g} > {} {:.6g}]", value, proposed,
                                  to_string(scheme), mean);
      }
    }
  }

  // Per-seed objective of proposed along the energy axis.
  std::map<std::uint64_t, std::vector<double>> path;
  for (const SweepRow& row : r.rows) {
    if (row.scheme == SchemeLabel::kProposed) path[row.seed].push_back(row.objective);
  }
  int steps = 0, increases = 0;
  std::string increase_notes;
  for (const auto& [seed, objectives] : path) {
    for (std::size_t i = 1; i < objectives.size(); ++i) {
      ++steps;
      if (!testing::rel_leq(objectives[i], objectives[i - 1], kSolverRelTol)) {
        ++increases;
        if (increase_notes.size() < 400) {
          increase_notes += fmt::format(" [seed {} at {} dB: {:.6g} -> {:.6g}]", seed,
                                        spec.values[i], objectives[i - 1], objectives[i]);
        }
      }
    }
  }

  Outcome o;
  o.seconds = since(t0);
  o.pass = mean_violations == 0 && increases == 0 && o.seconds < 600.0;
  o.detail = fmt::format(
      "mean of proposed <= heuristic1/heuristic2/random_selection at {}/{} comparisons; "
      "per-seed proposed non-increasing in budget on {}/{} steps{}{}",
      3 * spec.values.size() - mean_violations, 3 * spec.values.size(), steps - increases, steps,
      mean_notes, increase_notes);
  o.csv = sweep_csv(r);
  return o;
}

Outcome criterion8() {
  const auto t0 = Clock::now();
  const std::vector<SchemeLabel> schemes = {
      SchemeLabel::kProposed,        SchemeLabel::kHeuristic1,   SchemeLabel::kHeuristic2,
      SchemeLabel::kRandomSelection, SchemeLabel::kRandomSearch, SchemeLabel::kLocalExecution};
  const SweepSpec spec = preset_spec("fig4", schemes);
  const SweepResult r = run_sweep(spec);
  const auto means = means_of(r.rows);

  int decreases = 0;
  std::string notes;
  for (SchemeLabel s : schemes) {
    double previous = -std::numeric_limits<double>::infinity();
    for (const auto& [value, by_scheme] : means) {
      const double m = by_scheme.at(s);
      if (!(m >= previous * (1.0 - kSolverRelTol))) {
        ++decreases;
        notes += fmt::format(" [{} L={}: {:.6g} < {:.6g}]", to_string(s), value, m, previous);
      }
      previous = m;
    }
  }
  const auto& last = means.rbegin()->second;
  const double proposed = last.at(SchemeLabel::kProposed);
  SchemeLabel best = SchemeLabel::kProposed;
  for (const auto& [scheme, mean] : last) {
    if (mean < last.at(best)) best = scheme;
  }
  const bool lowest = best == SchemeLabel::kProposed;

  Outcome o;
  o.seconds = since(t0);
  o.pass = decreases == 0 && lowest && o.seconds < 600.0;
  o.detail = fmt::format(
      "{} mean decreases in L across {} schemes{}; lowest mean at L=10 is {} "
      "(proposed {:.6g})",
      decreases, schemes.size(), notes, to_string(best), proposed);
  o.csv = sweep_csv(r);
  return o;
}

struct RunOutputs {
  std::vector<Outcome> outcomes;  // criteria 4..8
};

RunOutputs run_four_to_eight(bool print) {
  RunOutputs out;
  auto record = [&](int id, Outcome o) {
    if (print) report(id, o);
    out.outcomes.push_back(std::move(o));
  };
  record(4, criterion4());
  auto [c5, c6] = criteria5and6();
  record(5, std::move(c5));
  record(6, std::move(c6));
  record(7, criterion7());
  record(8, criterion8());
  return out;
}

}  // namespace

int main() {
  bool all = true;
  int id = 0;
  for (const Outcome& o : {criterion1(), criterion2(), criterion3()}) {
    report(++id, o);
    all = all && o.pass;
  }
  const RunOutputs first = run_four_to_eight(true);
  for (const Outcome& o : first.outcomes) all = all && o.pass;

  const auto t0 = Clock::now();
  const RunOutputs second = run_four_to_eight(false);
  int identical = 0;
  for (std::size_t i = 0; i < first.outcomes.size(); ++i) {
    if (first.outcomes[i].csv == second.outcomes[i].csv) ++identical;
  }
  Outcome o9;
  o9.seconds = since(t0);
  o9.pass = identical == static_cast<int>(first.outcomes.size());
  o9.detail = fmt::format("{}/{} CSV renderings of criteria 4-8 byte-identical on rerun", identical,
                          first.outcomes.size());
  report(9, o9);
  all = all && o9.pass;

  std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return all ? 0 : 1;
}
