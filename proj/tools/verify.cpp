#include <fmt/format.h>

#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "mec/algorithms.hpp"
#include "mec/latency.hpp"
#include "mec/scenario.hpp"

namespace mec::cli {
namespace {

constexpr double kRelTol = 1e-6;

bool leq(double a, double b) { return a <= b + kRelTol * std::max(std::abs(a), std::abs(b)); }

Instance small_instance(std::uint64_t seed) {
  ScenarioConfig config;
  config.num_helpers = 2;
  config.num_tasks = 3;
  config.seed = seed;
  return generate_feasible_instance(config).instance;
}

bool schedule_consistent(const Instance& instance, const Solution& s) {
  if (!s.feasible) return false;
  const ResourceAllocation again = tighten_schedule(s.assignment, s.allocation, instance);
  const double simulated = simulate_schedule(s.assignment, again, instance).total_latency;
  return std::abs(simulated - s.objective) <= kRelTol * s.objective &&
         energy_audit(s.assignment, again, instance).ok;
}

bool same(const Solution& a, const Solution& b) {
  return a.assignment == b.assignment && a.allocation.t_off == b.allocation.t_off &&
         a.allocation.t_dl == b.allocation.t_dl && a.allocation.i1 == b.allocation.i1 &&
         a.objective == b.objective && a.feasible == b.feasible;
}

struct Check {
  std::string name;
  std::function<bool(std::uint64_t)> run;
};

}  // namespace

int run_verify(int seed_count, std::ostream& out) {
  const std::vector<Check> checks = {
      {"sandwich relaxed <= exhaustive <= proposed",
       [](std::uint64_t seed) {
         const Instance inst = small_instance(seed);
         const Solution relaxed = relaxed_bound(inst);
         const Solution best = exhaustive(inst);
         const Solution proposed = algorithm1(inst);
         return relaxed.feasible && best.feasible && proposed.feasible &&
                leq(relaxed.objective, best.objective) && leq(best.objective, proposed.objective);
       }},
      {"exhaustive <= every feasible baseline",
       [](std::uint64_t seed) {
         const Instance inst = small_instance(seed);
         const double best = exhaustive(inst).objective;
         for (const Solution& s : {heuristic_channel(inst), heuristic_compute(inst),
                                   random_selection(inst, seed), local_execution(inst)}) {
           if (s.feasible && !leq(best, s.objective)) return false;
         }
         return true;
       }},
      {"tightened schedule reproduces objective",
       [](std::uint64_t seed) {
         const Instance inst = small_instance(seed);
         return schedule_consistent(inst, algorithm1(inst)) &&
                schedule_consistent(inst, exhaustive(inst));
       }},
      {"optimum non-increasing in budget",
       [](std::uint64_t seed) {
         const Instance inst = small_instance(seed);
         double previous = exhaustive(inst).objective;
         for (double db : {-17.5, -15.0, -10.0}) {
           const double next = exhaustive(apply_axis(inst, SweepAxis::kEnergyDb, db)).objective;
           if (!leq(next, previous)) return false;
           previous = next;
         }
         return true;
       }},
      {"deterministic schemes and rounding",
       [](std::uint64_t seed) {
         const Instance inst = small_instance(seed);
         Eigen::MatrixXd tie(1, 3);
         tie << 0.5, 0.5, 0.0;
         Eigen::MatrixXd tie_local(1, 3);
         tie_local << 0.0, 0.5, 0.5;
         const bool rounding =
             round_assignment(Assignment(tie, AssignmentKind::kFractional)).nodes()[0] == 0 &&
             round_assignment(Assignment(tie_local, AssignmentKind::kFractional)).nodes()[0] == 1;
         return rounding && same(algorithm1(inst), algorithm1(inst)) &&
                same(random_selection(inst, seed), random_selection(inst, seed)) &&
                same(random_search(inst, seed, 20), random_search(inst, seed, 20));
       }},
  };

  out << fmt::format("{:<44} {:>6} {:>6}  {}\n", "check", "cases", "failed", "result");
  bool all = true;
  for (const Check& c : checks) {
    int failed = 0;
    for (int s = 0; s < seed_count; ++s) {
      if (!c.run(static_cast<std::uint64_t>(s))) ++failed;
    }
    all = all && failed == 0;
    out << fmt::format("{:<44} {:>6} {:>6}  {}\n", c.name, seed_count, failed,
                       failed == 0 ? "PASS" : "FAIL");
  }
  return all ? kOk : kCheckFailed;
}

}  // namespace mec::cli
