#include "mec/algorithms.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <tuple>

#include "mec/convex_core.hpp"
#include "mec/latency.hpp"

namespace mec {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Solution unsolved(const Assignment& assignment, std::size_t num_helpers, SchemeLabel scheme,
                  SolveStatus status, std::string message) {
  Solution s;
  s.assignment = assignment;
  s.allocation = ResourceAllocation::zeros(num_helpers);
  s.objective = kInf;
  s.feasible = false;
  s.scheme = scheme;
  s.status = status;
  s.message = std::move(message);
  return s;
}

// Energy each node needs beyond its budget when every link runs at its
// infinite-slot limit; the allocation problem is feasible iff all are < 0.
std::vector<double> budget_excess(const Instance& instance, const std::vector<std::size_t>& nodes) {
  const std::size_t K = instance.num_helpers();
  const double a = std::numbers::ln2 / instance.bandwidth;
  std::vector<double> need(K + 1, 0.0);
  for (std::size_t k = 0; k <= K; ++k) need[k] = -instance.node(k).energy_budget;
  for (std::size_t l = 0; l < nodes.size(); ++l) {
    const std::size_t k = nodes[l];
    const Node& node = instance.node(k);
    const Task& task = instance.tasks[l];
    need[k] +=
        node.kappa * node.cycles_per_bit[l] * task.input_bits * node.cpu_freq * node.cpu_freq;
    if (k < K) {
      need[K] += a * task.input_bits / instance.channels[k].uplink_gain;
      need[k] += a * task.output_bits / instance.channels[k].downlink_gain;
    }
  }
  return need;
}

// One repair step: move a single task so that the most over-budget node
// needs less. Prefers moves that leave the destination within budget, then
// the largest relaxed mass on the destination.
bool repair_step(const Instance& instance, const Assignment& relaxed,
                 std::vector<std::size_t>& nodes) {
  const std::size_t K = instance.num_helpers();
  const std::vector<double> need = budget_excess(instance, nodes);
  std::size_t worst = 0;
  for (std::size_t k = 1; k <= K; ++k) {
    if (need[k] > need[worst]) worst = k;
  }
  if (need[worst] < 0.0) return false;

  bool found = false;
  std::tuple<int, double, std::size_t, std::size_t> best_key;
  for (std::size_t l = 0; l < nodes.size(); ++l) {
    const std::size_t from = nodes[l];
    for (std::size_t to = 0; to <= K; ++to) {
      if (to == from) continue;
      nodes[l] = to;
      const std::vector<double> after = budget_excess(instance, nodes);
      nodes[l] = from;
      if (!(after[worst] < need[worst])) continue;
      const auto key = std::make_tuple(after[to] < 0.0 ? 0 : 1, -relaxed(l, to), l, to);
      if (!found || key < best_key) {
        best_key = key;
        found = true;
      }
    }
  }
  if (!found) return false;
  nodes[std::get<2>(best_key)] = std::get<3>(best_key);
  return true;
}

// Unbiased index in [0, n) from raw engine output.
std::size_t draw_index(std::mt19937_64& engine, std::size_t n) {
  const std::uint64_t range = static_cast<std::uint64_t>(n);
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t v = 0;
  do {
    v = engine();
  } while (v >= limit);
  return static_cast<std::size_t>(v % range);
}

std::vector<std::size_t> random_nodes(std::size_t num_tasks, std::size_t num_nodes,
                                      std::uint64_t seed, int attempt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(attempt)};
  std::mt19937_64 engine(seq);
  std::vector<std::size_t> nodes(num_tasks);
  for (auto& n : nodes) n = draw_index(engine, num_nodes);
  return nodes;
}

Solution random_selection_cached(const Instance& instance, std::uint64_t seed,
                                 const convex::BarrierOptions& options,
                                 std::map<std::vector<std::size_t>, Solution>& cache) {
  const std::size_t L = instance.num_tasks();
  const std::size_t nodes_count = instance.num_nodes();
  Solution last;
  for (int attempt = 0; attempt < kRandomSelectionAttempts; ++attempt) {
    const auto nodes = random_nodes(L, nodes_count, seed, attempt);
    auto it = cache.find(nodes);
    if (it == cache.end()) {
      it = cache
               .emplace(nodes,
                        evaluate_assignment(instance, Assignment::from_nodes(nodes, nodes_count),
                                            SchemeLabel::kRandomSelection, options))
               .first;
    }
    last = it->second;
    if (last.feasible) return last;
  }
  last.message = fmt::format("no feasible draw in {} attempts; last: {}", kRandomSelectionAttempts,
                             last.message);
  return last;
}

}  // namespace

Assignment round_assignment(const Assignment& fractional) {
  const std::size_t L = fractional.num_tasks();
  const std::size_t N = fractional.num_nodes();
  std::vector<std::size_t> nodes(L, 0);
  for (std::size_t l = 0; l < L; ++l) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < N; ++k) {
      if (fractional(l, k) > fractional(l, best)) best = k;
    }
    nodes[l] = best;
  }
  return Assignment::from_nodes(nodes, N);
}

Solution evaluate_assignment(const Instance& instance, const Assignment& assignment,
                             SchemeLabel scheme, const convex::BarrierOptions& options) {
  const ConvexSolveReport report = solve_fixed(instance, assignment, options);
  if (report.status != SolveStatus::kOptimal) {
    return unsolved(assignment, instance.num_helpers(), scheme, report.status, report.message);
  }
  Solution s;
  s.assignment = assignment;
  s.scheme = scheme;
  s.status = report.status;
  s.allocation = tighten_schedule(assignment, report.allocation, instance);
  const EnergyAudit audit = energy_audit(assignment, s.allocation, instance);
  s.node_energy = audit.node_energy;
  s.feasible = audit.ok;
  s.objective = simulate_schedule(assignment, s.allocation, instance).total_latency;
  if (!audit.ok) s.message = "energy audit failed after tightening";
  return s;
}

Solution relaxed_bound(const Instance& instance, const convex::BarrierOptions& options) {
  const ConvexSolveReport report = solve_relaxed(instance, options);
  if (report.status != SolveStatus::kOptimal) {
    return unsolved(report.assignment, instance.num_helpers(), SchemeLabel::kRelaxedBound,
                    report.status, report.message);
  }
  Solution s;
  s.assignment = report.assignment;
  s.allocation = report.allocation;
  s.objective = report.objective;
  s.scheme = SchemeLabel::kRelaxedBound;
  s.status = report.status;
  s.feasible = true;
  // Loads below the snapping threshold have zero slots and count as silent.
  const std::size_t K = instance.num_helpers();
  s.node_energy.assign(K + 1, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    const double in =
        report.allocation.t_off[k] > 0.0 ? assigned_input_bits(s.assignment, k, instance) : 0.0;
    const double out =
        report.allocation.t_dl[k] > 0.0 ? assigned_output_bits(s.assignment, k, instance) : 0.0;
    s.node_energy[K] += link_energy(in, report.allocation.t_off[k],
                                    instance.channels[k].uplink_gain, instance.bandwidth);
    s.node_energy[k] = remote_compute(s.assignment, k, instance).energy +
                       link_energy(out, report.allocation.t_dl[k],
                                   instance.channels[k].downlink_gain, instance.bandwidth);
  }
  s.node_energy[K] += local_compute(s.assignment, instance).energy;
  return s;
}

Solution algorithm1(const Instance& instance, const convex::BarrierOptions& options) {
  require_valid(instance);
  const ConvexSolveReport relaxed = solve_relaxed(instance, options);
  if (relaxed.status != SolveStatus::kOptimal) {
    return unsolved(relaxed.assignment, instance.num_helpers(), SchemeLabel::kProposed,
                    relaxed.status, fmt::format("relaxation: {}", relaxed.message));
  }
  const Assignment rounded = round_assignment(relaxed.assignment);
  Solution s = evaluate_assignment(instance, rounded, SchemeLabel::kProposed, options);
  if (s.feasible || s.status == SolveStatus::kMaxIter) return s;

  std::vector<std::size_t> nodes = rounded.nodes();
  const std::size_t max_moves = instance.num_tasks() * instance.num_helpers();
  for (std::size_t move = 1; move <= max_moves; ++move) {
    if (!repair_step(instance, relaxed.assignment, nodes)) break;
    s = evaluate_assignment(instance, Assignment::from_nodes(nodes, instance.num_nodes()),
                            SchemeLabel::kProposed, options);
    if (s.feasible) {
      s.message = fmt::format("rounded assignment repaired with {} move(s)", move);
      return s;
    }
  }
  s.message = fmt::format("repair could not restore feasibility: {}", s.message);
  return s;
}

Solution heuristic_channel(const Instance& instance, const convex::BarrierOptions& options) {
  require_valid(instance);
  std::size_t best = 0;
  double best_cost = kInf;
  for (std::size_t k = 0; k < instance.num_helpers(); ++k) {
    const Channel& c = instance.channels[k];
    const double cost = std::max(1.0 / c.uplink_gain, 1.0 / c.downlink_gain);
    if (cost < best_cost) {
      best_cost = cost;
      best = k;
    }
  }
  return evaluate_assignment(instance,
                             Assignment::all_on(best, instance.num_tasks(), instance.num_nodes()),
                             SchemeLabel::kHeuristic1, options);
}

Solution heuristic_compute(const Instance& instance, const convex::BarrierOptions& options) {
  require_valid(instance);
  std::vector<std::size_t> nodes(instance.num_tasks(), 0);
  for (std::size_t l = 0; l < instance.num_tasks(); ++l) {
    double best_time = kInf;
    for (std::size_t k = 0; k < instance.num_helpers(); ++k) {
      const Node& h = instance.helpers[k];
      const double time = h.cycles_per_bit[l] * instance.tasks[l].input_bits / h.cpu_freq;
      if (time < best_time) {
        best_time = time;
        nodes[l] = k;
      }
    }
  }
  return evaluate_assignment(instance, Assignment::from_nodes(nodes, instance.num_nodes()),
                             SchemeLabel::kHeuristic2, options);
}

Solution random_selection(const Instance& instance, std::uint64_t seed,
                          const convex::BarrierOptions& options) {
  require_valid(instance);
  std::map<std::vector<std::size_t>, Solution> cache;
  return random_selection_cached(instance, seed, options, cache);
}

Solution random_search(const Instance& instance, std::uint64_t seed, int draws,
                       const convex::BarrierOptions& options) {
  require_valid(instance);
  if (draws < 1) throw std::invalid_argument("random_search needs at least one draw");
  std::map<std::vector<std::size_t>, Solution> cache;
  Solution best;
  for (int d = 0; d < draws; ++d) {
    Solution s =
        random_selection_cached(instance, seed + static_cast<std::uint64_t>(d), options, cache);
    if (d == 0 || (s.feasible && (!best.feasible || s.objective < best.objective)))
      best = std::move(s);
  }
  best.scheme = SchemeLabel::kRandomSearch;
  return best;
}

Solution local_execution(const Instance& instance) {
  require_valid(instance);
  const std::size_t K = instance.num_helpers();
  Solution s;
  s.assignment =
      Assignment::all_on(instance.local_column(), instance.num_tasks(), instance.num_nodes());
  s.allocation = ResourceAllocation::zeros(K);
  s.scheme = SchemeLabel::kLocalExecution;
  const ComputeCost local = local_compute(s.assignment, instance);
  s.allocation.i1 = local.time;
  s.node_energy.assign(K + 1, 0.0);
  s.node_energy[K] = local.energy;
  s.feasible = local.energy <= instance.local.energy_budget;
  if (s.feasible) {
    s.objective = local.time;
    s.status = SolveStatus::kOptimal;
  } else {
    s.objective = kInf;
    s.status = SolveStatus::kInfeasible;
    s.message = fmt::format("local compute needs {:.6g} J but the budget is {:.6g} J", local.energy,
                            instance.local.energy_budget);
  }
  return s;
}

Solution exhaustive(const Instance& instance, std::size_t limit,
                    const convex::BarrierOptions& options) {
  require_valid(instance);
  const std::size_t L = instance.num_tasks();
  const std::size_t N = instance.num_nodes();
  std::size_t count = 1;
  for (std::size_t l = 0; l < L; ++l) {
    if (count > limit / N) {
      throw EnumerationLimit(fmt::format(
          "exhaustive search over {}^{} assignments exceeds the limit of {}", N, L, limit));
    }
    count *= N;
  }

  std::vector<std::size_t> nodes(L, 0);
  Solution best;
  bool have = false;
  for (std::size_t index = 0; index < count; ++index) {
    std::size_t rest = index;
    for (std::size_t l = L; l-- > 0;) {
      nodes[l] = rest % N;
      rest /= N;
    }
    Solution s = evaluate_assignment(instance, Assignment::from_nodes(nodes, N),
                                     SchemeLabel::kExhaustive, options);
    if (!have || (s.feasible && (!best.feasible || s.objective < best.objective))) {
      best = std::move(s);
      have = true;
    }
  }
  if (!best.feasible) best.message = "no assignment is feasible";
  return best;
}

Solution run_scheme(const Instance& instance, SchemeLabel scheme, const SchemeOptions& options) {
  switch (scheme) {
    case SchemeLabel::kProposed:
      return algorithm1(instance, options.barrier);
    case SchemeLabel::kHeuristic1:
      return heuristic_channel(instance, options.barrier);
    case SchemeLabel::kHeuristic2:
      return heuristic_compute(instance, options.barrier);
    case SchemeLabel::kRandomSelection:
      return random_selection(instance, options.seed, options.barrier);
    case SchemeLabel::kRandomSearch:
      return random_search(instance, options.seed, options.draws, options.barrier);
    case SchemeLabel::kLocalExecution:
      return local_execution(instance);
    case SchemeLabel::kExhaustive:
      return exhaustive(instance, options.exhaustive_limit, options.barrier);
    case SchemeLabel::kRelaxedBound:
      return relaxed_bound(instance, options.barrier);
  }
  throw std::invalid_argument("unknown scheme");
}

}  // namespace mec
