#include "mec/latency.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace mec {
namespace {

void check_dimensions(const Assignment& assignment, const Instance& instance) {
  if (assignment.num_tasks() != instance.num_tasks() ||
      assignment.num_nodes() != instance.num_nodes()) {
    throw std::invalid_argument(fmt::format(
        "assignment is {}x{} but the instance has {} tasks and {} nodes", assignment.num_tasks(),
        assignment.num_nodes(), instance.num_tasks(), instance.num_nodes()));
  }
}

void check_allocation(const ResourceAllocation& alloc, const Instance& instance) {
  if (alloc.t_off.size() != instance.num_helpers() || alloc.t_dl.size() != instance.num_helpers()) {
    throw std::invalid_argument("allocation vectors must have one entry per helper");
  }
  if (!alloc.valid()) throw std::invalid_argument("allocation entries must be finite and >= 0");
}

// Cycles executed at `column` for the given assignment.
double assigned_cycles(const Assignment& assignment, std::size_t column, const Instance& instance) {
  const Node& node = instance.node(column);
  double cycles = 0.0;
  for (std::size_t l = 0; l < instance.num_tasks(); ++l) {
    cycles += assignment(l, column) * node.cycles_per_bit[l] * instance.tasks[l].input_bits;
  }
  return cycles;
}

ComputeCost compute_at(const Assignment& assignment, std::size_t column, const Instance& instance) {
  check_dimensions(assignment, instance);
  const Node& node = instance.node(column);
  const double cycles = assigned_cycles(assignment, column, instance);
  return {cycles / node.cpu_freq, node.kappa * cycles * node.cpu_freq * node.cpu_freq};
}

double tolerance_for(double scale) { return kEngineAbsTol + kEngineRelTol * std::abs(scale); }

}  // namespace

ComputeCost local_compute(const Assignment& assignment, const Instance& instance) {
  return compute_at(assignment, instance.local_column(), instance);
}

ComputeCost remote_compute(const Assignment& assignment, std::size_t helper,
                           const Instance& instance) {
  if (helper >= instance.num_helpers()) {
    throw std::out_of_range(fmt::format("helper index {} out of range", helper));
  }
  return compute_at(assignment, helper, instance);
}

double assigned_input_bits(const Assignment& assignment, std::size_t helper,
                           const Instance& instance) {
  double bits = 0.0;
  for (std::size_t l = 0; l < instance.num_tasks(); ++l) {
    bits += assignment(l, helper) * instance.tasks[l].input_bits;
  }
  return bits;
}

double assigned_output_bits(const Assignment& assignment, std::size_t helper,
                            const Instance& instance) {
  double bits = 0.0;
  for (std::size_t l = 0; l < instance.num_tasks(); ++l) {
    bits += assignment(l, helper) * instance.tasks[l].output_bits;
  }
  return bits;
}

double link_power(double bits, double duration, double gain, double bandwidth) {
  if (bits == 0.0) return 0.0;
  if (!(duration > 0.0)) {
    throw std::invalid_argument(
        fmt::format("sending {} bits in a slot of {} s needs infinite power", bits, duration));
  }
  // 2^{r/B} - 1 via expm1 keeps precision for long slots.
  return std::expm1(std::numbers::ln2 * bits / (duration * bandwidth)) / gain;
}

double link_energy(double bits, double duration, double gain, double bandwidth) {
  if (bits == 0.0) return 0.0;
  return duration * link_power(bits, duration, gain, bandwidth);
}

double timing_violation(const Assignment& assignment, const ResourceAllocation& alloc,
                        const Instance& instance) {
  const std::size_t K = instance.num_helpers();
  const double total_off = std::accumulate(alloc.t_off.begin(), alloc.t_off.end(), 0.0);
  const double total_dl = std::accumulate(alloc.t_dl.begin(), alloc.t_dl.end(), 0.0);
  double worst = total_off - alloc.i1;
  worst = std::max(worst, alloc.t_off[0] + remote_compute(assignment, 0, instance).time - alloc.i1);
  worst = std::max(worst, local_compute(assignment, instance).time - alloc.i1 - total_dl);
  double off_prefix = alloc.t_off[0];
  double dl_prefix = 0.0;
  for (std::size_t k = 1; k < K; ++k) {
    off_prefix += alloc.t_off[k];
    dl_prefix += alloc.t_dl[k - 1];
    const double tc = remote_compute(assignment, k, instance).time;
    worst = std::max(worst, tc + off_prefix - alloc.i1 - dl_prefix);
  }
  return worst;
}

ScheduleReport simulate_schedule(const Assignment& assignment, const ResourceAllocation& alloc,
                                 const Instance& instance) {
  check_dimensions(assignment, instance);
  check_allocation(alloc, instance);
  if (!assignment.is_binary()) {
    throw std::invalid_argument("simulate_schedule requires a binary assignment");
  }
  const std::size_t K = instance.num_helpers();
  for (std::size_t k = 0; k < K; ++k) {
    const bool has_in = assigned_input_bits(assignment, k, instance) > 0.0;
    const bool has_out = assigned_output_bits(assignment, k, instance) > 0.0;
    if (has_in != (alloc.t_off[k] > 0.0)) {
      throw std::invalid_argument(
          fmt::format("helper {}: offloading slot {} s inconsistent with its input load", k + 1,
                      alloc.t_off[k]));
    }
    if (has_out != (alloc.t_dl[k] > 0.0)) {
      throw std::invalid_argument(
          fmt::format("helper {}: downloading slot {} s inconsistent with its output load", k + 1,
                      alloc.t_dl[k]));
    }
  }

  ScheduleReport report;
  report.compute_time.assign(K + 1, 0.0);
  report.waiting.assign(K, 0.0);
  report.helper_compute_energy.assign(K, 0.0);
  report.helper_dl_energy.assign(K, 0.0);

  const ComputeCost local = local_compute(assignment, instance);
  report.compute_time[K] = local.time;
  report.local_energy = local.energy;

  for (std::size_t k = 0; k < K; ++k) {
    const ComputeCost remote = remote_compute(assignment, k, instance);
    report.compute_time[k] = remote.time;
    report.helper_compute_energy[k] = remote.energy;
    report.helper_dl_energy[k] =
        link_energy(assigned_output_bits(assignment, k, instance), alloc.t_dl[k],
                    instance.channels[k].downlink_gain, instance.bandwidth);
    report.offload_energy +=
        link_energy(assigned_input_bits(assignment, k, instance), alloc.t_off[k],
                    instance.channels[k].uplink_gain, instance.bandwidth);
  }

  const double total_off = std::accumulate(alloc.t_off.begin(), alloc.t_off.end(), 0.0);
  report.waiting[0] = std::max(alloc.t_off[0] + report.compute_time[0], total_off);
  double off_prefix = alloc.t_off[0];
  for (std::size_t k = 1; k < K; ++k) {
    off_prefix += alloc.t_off[k];
    report.waiting[k] =
        std::max(off_prefix + report.compute_time[k], report.waiting[k - 1] + alloc.t_dl[k - 1]);
  }
  report.completion = report.waiting[K - 1] + alloc.t_dl[K - 1];
  report.total_latency = std::max(local.time, report.completion);
  return report;
}

ResourceAllocation tighten_schedule(const Assignment& assignment, const ResourceAllocation& alloc,
                                    const Instance& instance) {
  check_dimensions(assignment, instance);
  check_allocation(alloc, instance);
  if (!assignment.is_binary()) {
    throw std::invalid_argument("tighten_schedule requires a binary assignment");
  }
  const std::size_t K = instance.num_helpers();
  const double total_dl = std::accumulate(alloc.t_dl.begin(), alloc.t_dl.end(), 0.0);
  const double objective = alloc.i1 + total_dl;
  const double violation = timing_violation(assignment, alloc, instance);
  if (violation > tolerance_for(objective)) {
    throw std::invalid_argument(
        fmt::format("allocation violates the timing constraints by {} s", violation));
  }
  const EnergyAudit audit = energy_audit(assignment, alloc, instance);
  if (!audit.ok) throw std::invalid_argument("allocation violates an energy budget");

  const double t0c = local_compute(assignment, instance).time;
  const double target = std::max(t0c, objective);

  std::vector<bool> has_slot(K);
  for (std::size_t k = 0; k < K; ++k) {
    has_slot[k] = assigned_output_bits(assignment, k, instance) > 0.0;
  }

  ResourceAllocation out = alloc;
  const double total_off = std::accumulate(alloc.t_off.begin(), alloc.t_off.end(), 0.0);
  double start = std::max(alloc.t_off[0] + remote_compute(assignment, 0, instance).time, total_off);
  double current = start;  // simulated waiting time of the helper being visited
  std::optional<std::size_t> last_slot;
  if (has_slot[0]) last_slot = 0;
  double off_prefix = alloc.t_off[0];
  for (std::size_t k = 1; k < K; ++k) {
    off_prefix += alloc.t_off[k];
    const double ready = off_prefix + remote_compute(assignment, k, instance).time;
    const double chained = current + out.t_dl[k - 1];
    if (ready > chained) {
      if (last_slot) {
        // Everything between the stretched slot and k has an empty download,
        // so shifting them keeps their waiting times reached by the chain.
        out.t_dl[*last_slot] += ready - chained;
      } else {
        // No download precedes k: the chain simply starts later.
        start = ready;
      }
      current = ready;
    } else {
      current = chained;
    }
    if (has_slot[k]) last_slot = k;
  }
  double new_total_dl = std::accumulate(out.t_dl.begin(), out.t_dl.end(), 0.0);
  const double finish = start + new_total_dl;
  if (finish < target) {
    if (last_slot) {
      out.t_dl[*last_slot] += target - finish;
      new_total_dl += target - finish;
    } else {
      start = target - new_total_dl;
    }
  }
  out.i1 = start;
  return out;
}

EnergyAudit energy_audit(const Assignment& assignment, const ResourceAllocation& alloc,
                         const Instance& instance) {
  check_dimensions(assignment, instance);
  check_allocation(alloc, instance);
  const std::size_t K = instance.num_helpers();
  EnergyAudit audit;
  audit.node_energy.assign(K + 1, 0.0);
  double offload = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    offload += link_energy(assigned_input_bits(assignment, k, instance), alloc.t_off[k],
                           instance.channels[k].uplink_gain, instance.bandwidth);
    audit.node_energy[k] = remote_compute(assignment, k, instance).energy +
                           link_energy(assigned_output_bits(assignment, k, instance), alloc.t_dl[k],
                                       instance.channels[k].downlink_gain, instance.bandwidth);
  }
  audit.node_energy[K] = local_compute(assignment, instance).energy + offload;
  audit.ok = true;
  for (std::size_t n = 0; n <= K; ++n) {
    if (!(audit.node_energy[n] <= instance.node(n).energy_budget + kEngineAbsTol)) audit.ok = false;
  }
  return audit;
}

}  // namespace mec
