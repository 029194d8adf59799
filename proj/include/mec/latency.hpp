#pragma once

#include <cstddef>
#include <vector>

#include "mec/model.hpp"

namespace mec {

// Engine-level equality tolerance: absolute plus relative.
inline constexpr double kEngineAbsTol = 1e-9;
inline constexpr double kEngineRelTol = 1e-9;

struct ComputeCost {
  double time = 0.0;
  double energy = 0.0;
};

// Local execution time and energy. Linear in the assignment, so fractional
// assignments are accepted.
ComputeCost local_compute(const Assignment& assignment, const Instance& instance);

// Execution time and energy at helper `helper` (0-based TDMA position).
ComputeCost remote_compute(const Assignment& assignment, std::size_t helper,
                           const Instance& instance);

double assigned_input_bits(const Assignment& assignment, std::size_t helper,
                           const Instance& instance);
double assigned_output_bits(const Assignment& assignment, std::size_t helper,
                            const Instance& instance);

// Transmit power needed to push `bits` through a slot of `duration` seconds.
// Zero bits need zero power regardless of duration. Throws
// std::invalid_argument when bits > 0 and duration <= 0.
double link_power(double bits, double duration, double gain, double bandwidth);

// duration * link_power; strictly decreasing in duration for bits > 0, with
// limit bits*ln2/(gain*bandwidth) as duration grows.
double link_energy(double bits, double duration, double gain, double bandwidth);

// Runs the TDMA max-recursion for a binary assignment. Throws
// std::invalid_argument naming the helper when a slot is inconsistent with
// its load (positive bits need a positive slot, empty links a zero slot).
ScheduleReport simulate_schedule(const Assignment& assignment, const ResourceAllocation& alloc,
                                 const Instance& instance);

// Stretches download slots so that every helper's waiting time is reached by
// its predecessor's download (no idle gaps in the download chain), and
// stretches the last download so the chain ends at max(t0c, i1 + sum t_dl).
// The returned i1 is the simulated start of the chain, so that the
// simulated total latency equals i1 + sum t_dl of the result. Throws
// std::invalid_argument if the input violates the timing or energy
// constraints.
ResourceAllocation tighten_schedule(const Assignment& assignment, const ResourceAllocation& alloc,
                                    const Instance& instance);

struct EnergyAudit {
  std::vector<double> node_energy;  // helpers then local
  bool ok = false;
};

EnergyAudit energy_audit(const Assignment& assignment, const ResourceAllocation& alloc,
                         const Instance& instance);

// Largest violation of the merged-recursion timing constraints (<= 0 means
// all hold). Used for precondition checks and by the tests.
double timing_violation(const Assignment& assignment, const ResourceAllocation& alloc,
                        const Instance& instance);

}  // namespace mec
