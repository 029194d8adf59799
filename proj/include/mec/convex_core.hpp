#pragma once

#include <string>
#include <vector>

#include "mec/barrier.hpp"
#include "mec/model.hpp"

namespace mec {

struct ConvexSolveReport {
  ResourceAllocation allocation;
  Assignment assignment;     // echoed when fixed, optimised when relaxed
  double objective = 0.0;    // i1 + sum t_dl, seconds
  double duality_gap = 0.0;  // seconds; objective - gap lower-bounds the optimum
  double kkt_residual = 0.0;
  double max_violation = 0.0;  // scaled units
  int iterations = 0;
  int phase_one_iterations = 0;
  SolveStatus status = SolveStatus::kInfeasible;
  std::string message;
};

// Minimises i1 + sum t_dl over the TDMA slots for a fixed binary assignment,
// subject to the merged waiting-time constraints and all energy budgets.
ConvexSolveReport solve_fixed(const Instance& instance, const Assignment& assignment,
                              const convex::BarrierOptions& options = {});

// Same program with the assignment relaxed to the row simplex and optimised
// jointly; its optimum lower-bounds every binary assignment.
ConvexSolveReport solve_relaxed(const Instance& instance,
                                const convex::BarrierOptions& options = {});

struct FeasibilityCertificate {
  bool ok = false;
  double local_margin = 0.0;
  std::vector<double> helper_margins;
};

// Budgets large enough to run every task on every node and transmit every
// task over every link at the infinite-slot energy limit make any assignment
// feasible.
FeasibilityCertificate sufficient_feasibility(const Instance& instance);

// Program layout shared by the fixed and relaxed solves. Times are divided by
// `time_scale` and energies by `energy_scale`.
struct AllocationProgram {
  convex::ConvexProgram program;
  std::vector<double> start;
  std::vector<int> t_off_var;  // -1 when the slot is pinned to zero
  std::vector<int> t_dl_var;
  int i1_var = -1;
  std::vector<std::vector<int>> pi_var;  // [task][helper], relaxed only
  double time_scale = 1.0;
  double energy_scale = 1.0;
  std::string infeasible_reason;  // set when a fixed assignment is provably infeasible
};

AllocationProgram build_fixed_program(const Instance& instance, const Assignment& assignment);
AllocationProgram build_relaxed_program(const Instance& instance);

}  // namespace mec
