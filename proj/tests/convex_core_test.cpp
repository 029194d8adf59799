#include "mec/convex_core.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "mec/latency.hpp"
#include "mec/scenario.hpp"
#include "oracles.hpp"

namespace mec {
namespace {

using testing::make_instance;

Instance generated(std::size_t K, std::size_t L, std::uint64_t seed) {
  ScenarioConfig config;
  config.num_helpers = K;
  config.num_tasks = L;
  config.seed = seed;
  return generate_feasible_instance(config).instance;
}

Assignment on_nodes(const Instance& inst, std::vector<std::size_t> nodes) {
  return Assignment::from_nodes(nodes, inst.num_nodes());
}

TEST(SolveFixed, AllLocalCostsLocalComputeTime) {
  const Instance inst = generated(2, 4, 1);
  const Assignment a = Assignment::all_on(2, 4, 3);
  const ConvexSolveReport r = solve_fixed(inst, a);
  ASSERT_EQ(r.status, SolveStatus::kOptimal) << r.message;
  const double t0c = local_compute(a, inst).time;
  EXPECT_NEAR(r.objective, t0c, 1e-6 * t0c);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(r.allocation.t_off[k], 0.0);
    EXPECT_EQ(r.allocation.t_dl[k], 0.0);
  }
}

TEST(SolveFixed, SingleOffloadMatchesGridSearch) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Instance inst = generated(1, 1, seed);
    const ConvexSolveReport r = solve_fixed(inst, on_nodes(inst, {0}));
    ASSERT_EQ(r.status, SolveStatus::kOptimal) << r.message;
    const double grid = testing::grid_search_single_offload(inst);
    EXPECT_NEAR(r.objective, grid, 1e-4 * grid) << "seed " << seed;
  }
}

TEST(SolveFixed, SingleOffloadMatchesEnergyRoots) {
  // The two energy budgets bind separately, so the optimum is the sum of the
  // two slot roots plus the compute time.
  Instance inst = make_instance(1, 1);
  inst.local.energy_budget = 2e-3;
  inst.helpers[0].energy_budget = 1.5e-3;
  inst.channels[0] = Channel{20.0, 10.0};
  const ConvexSolveReport r = solve_fixed(inst, on_nodes(inst, {0}));
  ASSERT_EQ(r.status, SolveStatus::kOptimal) << r.message;
  const double tc = 500.0 * 5000.0 / 2e9;
  const double left = 1.5e-3 - 1e-28 * 500.0 * 5000.0 * 4e18;
  const double expected = testing::min_slot_for_energy(5000.0, 20.0, 312500.0, 2e-3) + tc +
                          testing::min_slot_for_energy(500.0, 10.0, 312500.0, left);
  EXPECT_NEAR(r.objective, expected, 1e-6 * expected);
}

TEST(SolveFixed, DoublingBudgetsNeverHurts) {
  const Instance inst = generated(2, 3, 4);
  Instance richer = inst;
  richer.local.energy_budget *= 2.0;
  for (auto& h : richer.helpers) h.energy_budget *= 2.0;
  for (const auto& nodes : testing::all_node_vectors(3, 3)) {
    const double base = solve_fixed(inst, on_nodes(inst, nodes)).objective;
    const double more = solve_fixed(richer, on_nodes(richer, nodes)).objective;
    EXPECT_TRUE(testing::rel_leq(more, base, 1e-6)) << more << " > " << base;
  }
}

TEST(SolveFixed, ReportsInfeasibleAssignments) {
  Instance inst = make_instance(1, 1);
  inst.helpers[0].energy_budget = 1e-6;  // below the compute energy alone
  const ConvexSolveReport r = solve_fixed(inst, on_nodes(inst, {0}));
  EXPECT_EQ(r.status, SolveStatus::kInfeasible);
  EXPECT_TRUE(std::isinf(r.objective));
  EXPECT_NE(r.message.find("helper 1"), std::string::npos) << r.message;
}

TEST(SolveFixed, RejectsFractionalOrMismatchedAssignments) {
  const Instance inst = make_instance(1, 1);
  Eigen::MatrixXd half(1, 2);
  half << 0.5, 0.5;
  EXPECT_THROW(solve_fixed(inst, Assignment(half, AssignmentKind::kFractional)),
               std::invalid_argument);
  EXPECT_THROW(solve_fixed(inst, Assignment::all_on(0, 2, 2)), std::invalid_argument);
}

TEST(SolveFixed, OptimalReportsMeetKktTolerance) {
  const Instance inst = generated(2, 3, 7);
  for (const auto& nodes : testing::all_node_vectors(3, 3)) {
    const ConvexSolveReport r = solve_fixed(inst, on_nodes(inst, nodes));
    ASSERT_EQ(r.status, SolveStatus::kOptimal) << r.message;
    EXPECT_LE(r.kkt_residual, 1e-7);
    EXPECT_LE(r.max_violation, 1e-8);
  }
}

TEST(SolveFixed, IsDeterministic) {
  const Instance inst = generated(2, 3, 2);
  const Assignment a = on_nodes(inst, {0, 1, 2});
  const ConvexSolveReport x = solve_fixed(inst, a);
  const ConvexSolveReport y = solve_fixed(inst, a);
  EXPECT_EQ(x.objective, y.objective);
  EXPECT_EQ(x.allocation.t_off, y.allocation.t_off);
  EXPECT_EQ(x.allocation.t_dl, y.allocation.t_dl);
}

TEST(SolveRelaxed, DominatedHelperKeepsTaskLocal) {
  Instance inst = make_instance(1, 1);
  inst.local.energy_budget = 1e-2;
  inst.helpers[0].cpu_freq = 1e8;
  inst.helpers[0].energy_budget = 1e-6;
  inst.channels[0] = Channel{1e-3, 1e-3};
  const ConvexSolveReport r = solve_relaxed(inst);
  ASSERT_EQ(r.status, SolveStatus::kOptimal) << r.message;
  EXPECT_GE(r.assignment(0, 1), 1.0 - 1e-5);
  const ConvexSolveReport local = solve_fixed(inst, on_nodes(inst, {1}));
  const ConvexSolveReport remote = solve_fixed(inst, on_nodes(inst, {0}));
  EXPECT_NE(remote.status, SolveStatus::kOptimal);
  EXPECT_NEAR(r.objective, local.objective, 1e-5 * local.objective);
  EXPECT_TRUE(testing::rel_leq(r.objective, local.objective, 1e-6));
}

TEST(SolveRelaxed, LowerBoundsEveryBinaryAssignment) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Instance inst = generated(2, 3, seed);
    const ConvexSolveReport r = solve_relaxed(inst);
    ASSERT_EQ(r.status, SolveStatus::kOptimal) << r.message;
    EXPECT_LE(r.assignment.max_row_sum_error(), 1e-9);
    for (const auto& nodes : testing::all_node_vectors(3, 3)) {
      const ConvexSolveReport f = solve_fixed(inst, on_nodes(inst, nodes));
      if (f.status != SolveStatus::kOptimal) continue;
      EXPECT_TRUE(testing::rel_leq(r.objective, f.objective, 1e-6))
          << "seed " << seed << ": " << r.objective << " > " << f.objective;
    }
  }
}

TEST(SolveRelaxed, IdenticalHelpersAreInterchangeable) {
  // With a single task both helpers face the same constraints once the other
  // one is idle, so swapping the columns keeps the objective.
  Instance inst = make_instance(2, 1);
  inst.local.energy_budget = 1e-3;
  const double first = solve_fixed(inst, on_nodes(inst, {0})).objective;
  const double second = solve_fixed(inst, on_nodes(inst, {1})).objective;
  EXPECT_NEAR(first, second, 1e-6 * first);
  const ConvexSolveReport relaxed = solve_relaxed(inst);
  ASSERT_EQ(relaxed.status, SolveStatus::kOptimal) << relaxed.message;
  EXPECT_TRUE(testing::rel_leq(relaxed.objective, first, 1e-6));
}

TEST(SufficientFeasibility, TwiceTheRightHandSides) {
  Instance inst = make_instance(1, 1);
  const double ln2b = std::numbers::ln2 / inst.bandwidth;
  const double local_rhs = 1e-28 * 500.0 * 5000.0 * 1e18 + ln2b * 5000.0 / 1e3;
  const double helper_rhs = 1e-28 * 500.0 * 5000.0 * 4e18 + ln2b * 500.0 / 1e3;
  inst.local.energy_budget = 2.0 * local_rhs;
  inst.helpers[0].energy_budget = 2.0 * helper_rhs;
  const FeasibilityCertificate c = sufficient_feasibility(inst);
  EXPECT_TRUE(c.ok);
  EXPECT_NEAR(c.local_margin, local_rhs, 1e-15);
  ASSERT_EQ(c.helper_margins.size(), 1u);
  EXPECT_NEAR(c.helper_margins[0], helper_rhs, 1e-15);
}

TEST(SufficientFeasibility, LocalComputeAloneExceedsBudget) {
  Instance inst = make_instance(2, 3);
  inst.local.energy_budget = 0.9 * 3.0 * 1e-28 * 500.0 * 5000.0 * 1e18;
  EXPECT_FALSE(sufficient_feasibility(inst).ok);
}

TEST(SufficientFeasibility, EmptyTasksAlwaysPass) {
  Instance inst = make_instance(3, 4);
  for (auto& t : inst.tasks) t = Task{0.0, 0.0};
  inst.local.energy_budget = 1e-30;
  for (auto& h : inst.helpers) h.energy_budget = 1e-30;
  EXPECT_TRUE(sufficient_feasibility(inst).ok);
}

TEST(RelaxedProgram, StartPointIsStrictlyFeasible) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Instance inst = generated(3, 5, seed);
    ASSERT_TRUE(sufficient_feasibility(inst).ok);
    const AllocationProgram ap = build_relaxed_program(inst);
    for (const auto& c : ap.program.linear) EXPECT_LT(c.expr.eval(ap.start), 0.0) << c.label;
    for (const auto& c : ap.program.energy) {
      EXPECT_LT(convex::energy_value(c, ap.start), 0.0) << c.label;
    }
    for (const auto& row : ap.pi_var) {
      for (int v : row) EXPECT_DOUBLE_EQ(ap.start[static_cast<std::size_t>(v)], 0.25);
    }
    EXPECT_EQ(convex::minimize_convex(ap.program, ap.start).phase_one_steps, 0);
  }
}

TEST(RelaxedProgram, EnergyConstraintsAreMidpointConvex) {
  std::mt19937_64 rng(17);
  const Instance inst = generated(2, 3, 3);
  const AllocationProgram ap = build_relaxed_program(inst);
  std::vector<double> a, b, mid(ap.start.size());
  int pairs = 0;
  while (pairs < 200) {
    if (!testing::sample_feasible_point(ap, rng, a) ||
        !testing::sample_feasible_point(ap, rng, b)) {
      continue;
    }
    for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (a[i] + b[i]);
    for (const auto& c : ap.program.energy) {
      const double gm = convex::energy_value(c, mid);
      EXPECT_LE(gm, 0.5 * (convex::energy_value(c, a) + convex::energy_value(c, b)) + 1e-9);
    }
    ++pairs;
  }
}

}  // namespace
}  // namespace mec
