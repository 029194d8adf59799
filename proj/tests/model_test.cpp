#include "mec/model.hpp"

#include <gtest/gtest.h>

#include <stdexcept>
#include <vector>

#include "oracles.hpp"

namespace mec {
namespace {

using testing::make_instance;

TEST(ValidateInstance, WellFormedSingleTaskHasNoViolations) {
  EXPECT_TRUE(validate_instance(make_instance(1, 1)).empty());
}

TEST(ValidateInstance, ZeroBandwidthNamesTheField) {
  Instance inst = make_instance(1, 1);
  inst.bandwidth = 0.0;
  const auto v = validate_instance(inst);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].field, "bandwidth");
  EXPECT_THROW(require_valid(inst), std::invalid_argument);
}

TEST(ValidateInstance, CyclesLengthMismatchIsOneViolation) {
  Instance inst = make_instance(2, 3);
  inst.helpers[1].cycles_per_bit.pop_back();
  const auto v = validate_instance(inst);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].field, "helpers[1].cycles_per_bit");
}

TEST(ValidateInstance, ReportsEveryBrokenField) {
  Instance inst = make_instance(2, 2);
  inst.tasks[0].input_bits = -1.0;
  inst.local.energy_budget = 0.0;
  inst.channels.pop_back();
  EXPECT_EQ(validate_instance(inst).size(), 3u);
}

TEST(Assignment, RejectsBadRows) {
  Eigen::MatrixXd m(1, 2);
  m << 0.6, 0.6;
  EXPECT_THROW(Assignment(m, AssignmentKind::kFractional), std::invalid_argument);
  m << 0.5, 0.5;
  EXPECT_NO_THROW(Assignment(m, AssignmentKind::kFractional));
  EXPECT_THROW(Assignment(m, AssignmentKind::kBinary), std::invalid_argument);
  m << -0.5, 1.5;
  EXPECT_THROW(Assignment(m, AssignmentKind::kFractional), std::invalid_argument);
}

TEST(Assignment, NodesAndSetsRoundTrip) {
  const std::vector<std::size_t> nodes = {2, 0, 2, 1};
  const Assignment a = Assignment::from_nodes(nodes, 3);
  EXPECT_TRUE(a.is_binary());
  EXPECT_EQ(a.nodes(), nodes);
  const auto sets = a.node_sets();
  ASSERT_EQ(sets.size(), 3u);
  EXPECT_EQ(sets[0], std::vector<std::size_t>{1});
  EXPECT_EQ(sets[1], std::vector<std::size_t>{3});
  EXPECT_EQ(sets[2], (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(Assignment::from_node_sets(sets, 4), a);
  EXPECT_EQ(a.max_row_sum_error(), 0.0);
}

TEST(Assignment, AllOnPutsEveryTaskOnOneNode) {
  const Assignment a = Assignment::all_on(1, 3, 3);
  EXPECT_EQ(a.nodes(), (std::vector<std::size_t>{1, 1, 1}));
  EXPECT_THROW(Assignment::from_nodes(std::vector<std::size_t>{3}, 3), std::invalid_argument);
}

TEST(SchemeLabels, ParseInvertsToString) {
  for (SchemeLabel s : all_schemes()) EXPECT_EQ(parse_scheme(to_string(s)), s);
  EXPECT_EQ(to_string(SchemeLabel::kHeuristic1), "heuristic1");
  EXPECT_THROW(parse_scheme("greedy"), std::invalid_argument);
}

TEST(ResourceAllocation, ValidRequiresMatchingNonnegativeSlots) {
  ResourceAllocation a = ResourceAllocation::zeros(2);
  EXPECT_TRUE(a.valid());
  a.t_dl[1] = -1.0;
  EXPECT_FALSE(a.valid());
  a = ResourceAllocation::zeros(2);
  a.t_off.pop_back();
  EXPECT_FALSE(a.valid());
}

}  // namespace
}  // namespace mec
