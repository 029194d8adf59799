#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mec {

// Units used everywhere inside the library: seconds, joules, bits, hertz,
// cycles/second. Decibel values only appear in the scenario generator.

struct Task {
  double input_bits = 0.0;
  double output_bits = 0.0;
};

struct Node {
  double cpu_freq = 0.0;  // cycles/s
  double kappa = 0.0;     // effective capacitance coefficient
  double energy_budget = 0.0;
  std::vector<double> cycles_per_bit;  // one entry per task
};

// Channel power gains already divided by the receiver noise power (1/W).
struct Channel {
  double uplink_gain = 0.0;    // local user -> helper
  double downlink_gain = 0.0;  // helper -> local user
};

// Node columns follow the assignment matrix layout: helpers occupy columns
// 0..K-1 in TDMA order and the local user is column K.
struct Instance {
  std::vector<Task> tasks;
  Node local;
  std::vector<Node> helpers;
  std::vector<Channel> channels;
  double bandwidth = 0.0;

  std::size_t num_tasks() const { return tasks.size(); }
  std::size_t num_helpers() const { return helpers.size(); }
  std::size_t num_nodes() const { return helpers.size() + 1; }
  std::size_t local_column() const { return helpers.size(); }
  const Node& node(std::size_t column) const {
    return column == helpers.size() ? local : helpers.at(column);
  }
};

struct Violation {
  std::string field;
  std::string reason;
};

// Empty iff the instance is well formed.
std::vector<Violation> validate_instance(const Instance& instance);

// Throws std::invalid_argument listing every violation.
void require_valid(const Instance& instance);

enum class AssignmentKind { kFractional, kBinary };

inline constexpr double kRowSumTolerance = 1e-9;

// Task-to-node matrix: L rows, K+1 columns, each row a distribution over nodes.
class Assignment {
 public:
  Assignment() = default;
  // Throws std::invalid_argument when the matrix violates the row/entry
  // invariants for the requested kind.
  Assignment(Eigen::MatrixXd matrix, AssignmentKind kind);

  static Assignment from_nodes(std::span<const std::size_t> node_of_task, std::size_t num_nodes);
  static Assignment from_node_sets(const std::vector<std::vector<std::size_t>>& sets,
                                   std::size_t num_tasks);
  static Assignment all_on(std::size_t node, std::size_t num_tasks, std::size_t num_nodes);

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  AssignmentKind kind() const { return kind_; }
  bool is_binary() const { return kind_ == AssignmentKind::kBinary; }
  bool empty() const { return matrix_.size() == 0; }
  std::size_t num_tasks() const { return static_cast<std::size_t>(matrix_.rows()); }
  std::size_t num_nodes() const { return static_cast<std::size_t>(matrix_.cols()); }
  double operator()(std::size_t task, std::size_t node) const {
    return matrix_(static_cast<Eigen::Index>(task), static_cast<Eigen::Index>(node));
  }

  // Binary only: the node each task is placed on.
  std::vector<std::size_t> nodes() const;
  // Binary only: the task index sets per node.
  std::vector<std::vector<std::size_t>> node_sets() const;

  double max_row_sum_error() const;

  friend bool operator==(const Assignment& a, const Assignment& b) {
    return a.kind_ == b.kind_ && a.matrix_.rows() == b.matrix_.rows() &&
           a.matrix_.cols() == b.matrix_.cols() && a.matrix_ == b.matrix_;
  }

 private:
  Eigen::MatrixXd matrix_;
  AssignmentKind kind_ = AssignmentKind::kBinary;
};

struct ResourceAllocation {
  std::vector<double> t_off;  // offloading slot per helper
  std::vector<double> t_dl;   // downloading slot per helper
  double i1 = 0.0;            // instant helper 1 may start downloading

  static ResourceAllocation zeros(std::size_t num_helpers) {
    return {std::vector<double>(num_helpers, 0.0), std::vector<double>(num_helpers, 0.0), 0.0};
  }
  bool valid() const;
};

enum class SolveStatus { kOptimal, kInfeasible, kMaxIter };
std::string_view to_string(SolveStatus status);

enum class SchemeLabel {
  kProposed,
  kHeuristic1,
  kHeuristic2,
  kRandomSelection,
  kRandomSearch,
  kLocalExecution,
  kExhaustive,
  kRelaxedBound,
};

std::string_view to_string(SchemeLabel scheme);
// Throws std::invalid_argument for unknown names.
SchemeLabel parse_scheme(std::string_view name);
std::span<const SchemeLabel> all_schemes();

struct Solution {
  Assignment assignment;
  ResourceAllocation allocation;
  double objective = 0.0;           // total latency, seconds
  std::vector<double> node_energy;  // helpers then local, joules
  bool feasible = false;
  SchemeLabel scheme = SchemeLabel::kProposed;
  SolveStatus status = SolveStatus::kInfeasible;
  std::string message;
};

struct ScheduleReport {
  std::vector<double> compute_time;  // helpers then local
  std::vector<double> waiting;       // I_k per helper
  double completion = 0.0;           // last download finishes
  double total_latency = 0.0;
  double offload_energy = 0.0;
  double local_energy = 0.0;
  std::vector<double> helper_compute_energy;
  std::vector<double> helper_dl_energy;
};

}  // namespace mec
