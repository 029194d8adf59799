#include "mec/model.hpp"

#include <fmt/format.h>

#include <array>
#include <cmath>
#include <stdexcept>

namespace mec {
namespace {

bool finite_nonnegative(double v) { return std::isfinite(v) && v >= 0.0; }
bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

void check_node(const Node& node, const std::string& prefix, std::size_t num_tasks,
                std::vector<Violation>& out) {
  if (!finite_positive(node.cpu_freq)) {
    out.push_back({prefix + ".cpu_freq", "must be a positive finite number"});
  }
  if (!finite_nonnegative(node.kappa)) {
    out.push_back({prefix + ".kappa", "must be a nonnegative finite number"});
  }
  if (!finite_positive(node.energy_budget)) {
    out.push_back({prefix + ".energy_budget", "must be a positive finite number"});
  }
  if (node.cycles_per_bit.size() != num_tasks) {
    out.push_back(
        {prefix + ".cycles_per_bit", fmt::format("has {} entries, expected one per task ({})",
                                                 node.cycles_per_bit.size(), num_tasks)});
    return;
  }
  for (std::size_t l = 0; l < num_tasks; ++l) {
    if (!finite_nonnegative(node.cycles_per_bit[l])) {
      out.push_back(
          {fmt::format("{}.cycles_per_bit[{}]", prefix, l), "must be a nonnegative finite number"});
    }
  }
}

}  // namespace

std::vector<Violation> validate_instance(const Instance& instance) {
  std::vector<Violation> out;
  const std::size_t L = instance.tasks.size();
  if (L == 0) out.push_back({"tasks", "at least one task is required"});
  if (instance.helpers.empty()) out.push_back({"helpers", "at least one helper is required"});
  if (!finite_positive(instance.bandwidth)) {
    out.push_back({"bandwidth", "must be a positive finite number"});
  }
  for (std::size_t l = 0; l < L; ++l) {
    const Task& task = instance.tasks[l];
    if (!finite_nonnegative(task.input_bits)) {
      out.push_back(
          {fmt::format("tasks[{}].input_bits", l), "must be a nonnegative finite number"});
    }
    if (!finite_nonnegative(task.output_bits)) {
      out.push_back(
          {fmt::format("tasks[{}].output_bits", l), "must be a nonnegative finite number"});
    }
  }
  check_node(instance.local, "local", L, out);
  for (std::size_t k = 0; k < instance.helpers.size(); ++k) {
    check_node(instance.helpers[k], fmt::format("helpers[{}]", k), L, out);
  }
  if (instance.channels.size() != instance.helpers.size()) {
    out.push_back({"channels", fmt::format("has {} entries, expected one per helper ({})",
                                           instance.channels.size(), instance.helpers.size())});
  } else {
    for (std::size_t k = 0; k < instance.channels.size(); ++k) {
      if (!finite_positive(instance.channels[k].uplink_gain)) {
        out.push_back(
            {fmt::format("channels[{}].uplink_gain", k), "must be a positive finite number"});
      }
      if (!finite_positive(instance.channels[k].downlink_gain)) {
        out.push_back(
            {fmt::format("channels[{}].downlink_gain", k), "must be a positive finite number"});
      }
    }
  }
  return out;
}

void require_valid(const Instance& instance) {
  const auto violations = validate_instance(instance);
  if (violations.empty()) return;
  std::string msg = "invalid instance:";
  for (const auto& v : violations) msg += fmt::format(" {} {};", v.field, v.reason);
  throw std::invalid_argument(msg);
}

Assignment::Assignment(Eigen::MatrixXd matrix, AssignmentKind kind)
    : matrix_(std::move(matrix)), kind_(kind) {
  for (Eigen::Index l = 0; l < matrix_.rows(); ++l) {
    double sum = 0.0;
    for (Eigen::Index k = 0; k < matrix_.cols(); ++k) {
      const double v = matrix_(l, k);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument(
            fmt::format("assignment entry ({}, {}) = {} is outside [0, 1]", l, k, v));
      }
      if (kind_ == AssignmentKind::kBinary && v != 0.0 && v != 1.0) {
        throw std::invalid_argument(
            fmt::format("binary assignment entry ({}, {}) = {} is not 0 or 1", l, k, v));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw std::invalid_argument(fmt::format("assignment row {} sums to {}", l, sum));
    }
  }
}

Assignment Assignment::from_nodes(std::span<const std::size_t> node_of_task,
                                  std::size_t num_nodes) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(node_of_task.size()),
                                            static_cast<Eigen::Index>(num_nodes));
  for (std::size_t l = 0; l < node_of_task.size(); ++l) {
    if (node_of_task[l] >= num_nodes) {
      throw std::invalid_argument(fmt::format("task {} placed on node {} but only {} nodes", l,
                                              node_of_task[l], num_nodes));
    }
    m(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(node_of_task[l])) = 1.0;
  }
  return Assignment(std::move(m), AssignmentKind::kBinary);
}

Assignment Assignment::from_node_sets(const std::vector<std::vector<std::size_t>>& sets,
                                      std::size_t num_tasks) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_tasks),
                                            static_cast<Eigen::Index>(sets.size()));
  for (std::size_t k = 0; k < sets.size(); ++k) {
    for (std::size_t l : sets[k]) {
      if (l >= num_tasks) throw std::invalid_argument(fmt::format("task index {} out of range", l));
      m(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) += 1.0;
    }
  }
  return Assignment(std::move(m), AssignmentKind::kBinary);
}

Assignment Assignment::all_on(std::size_t node, std::size_t num_tasks, std::size_t num_nodes) {
  std::vector<std::size_t> nodes(num_tasks, node);
  return from_nodes(nodes, num_nodes);
}

std::vector<std::size_t> Assignment::nodes() const {
  if (!is_binary()) throw std::logic_error("nodes() requires a binary assignment");
  std::vector<std::size_t> out(num_tasks(), 0);
  for (std::size_t l = 0; l < num_tasks(); ++l) {
    for (std::size_t k = 0; k < num_nodes(); ++k) {
      if ((*this)(l, k) == 1.0) out[l] = k;
    }
  }
  return out;
}

std::vector<std::vector<std::size_t>> Assignment::node_sets() const {
  std::vector<std::vector<std::size_t>> sets(num_nodes());
  const auto placed = nodes();
  for (std::size_t l = 0; l < placed.size(); ++l) sets[placed[l]].push_back(l);
  return sets;
}

double Assignment::max_row_sum_error() const {
  double worst = 0.0;
  for (Eigen::Index l = 0; l < matrix_.rows(); ++l) {
    worst = std::max(worst, std::abs(matrix_.row(l).sum() - 1.0));
  }
  return worst;
}

bool ResourceAllocation::valid() const {
  if (t_off.size() != t_dl.size()) return false;
  auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
  for (double v : t_off) {
    if (!ok(v)) return false;
  }
  for (double v : t_dl) {
    if (!ok(v)) return false;
  }
  return ok(i1);
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kMaxIter:
      return "max_iter";
  }
  return "unknown";
}

namespace {
constexpr std::array kSchemes = {
    SchemeLabel::kProposed,        SchemeLabel::kHeuristic1,   SchemeLabel::kHeuristic2,
    SchemeLabel::kRandomSelection, SchemeLabel::kRandomSearch, SchemeLabel::kLocalExecution,
    SchemeLabel::kExhaustive,      SchemeLabel::kRelaxedBound,
};
}  // namespace

std::string_view to_string(SchemeLabel scheme) {
  switch (scheme) {
    case SchemeLabel::kProposed:
      return "proposed";
    case SchemeLabel::kHeuristic1:
      return "heuristic1";
    case SchemeLabel::kHeuristic2:
      return "heuristic2";
    case SchemeLabel::kRandomSelection:
      return "random_selection";
    case SchemeLabel::kRandomSearch:
      return "random_search";
    case SchemeLabel::kLocalExecution:
      return "local_execution";
    case SchemeLabel::kExhaustive:
      return "exhaustive";
    case SchemeLabel::kRelaxedBound:
      return "relaxed_bound";
  }
  return "unknown";
}

SchemeLabel parse_scheme(std::string_view name) {
  for (SchemeLabel s : kSchemes) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument(fmt::format("unknown scheme '{}'", name));
}

std::span<const SchemeLabel> all_schemes() { return kSchemes; }

}  // namespace mec
