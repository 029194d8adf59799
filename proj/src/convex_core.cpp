#include "mec/convex_core.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mec/latency.hpp"

namespace mec {
namespace {

using convex::AffineExpr;
using convex::EnergyConstraint;
using convex::LinearConstraint;
using convex::PerspectiveTerm;

constexpr double kTimeFloor = 1e-12;  // seconds
constexpr double kEmptyLoadBits = 1e-9;
constexpr double kStartHeadroom = 0.1;  // start within 10% of the energy limit

double characteristic_time(const Instance& instance) {
  double in_bits = 0.0;
  double out_bits = 0.0;
  for (const Task& t : instance.tasks) {
    in_bits += t.input_bits;
    out_bits += t.output_bits;
  }
  const double denom = instance.bandwidth * std::numbers::ln2;
  if (in_bits > 0.0) return in_bits / denom;
  if (out_bits > 0.0) return out_bits / denom;
  double cycles = 0.0;
  for (std::size_t l = 0; l < instance.num_tasks(); ++l) {
    cycles += instance.local.cycles_per_bit[l] * instance.tasks[l].input_bits;
  }
  return cycles > 0.0 ? cycles / instance.local.cpu_freq : 1.0;
}

// Slot length ratio u = a*y/t at which the link energy is (1 + eta) times its
// infinite-slot limit, i.e. expm1(u)/u = 1 + eta.
double ratio_for_headroom(double eta) {
  auto excess = [eta](double u) { return std::expm1(u) / u - 1.0 - eta; };
  double lo = 0.0;
  double hi = 1.0;
  while (excess(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mid > 0.0 && excess(mid) < 0.0 ? lo : hi) = mid;
  }
  return std::max(lo, 1e-300);
}

bool carries_load(const AffineExpr& e) { return !e.terms.empty() || e.constant > 0.0; }

AffineExpr scaled(AffineExpr e, double factor) {
  e.constant *= factor;
  for (auto& t : e.terms) t.coeff *= factor;
  return e;
}

class ProgramBuilder {
 public:
  ProgramBuilder(const Instance& instance, const Assignment* fixed)
      : inst_(instance), fixed_(fixed), K_(instance.num_helpers()), L_(instance.num_tasks()) {}

  AllocationProgram build() {
    AllocationProgram out;
    out.time_scale = characteristic_time(inst_);
    out.energy_scale = inst_.local.energy_budget;
    for (const Node& h : inst_.helpers)
      out.energy_scale = std::max(out.energy_scale, h.energy_budget);
    const double ts = out.time_scale;
    const double es = out.energy_scale;
    const double rate = std::numbers::ln2 / (inst_.bandwidth * ts);

    int n = 0;
    out.pi_var.assign(L_, std::vector<int>(K_, -1));
    if (!fixed_) {
      for (auto& row : out.pi_var) {
        for (int& v : row) v = n++;
      }
    }
    pi_var_ = &out.pi_var;

    std::vector<AffineExpr> in_load(K_), out_load(K_), cycles(K_ + 1);
    for (std::size_t k = 0; k < K_; ++k) {
      in_load[k] = column(k, [&](std::size_t l) { return inst_.tasks[l].input_bits; });
      out_load[k] = column(k, [&](std::size_t l) { return inst_.tasks[l].output_bits; });
    }
    for (std::size_t k = 0; k <= K_; ++k) {
      const Node& node = inst_.node(k);
      cycles[k] = column(
          k, [&](std::size_t l) { return node.cycles_per_bit[l] * inst_.tasks[l].input_bits; });
    }

    out.t_off_var.assign(K_, -1);
    out.t_dl_var.assign(K_, -1);
    for (std::size_t k = 0; k < K_; ++k) {
      if (carries_load(in_load[k])) out.t_off_var[k] = n++;
    }
    for (std::size_t k = 0; k < K_; ++k) {
      if (carries_load(out_load[k])) out.t_dl_var[k] = n++;
    }
    out.i1_var = n++;

    auto& prog = out.program;
    prog.num_vars = n;
    prog.objective.assign(static_cast<std::size_t>(n), 0.0);
    prog.objective[static_cast<std::size_t>(out.i1_var)] = 1.0;
    for (int v : out.t_dl_var) {
      if (v >= 0) prog.objective[static_cast<std::size_t>(v)] = 1.0;
    }

    // Domain: time floors and the row simplex.
    auto floor_constraint = [&](int var, const std::string& label) {
      LinearConstraint c;
      c.expr.constant = kTimeFloor / ts;
      c.expr.add(var, -1.0);
      c.hard = true;
      c.label = label;
      prog.linear.push_back(std::move(c));
    };
    for (std::size_t k = 0; k < K_; ++k) {
      if (out.t_off_var[k] >= 0)
        floor_constraint(out.t_off_var[k], fmt::format("t_off[{}] floor", k + 1));
      if (out.t_dl_var[k] >= 0)
        floor_constraint(out.t_dl_var[k], fmt::format("t_dl[{}] floor", k + 1));
    }
    if (!fixed_) {
      for (std::size_t l = 0; l < L_; ++l) {
        LinearConstraint row_sum;
        row_sum.expr.constant = -1.0;
        row_sum.hard = true;
        row_sum.label = fmt::format("task {} helper share", l + 1);
        for (std::size_t k = 0; k < K_; ++k) {
          LinearConstraint nonneg;
          nonneg.expr.add(out.pi_var[l][k], -1.0);
          nonneg.hard = true;
          nonneg.label = fmt::format("pi({},{}) >= 0", l + 1, k + 1);
          prog.linear.push_back(std::move(nonneg));
          row_sum.expr.add(out.pi_var[l][k], 1.0);
        }
        prog.linear.push_back(std::move(row_sum));
      }
    }

    // Merged waiting-time constraints.
    const int i1 = out.i1_var;
    {
      LinearConstraint c;
      for (int v : out.t_off_var) {
        if (v >= 0) c.expr.add(v, 1.0);
      }
      c.expr.add(i1, -1.0);
      c.label = "offloading ends before i1";
      prog.linear.push_back(std::move(c));
    }
    auto compute_time = [&](std::size_t k) {
      return scaled(cycles[k], 1.0 / (inst_.node(k).cpu_freq * ts));
    };
    if (carries_load(cycles[0])) {
      LinearConstraint c;
      c.expr = compute_time(0);
      if (out.t_off_var[0] >= 0) c.expr.add(out.t_off_var[0], 1.0);
      c.expr.add(i1, -1.0);
      c.label = "helper 1 ready by i1";
      prog.linear.push_back(std::move(c));
    }
    if (carries_load(cycles[K_])) {
      LinearConstraint c;
      c.expr = compute_time(K_);
      c.expr.add(i1, -1.0);
      for (int v : out.t_dl_var) {
        if (v >= 0) c.expr.add(v, -1.0);
      }
      c.label = "local computing ends by the deadline";
      prog.linear.push_back(std::move(c));
    }
    for (std::size_t k = 1; k < K_; ++k) {
      if (!carries_load(cycles[k])) continue;
      LinearConstraint c;
      c.expr = compute_time(k);
      for (std::size_t j = 0; j <= k; ++j) {
        if (out.t_off_var[j] >= 0) c.expr.add(out.t_off_var[j], 1.0);
      }
      c.expr.add(i1, -1.0);
      for (std::size_t j = 0; j < k; ++j) {
        if (out.t_dl_var[j] >= 0) c.expr.add(out.t_dl_var[j], -1.0);
      }
      c.label = fmt::format("helper {} ready when its download slot opens", k + 1);
      prog.linear.push_back(std::move(c));
    }

    // Energy budgets.
    auto compute_energy = [&](std::size_t k) {
      const Node& node = inst_.node(k);
      return scaled(cycles[k], node.kappa * node.cpu_freq * node.cpu_freq / es);
    };
    {
      EnergyConstraint c;
      c.linear = compute_energy(K_);
      c.linear.constant -= inst_.local.energy_budget / es;
      for (std::size_t k = 0; k < K_; ++k) {
        if (out.t_off_var[k] < 0) continue;
        c.terms.push_back(
            {ts / (inst_.channels[k].uplink_gain * es), rate, in_load[k], out.t_off_var[k]});
      }
      c.label = "local energy budget";
      add_energy(prog, std::move(c), out);
    }
    for (std::size_t k = 0; k < K_; ++k) {
      EnergyConstraint c;
      c.linear = compute_energy(k);
      c.linear.constant -= inst_.helpers[k].energy_budget / es;
      if (out.t_dl_var[k] >= 0) {
        c.terms.push_back(
            {ts / (inst_.channels[k].downlink_gain * es), rate, out_load[k], out.t_dl_var[k]});
      }
      c.label = fmt::format("helper {} energy budget", k + 1);
      add_energy(prog, std::move(c), out);
    }

    out.start = start_point(out, in_load, out_load, cycles);
    return out;
  }

 private:
  template <typename Weight>
  AffineExpr column(std::size_t col, Weight weight) const {
    AffineExpr e;
    for (std::size_t l = 0; l < L_; ++l) {
      const double w = weight(l);
      if (w == 0.0) continue;
      if (fixed_) {
        e.constant += (*fixed_)(l, col) * w;
      } else if (col == K_) {
        e.constant += w;
        for (std::size_t k = 0; k < K_; ++k) e.add((*pi_var_)[l][k], -w);
      } else {
        e.add((*pi_var_)[l][col], w);
      }
    }
    return e;
  }

  static void add_energy(convex::ConvexProgram& prog, EnergyConstraint c, AllocationProgram& out) {
    if (c.terms.empty() && c.linear.terms.empty()) {
      // Nothing to optimise: a fixed compute load either fits or it does not.
      if (!(c.linear.constant < 0.0) && out.infeasible_reason.empty()) {
        out.infeasible_reason = fmt::format("{} exceeded by compute energy alone", c.label);
      }
      return;
    }
    prog.energy.push_back(std::move(c));
  }

  std::vector<double> start_point(const AllocationProgram& out,
                                  const std::vector<AffineExpr>& in_load,
                                  const std::vector<AffineExpr>& out_load,
                                  const std::vector<AffineExpr>& cycles) const {
    const double ts = out.time_scale;
    std::vector<double> x(static_cast<std::size_t>(out.program.num_vars), 0.0);
    const double share = 1.0 / static_cast<double>(K_ + 1);
    for (const auto& row : out.pi_var) {
      for (int v : row) {
        if (v >= 0) x[static_cast<std::size_t>(v)] = share;
      }
    }
    const double a = std::numbers::ln2 / inst_.bandwidth;

    // Headroom per node: at most 10%, less when the budget is tighter.
    auto headroom = [&](std::size_t node, double link_limit) {
      const Node& nd = inst_.node(node);
      const double compute = nd.kappa * nd.cpu_freq * nd.cpu_freq * cycles[node].eval(x);
      const double available = nd.energy_budget - compute - link_limit;
      if (available > 0.0 && link_limit > 0.0) {
        return std::min(kStartHeadroom, 0.5 * available / link_limit);
      }
      return kStartHeadroom;
    };
    auto slot = [&](double bits, double u) {
      return std::max(a * bits / u / ts, 2.0 * kTimeFloor / ts);
    };

    double local_limit = 0.0;
    for (std::size_t k = 0; k < K_; ++k) {
      if (out.t_off_var[k] >= 0) {
        local_limit += a * in_load[k].eval(x) / inst_.channels[k].uplink_gain;
      }
    }
    const double u_local = ratio_for_headroom(headroom(K_, local_limit));
    for (std::size_t k = 0; k < K_; ++k) {
      if (out.t_off_var[k] >= 0) {
        x[static_cast<std::size_t>(out.t_off_var[k])] = slot(in_load[k].eval(x), u_local);
      }
      if (out.t_dl_var[k] >= 0) {
        const double bits = out_load[k].eval(x);
        const double limit = a * bits / inst_.channels[k].downlink_gain;
        x[static_cast<std::size_t>(out.t_dl_var[k])] =
            slot(bits, ratio_for_headroom(headroom(k, limit)));
      }
    }

    // i1 = 2 * sum t_off, raised until every timing constraint has slack.
    auto value = [&](int v) { return v >= 0 ? x[static_cast<std::size_t>(v)] : 0.0; };
    double total_off = 0.0;
    for (int v : out.t_off_var) total_off += value(v);
    double required = total_off;
    for (const auto& c : out.program.linear) {
      if (c.hard) continue;
      // Every timing constraint is expr = rest - i1 <= 0.
      double rest = c.expr.eval(x);
      required = std::max(required, rest);
    }
    const double i1 = std::max(2.0 * total_off, required);
    x[static_cast<std::size_t>(out.i1_var)] = i1 + 0.1 * std::max(i1, 1e-6);
    return x;
  }

  const Instance& inst_;
  const Assignment* fixed_;
  std::size_t K_;
  std::size_t L_;
  const std::vector<std::vector<int>>* pi_var_ = nullptr;
};

// Minimum energy a node needs under a fixed assignment: compute energy plus
// the infinite-slot limit on each of its links.
std::string fixed_infeasibility(const Instance& instance, const Assignment& assignment) {
  const std::size_t K = instance.num_helpers();
  const double a = std::numbers::ln2 / instance.bandwidth;
  double local_need = local_compute(assignment, instance).energy;
  for (std::size_t k = 0; k < K; ++k) {
    local_need +=
        a * assigned_input_bits(assignment, k, instance) / instance.channels[k].uplink_gain;
    const double need =
        remote_compute(assignment, k, instance).energy +
        a * assigned_output_bits(assignment, k, instance) / instance.channels[k].downlink_gain;
    if (!(need < instance.helpers[k].energy_budget)) {
      return fmt::format("helper {} needs at least {:.6g} J but its budget is {:.6g} J", k + 1,
                         need, instance.helpers[k].energy_budget);
    }
  }
  if (!(local_need < instance.local.energy_budget)) {
    return fmt::format("local user needs at least {:.6g} J but its budget is {:.6g} J", local_need,
                       instance.local.energy_budget);
  }
  return {};
}

ConvexSolveReport decode(const Instance& instance, const AllocationProgram& ap,
                         const convex::BarrierResult& result, const Assignment* fixed) {
  const std::size_t K = instance.num_helpers();
  const std::size_t L = instance.num_tasks();
  ConvexSolveReport report;
  report.status = result.status;
  report.message = result.message;
  report.iterations = result.newton_steps;
  report.phase_one_iterations = result.phase_one_steps;
  report.kkt_residual = result.kkt_residual;
  report.max_violation = result.max_violation;
  report.objective = result.objective * ap.time_scale;
  report.duality_gap = result.duality_gap * ap.time_scale;

  if (fixed) {
    report.assignment = *fixed;
  } else {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(K + 1));
    for (std::size_t l = 0; l < L; ++l) {
      double helpers = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        const double v = std::clamp(result.x[static_cast<std::size_t>(ap.pi_var[l][k])], 0.0, 1.0);
        m(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) = v;
        helpers += v;
      }
      m(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(K)) = std::max(0.0, 1.0 - helpers);
    }
    report.assignment = Assignment(std::move(m), AssignmentKind::kFractional);
  }

  report.allocation = ResourceAllocation::zeros(K);
  auto value = [&](int v) {
    return v >= 0 ? result.x[static_cast<std::size_t>(v)] * ap.time_scale : 0.0;
  };
  for (std::size_t k = 0; k < K; ++k) {
    const double in_bits = assigned_input_bits(report.assignment, k, instance);
    const double out_bits = assigned_output_bits(report.assignment, k, instance);
    report.allocation.t_off[k] = in_bits < kEmptyLoadBits ? 0.0 : value(ap.t_off_var[k]);
    report.allocation.t_dl[k] = out_bits < kEmptyLoadBits ? 0.0 : value(ap.t_dl_var[k]);
  }
  report.allocation.i1 = value(ap.i1_var);
  return report;
}

}  // namespace

AllocationProgram build_fixed_program(const Instance& instance, const Assignment& assignment) {
  AllocationProgram ap = ProgramBuilder(instance, &assignment).build();
  if (ap.infeasible_reason.empty())
    ap.infeasible_reason = fixed_infeasibility(instance, assignment);
  return ap;
}

AllocationProgram build_relaxed_program(const Instance& instance) {
  return ProgramBuilder(instance, nullptr).build();
}

ConvexSolveReport solve_fixed(const Instance& instance, const Assignment& assignment,
                              const convex::BarrierOptions& options) {
  require_valid(instance);
  if (!assignment.is_binary()) throw std::invalid_argument("solve_fixed needs a binary assignment");
  if (assignment.num_tasks() != instance.num_tasks() ||
      assignment.num_nodes() != instance.num_nodes()) {
    throw std::invalid_argument("assignment dimensions do not match the instance");
  }
  const AllocationProgram ap = build_fixed_program(instance, assignment);
  if (!ap.infeasible_reason.empty()) {
    ConvexSolveReport report;
    report.assignment = assignment;
    report.allocation = ResourceAllocation::zeros(instance.num_helpers());
    report.status = SolveStatus::kInfeasible;
    report.objective = std::numeric_limits<double>::infinity();
    report.message = ap.infeasible_reason;
    return report;
  }
  const convex::BarrierResult result = convex::minimize_convex(ap.program, ap.start, options);
  return decode(instance, ap, result, &assignment);
}

ConvexSolveReport solve_relaxed(const Instance& instance, const convex::BarrierOptions& options) {
  require_valid(instance);
  const AllocationProgram ap = build_relaxed_program(instance);
  const convex::BarrierResult result = convex::minimize_convex(ap.program, ap.start, options);
  ConvexSolveReport report = decode(instance, ap, result, nullptr);
  if (report.status == SolveStatus::kInfeasible) {
    report.objective = std::numeric_limits<double>::infinity();
  }
  return report;
}

FeasibilityCertificate sufficient_feasibility(const Instance& instance) {
  const std::size_t K = instance.num_helpers();
  const double ln2_over_b = std::numbers::ln2 / instance.bandwidth;
  FeasibilityCertificate cert;
  double local_need = 0.0;
  std::vector<double> helper_need(K, 0.0);
  for (std::size_t l = 0; l < instance.num_tasks(); ++l) {
    const Task& task = instance.tasks[l];
    const Node& local = instance.local;
    local_need +=
        local.kappa * local.cycles_per_bit[l] * task.input_bits * local.cpu_freq * local.cpu_freq;
    for (std::size_t k = 0; k < K; ++k) {
      local_need += ln2_over_b * task.input_bits / instance.channels[k].uplink_gain;
      const Node& h = instance.helpers[k];
      helper_need[k] += h.kappa * h.cycles_per_bit[l] * task.input_bits * h.cpu_freq * h.cpu_freq +
                        ln2_over_b * task.output_bits / instance.channels[k].downlink_gain;
    }
  }
  cert.local_margin = instance.local.energy_budget - local_need;
  cert.ok = cert.local_margin > 0.0;
  cert.helper_margins.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    cert.helper_margins[k] = instance.helpers[k].energy_budget - helper_need[k];
    cert.ok = cert.ok && cert.helper_margins[k] > 0.0;
  }
  return cert;
}

}  // namespace mec
