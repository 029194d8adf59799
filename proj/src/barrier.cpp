#include "mec/barrier.hpp"

#include <fmt/format.h>

#include <Eigen/Core>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace mec::convex {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

double term_value(const PerspectiveTerm& term, std::span<const double> x) {
  const double t = x[static_cast<std::size_t>(term.time_var)];
  if (!(t > 0.0)) return kInf;
  const double u = term.rate * term.load.eval(x) / t;
  const double v = term.weight * t * std::expm1(u);
  return std::isfinite(v) ? v : kInf;
}

// term(x + alpha*dx) - term(x) without subtracting two large values:
// t1 expm1(u1) - t0 expm1(u0) = dt expm1(u1) + t0 e^u0 expm1(u1 - u0).
double term_change(const PerspectiveTerm& term, std::span<const double> x,
                   const Eigen::VectorXd& dx, double alpha) {
  const double t0 = x[static_cast<std::size_t>(term.time_var)];
  const double dt = alpha * dx[term.time_var];
  const double t1 = t0 + dt;
  const double y = term.load.eval(x);
  double dy = 0.0;
  for (const Term& a : term.load.terms) dy += a.coeff * dx[a.var];
  dy *= alpha;
  const double u0 = term.rate * y / t0;
  const double u1 = term.rate * (y + dy) / t1;
  const double du = term.rate * (dy * t0 - y * dt) / (t0 * t1);
  return term.weight * (dt * std::expm1(u1) + t0 * std::exp(u0) * std::expm1(du));
}

std::span<const double> as_span(const VectorXd& x) {
  return {x.data(), static_cast<std::size_t>(x.size())};
}

// Barrier phi(x) = weight * c'x - sum log(-g_i(x)) over all constraints.
class Barrier {
 public:
  explicit Barrier(const ConvexProgram& program)
      : p_(program), n_(program.num_vars), m_(program.num_inequalities()) {}

  int num_constraints() const { return m_; }

  // Fills slacks r_i = -g_i(x). Returns false when any slack is not a
  // positive finite number.
  bool slacks(const VectorXd& x, std::vector<double>& r) const {
    r.resize(static_cast<std::size_t>(m_));
    const auto xs = as_span(x);
    std::size_t i = 0;
    bool ok = true;
    for (const auto& c : p_.linear) {
      r[i] = -c.expr.eval(xs);
      ok = ok && std::isfinite(r[i]) && r[i] > 0.0;
      ++i;
    }
    for (const auto& c : p_.energy) {
      r[i] = -energy_value(c, xs);
      ok = ok && std::isfinite(r[i]) && r[i] > 0.0;
      ++i;
    }
    return ok;
  }

  // Gradient of the barrier and a factor `root` with hessian = root' * root.
  // Keeping the rows separate preserves the curvature of directions that a
  // nearly active constraint would swamp in the assembled hessian.
  void derivatives(const VectorXd& x, const std::vector<double>& r, double weight, VectorXd& grad,
                   MatrixXd& root) const {
    grad = weight * Eigen::Map<const VectorXd>(p_.objective.data(), n_);
    std::size_t rows = p_.linear.size() + p_.energy.size();
    for (const auto& c : p_.energy) rows += c.terms.size();
    root.setZero(static_cast<Eigen::Index>(rows), n_);
    const auto xs = as_span(x);
    Eigen::Index row = 0;
    std::size_t i = 0;
    for (const auto& c : p_.linear) {
      const double inv = 1.0 / r[i++];
      for (const Term& a : c.expr.terms) {
        grad[a.var] += a.coeff * inv;
        root(row, a.var) += a.coeff * inv;
      }
      ++row;
    }
    VectorXd g(n_);
    for (const auto& c : p_.energy) {
      const double inv = 1.0 / r[i++];
      g.setZero();
      for (const Term& a : c.linear.terms) g[a.var] += a.coeff;
      for (const PerspectiveTerm& term : c.terms) {
        const double t = x[term.time_var];
        const double y = term.load.eval(xs);
        const double u = term.rate * y / t;
        const double eu = std::exp(u);
        for (const Term& a : term.load.terms) g[a.var] += term.weight * term.rate * eu * a.coeff;
        g[term.time_var] += term.weight * (std::expm1(u) - u * eu);
        // Rank-one curvature of the perspective along (load, -y/t * time).
        const double scale = std::sqrt(inv * term.weight * eu / t) * term.rate;
        for (const Term& a : term.load.terms) root(row, a.var) += scale * a.coeff;
        root(row, term.time_var) -= scale * y / t;
        ++row;
      }
      grad += inv * g;
      root.row(row++) = inv * g.transpose();
    }
  }

  // Change in the barrier value along x + alpha*dx, computed from slack
  // differences so that it stays accurate when the barrier value is large.
  // Returns +inf when the trial point leaves the domain. `next` receives the
  // slacks at the trial point.
  double delta(const VectorXd& x, const VectorXd& dx, double alpha, const std::vector<double>& r,
               double weight, std::vector<double>& next) const {
    next.resize(r.size());
    const VectorXd trial = x + alpha * dx;
    const auto xs = as_span(x);
    const auto ts = as_span(trial);
    double change = weight * alpha * Eigen::Map<const VectorXd>(p_.objective.data(), n_).dot(dx);
    std::size_t i = 0;
    auto linear_step = [&](const AffineExpr& e) {
      double s = 0.0;
      for (const Term& a : e.terms) s += a.coeff * dx[a.var];
      return alpha * s;
    };
    for (const auto& c : p_.linear) {
      const double dr = -linear_step(c.expr);
      next[i] = r[i] + dr;
      if (!(next[i] > 0.0)) return kInf;
      change -= std::log1p(dr / r[i]);
      ++i;
    }
    for (const auto& c : p_.energy) {
      double dg = linear_step(c.linear);
      for (const PerspectiveTerm& term : c.terms) {
        if (!std::isfinite(term_value(term, ts))) return kInf;
        dg += term_change(term, xs, dx, alpha);
      }
      const double dr = -dg;
      next[i] = r[i] + dr;
      if (!(next[i] > 0.0)) return kInf;
      change -= std::log1p(dr / r[i]);
      ++i;
    }
    return change;
  }

  // Max-norm stationarity of the Lagrangian with multipliers 1/(weight r_i).
  double stationarity(const VectorXd& x, const std::vector<double>& r, double weight) const {
    VectorXd grad;
    derivatives_gradient_only(x, r, grad);
    const VectorXd c = Eigen::Map<const VectorXd>(p_.objective.data(), n_);
    const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
    return (c + grad / weight).cwiseAbs().maxCoeff() / scale;
  }

 private:
  // Gradient of -sum log(-g_i) only.
  void derivatives_gradient_only(const VectorXd& x, const std::vector<double>& r,
                                 VectorXd& grad) const {
    grad.setZero(n_);
    const auto xs = as_span(x);
    std::size_t i = 0;
    for (const auto& c : p_.linear) {
      const double inv = 1.0 / r[i++];
      for (const Term& a : c.expr.terms) grad[a.var] += a.coeff * inv;
    }
    for (const auto& c : p_.energy) {
      const double inv = 1.0 / r[i++];
      for (const Term& a : c.linear.terms) grad[a.var] += a.coeff * inv;
      for (const PerspectiveTerm& term : c.terms) {
        const double t = x[term.time_var];
        const double u = term.rate * term.load.eval(xs) / t;
        const double eu = std::exp(u);
        for (const Term& a : term.load.terms) {
          grad[a.var] += inv * term.weight * term.rate * eu * a.coeff;
        }
        grad[term.time_var] += inv * term.weight * (std::expm1(u) - u * eu);
      }
    }
  }

  const ConvexProgram& p_;
  int n_;
  int m_;
};

// Solves (root' root) dx = -grad through a column-pivoted QR of the
// column-equilibrated root.
VectorXd newton_direction(const MatrixXd& root, const VectorXd& grad) {
  const Eigen::Index n = grad.size();
  const VectorXd d = root.colwise().norm().transpose().cwiseMax(1e-300).cwiseInverse();
  const Eigen::ColPivHouseholderQR<MatrixXd> qr(root * d.asDiagonal());
  const auto& perm = qr.colsPermutation();
  const Eigen::Index rank = qr.rank();
  if (rank < n) return VectorXd::Zero(n);
  const auto r = qr.matrixR().topLeftCorner(n, n).template triangularView<Eigen::Upper>();
  // (R'R) z = -P' D grad, then dx = D P z.
  VectorXd z = perm.transpose() * (-d.cwiseProduct(grad));
  r.transpose().solveInPlace(z);
  r.solveInPlace(z);
  const VectorXd dx = d.cwiseProduct(perm * z);
  return dx.allFinite() ? dx : VectorXd::Zero(n);
}

enum class PathOutcome { kConverged, kStoppedEarly, kStepLimit };

struct PathState {
  VectorXd x;
  // Slacks are carried along with x and updated from the step itself: near
  // an active constraint, recomputing -g(x) from x loses most of its digits.
  std::vector<double> slack;
  double weight = 1.0;
  int steps = 0;
};

// Central-path following: centre with damped Newton, then raise the weight.
PathOutcome follow_path(const ConvexProgram& program, PathState& state, const BarrierOptions& opt,
                        int step_budget, const std::function<bool(const VectorXd&)>& stop_early) {
  const Barrier barrier(program);
  const int m = barrier.num_constraints();
  std::vector<double>& r = state.slack;
  if (!barrier.slacks(state.x, r)) throw std::logic_error("barrier start is not interior");
  std::vector<double> trial_r;
  VectorXd grad;
  MatrixXd root;
  state.weight = opt.initial_weight;
  for (;;) {
    // Centering.
    double previous = kInf;
    for (;;) {
      barrier.derivatives(state.x, r, state.weight, grad, root);
      const VectorXd dx = newton_direction(root, grad);
      const double slope = grad.dot(dx);
      const double decrement = -slope / 2.0;
      if (!(slope < 0.0) || decrement <= opt.centering_tolerance) break;
      // Newton converges quadratically once this close; a decrement that no
      // longer shrinks is rounding noise.
      if (decrement < 1e-10 && decrement > 0.25 * previous) break;
      previous = decrement;
      if (state.steps >= step_budget) return PathOutcome::kStepLimit;
      double alpha = 1.0;
      bool moved = false;
      while (alpha > 1e-14) {
        const double change = barrier.delta(state.x, dx, alpha, r, state.weight, trial_r);
        if (change <= opt.armijo * alpha * slope) {
          moved = true;
          break;
        }
        alpha *= opt.backtrack;
      }
      if (!moved) break;  // numerical floor reached
      state.x += alpha * dx;
      r.swap(trial_r);
      ++state.steps;
      if (stop_early && stop_early(state.x)) return PathOutcome::kStoppedEarly;
    }
    if (m / state.weight < opt.gap_tolerance) return PathOutcome::kConverged;
    state.weight *= opt.weight_factor;
  }
}

double max_soft_value(const ConvexProgram& program, std::span<const double> x,
                      std::string* label = nullptr) {
  double worst = -kInf;
  for (const auto& c : program.linear) {
    if (c.hard) continue;
    const double v = c.expr.eval(x);
    if (v > worst) {
      worst = v;
      if (label) *label = c.label;
    }
  }
  for (const auto& c : program.energy) {
    const double v = energy_value(c, x);
    if (v > worst) {
      worst = v;
      if (label) *label = c.label;
    }
  }
  return worst;
}

ConvexProgram phase_one_program(const ConvexProgram& program, std::span<const double> start,
                                double cap_factor) {
  const int n = program.num_vars;
  const int s = n;
  ConvexProgram aug;
  aug.num_vars = n + 1;
  aug.objective.assign(static_cast<std::size_t>(n + 1), 0.0);
  aug.objective[static_cast<std::size_t>(s)] = 1.0;
  for (const auto& c : program.linear) {
    LinearConstraint copy = c;
    if (!c.hard) copy.expr.add(s, -1.0);
    aug.linear.push_back(std::move(copy));
  }
  for (const auto& c : program.energy) {
    EnergyConstraint copy = c;
    copy.linear.add(s, -1.0);
    aug.energy.push_back(std::move(copy));
  }
  // A box keeps the auxiliary problem bounded.
  for (int j = 0; j < n; ++j) {
    const double cap = cap_factor * std::max(1.0, std::abs(start[static_cast<std::size_t>(j)]));
    LinearConstraint upper;
    upper.expr.constant = -cap;
    upper.expr.add(j, 1.0);
    upper.hard = true;
    upper.label = "phase-one box";
    LinearConstraint lower;
    lower.expr.constant = -cap;
    lower.expr.add(j, -1.0);
    lower.hard = true;
    lower.label = "phase-one box";
    aug.linear.push_back(std::move(upper));
    aug.linear.push_back(std::move(lower));
  }
  return aug;
}

}  // namespace

double AffineExpr::eval(std::span<const double> x) const {
  double v = constant;
  for (const Term& t : terms) v += t.coeff * x[static_cast<std::size_t>(t.var)];
  return v;
}

double energy_value(const EnergyConstraint& constraint, std::span<const double> x) {
  double v = constraint.linear.eval(x);
  for (const PerspectiveTerm& term : constraint.terms) v += term_value(term, x);
  return v;
}

BarrierResult minimize_convex(const ConvexProgram& program, std::vector<double> start,
                              const BarrierOptions& options) {
  const int n = program.num_vars;
  if (static_cast<int>(start.size()) != n || static_cast<int>(program.objective.size()) != n) {
    throw std::invalid_argument("minimize_convex: dimension mismatch");
  }
  for (const auto& c : program.linear) {
    if (c.hard && !(c.expr.eval(start) < 0.0)) {
      throw std::invalid_argument(
          fmt::format("minimize_convex: start violates hard constraint '{}'", c.label));
    }
  }

  BarrierResult result;
  PathState state;
  state.x = Eigen::Map<const VectorXd>(start.data(), n);

  std::string worst_label;
  const double worst = max_soft_value(program, start, &worst_label);
  if (!(worst < 0.0)) {
    if (!std::isfinite(worst)) {
      throw std::invalid_argument("minimize_convex: start is outside the constraint domain");
    }
    const ConvexProgram aug = phase_one_program(program, start, options.phase_one_cap);
    PathState phase_one;
    phase_one.x.resize(n + 1);
    phase_one.x.head(n) = state.x;
    phase_one.x[n] = worst + std::max(1.0, std::abs(worst));
    const PathOutcome outcome = follow_path(
        aug, phase_one, options, options.max_newton_steps, [n, &program](const VectorXd& x) {
          // The carried slack can differ from -g(x) in the last
          // digits; hand over only points interior for g itself.
          const std::span<const double> head(x.data(), static_cast<std::size_t>(n));
          return x[n] < 0.0 && max_soft_value(program, head) < 0.0;
        });
    result.phase_one_steps = phase_one.steps;
    result.newton_steps = phase_one.steps;
    if (outcome != PathOutcome::kStoppedEarly) {
      result.x.assign(phase_one.x.data(), phase_one.x.data() + n);
      result.status =
          outcome == PathOutcome::kStepLimit ? SolveStatus::kMaxIter : SolveStatus::kInfeasible;
      std::string label;
      const double slack = max_soft_value(program, result.x, &label);
      result.max_violation = std::max(0.0, slack);
      result.message =
          outcome == PathOutcome::kStepLimit
              ? "phase I exhausted the Newton step budget"
              : fmt::format("no strictly feasible point: constraint '{}' stays at {:.6g} >= 0",
                            label, slack);
      return result;
    }
    state.x = phase_one.x.head(n);
  }

  const PathOutcome outcome =
      follow_path(program, state, options, options.max_newton_steps - result.newton_steps, nullptr);
  result.newton_steps += state.steps;
  result.x.assign(state.x.data(), state.x.data() + n);
  const VectorXd c = Eigen::Map<const VectorXd>(program.objective.data(), n);
  result.objective = c.dot(state.x);

  const Barrier barrier(program);
  const double stationarity = barrier.stationarity(state.x, state.slack, state.weight);
  const double complementarity = 1.0 / state.weight;
  const double violation = std::max(0.0, max_soft_value(program, result.x));
  result.max_violation = violation;
  result.kkt_residual = std::max({stationarity, complementarity, violation});
  result.duality_gap = program.num_inequalities() / state.weight;
  if (outcome == PathOutcome::kStepLimit) {
    result.status = SolveStatus::kMaxIter;
    result.message = "Newton step budget exhausted";
  } else if (!(result.kkt_residual <= options.kkt_tolerance)) {
    result.status = SolveStatus::kMaxIter;
    result.message = fmt::format("centering stalled with KKT residual {:.3g}", result.kkt_residual);
  } else {
    result.status = SolveStatus::kOptimal;
  }
  return result;
}

}  // namespace mec::convex
