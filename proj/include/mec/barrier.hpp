#pragma once

#include <span>
#include <string>
#include <vector>

#include "mec/model.hpp"

namespace mec::convex {

struct Term {
  int var = 0;
  double coeff = 0.0;
};

struct AffineExpr {
  double constant = 0.0;
  std::vector<Term> terms;

  AffineExpr& add(int var, double coeff) {
    if (coeff != 0.0) terms.push_back({var, coeff});
    return *this;
  }
  double eval(std::span<const double> x) const;
};

// expr(x) <= 0. Hard constraints describe the domain (time floors, simplex
// bounds) and are never relaxed during phase I; the start point must satisfy
// them strictly.
struct LinearConstraint {
  AffineExpr expr;
  bool hard = false;
  std::string label;
};

// weight * t * (exp(rate * load / t) - 1) where t = x[time_var] > 0.
struct PerspectiveTerm {
  double weight = 1.0;
  double rate = 1.0;
  AffineExpr load;
  int time_var = 0;
};

// linear(x) + sum(terms) <= 0
struct EnergyConstraint {
  AffineExpr linear;
  std::vector<PerspectiveTerm> terms;
  std::string label;
};

// Linear objective, linear inequalities and perspective-energy inequalities.
struct ConvexProgram {
  int num_vars = 0;
  std::vector<double> objective;
  std::vector<LinearConstraint> linear;
  std::vector<EnergyConstraint> energy;

  int num_inequalities() const { return static_cast<int>(linear.size() + energy.size()); }
};

// Value of an energy constraint function; +inf outside the domain (t <= 0).
double energy_value(const EnergyConstraint& constraint, std::span<const double> x);

struct BarrierOptions {
  double initial_weight = 1.0;
  double weight_factor = 10.0;
  double armijo = 0.25;
  double backtrack = 0.5;
  double gap_tolerance = 1e-8;         // stop when m / weight drops below this
  double centering_tolerance = 1e-16;  // half squared Newton decrement
  int max_newton_steps = 500;          // phase I and phase II combined
  double phase_one_cap = 1e4;          // box half-width multiplier used in phase I
  double kkt_tolerance = 1e-7;         // larger residuals are reported as max_iter
};

struct BarrierResult {
  std::vector<double> x;
  SolveStatus status = SolveStatus::kInfeasible;
  double objective = 0.0;
  double kkt_residual = 0.0;
  double duality_gap = 0.0;
  double max_violation = 0.0;
  int newton_steps = 0;
  int phase_one_steps = 0;
  std::string message;
};

// Log-barrier interior-point method. When `start` is not strictly feasible a
// phase-I problem (minimise a common slack over the soft constraints) finds an
// interior point first; a nonnegative optimal slack means infeasible.
BarrierResult minimize_convex(const ConvexProgram& program, std::vector<double> start,
                              const BarrierOptions& options = {});

}  // namespace mec::convex
