#pragma once

#include <Eigen/Core>

namespace mec {

// h(y, t) = t * (2^{y/(B t)} - 1): the energy needed to send y bits in t
// seconds over a unit-gain link. With a = ln2/B and u = a*y/t,
//   h      = t (e^u - 1)
//   dh/dy  = a e^u
//   dh/dt  = e^u (1 - u) - 1
//   d2h    = (a^2 e^u / t) [1, -y/t; -y/t, y^2/t^2]
// The Hessian is rank one and positive semidefinite, so h is jointly convex.
struct PerspectiveValue {
  double value = 0.0;
  Eigen::Vector2d gradient = Eigen::Vector2d::Zero();  // (d/dy, d/dt)
  Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
};

// Throws std::invalid_argument when t <= 0 or y < 0.
PerspectiveValue perspective_eval(double y, double t, double bandwidth);

}  // namespace mec
