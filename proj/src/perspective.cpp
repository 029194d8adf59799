#include "mec/perspective.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mec {

PerspectiveValue perspective_eval(double y, double t, double bandwidth) {
  if (!(t > 0.0)) throw std::invalid_argument("perspective_eval: t must be positive");
  if (!(y >= 0.0)) throw std::invalid_argument("perspective_eval: y must be nonnegative");
  const double a = std::numbers::ln2 / bandwidth;
  const double u = a * y / t;
  const double eu = std::exp(u);
  PerspectiveValue out;
  out.value = t * std::expm1(u);
  out.gradient << a * eu, std::expm1(u) - u * eu;
  const double scale = a * a * eu / t;
  const double r = y / t;
  out.hessian << scale, -scale * r, -scale * r, scale * r * r;
  return out;
}

}  // namespace mec
