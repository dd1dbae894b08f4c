#include "stvf/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stvf {

Tolerances Tolerances::level(int k) {
  if (k < 0) throw std::invalid_argument("tolerance level must be >= 0");
  const double s = std::ldexp(1.0, -k);
  return {2.0 * s, 0.25 * s};
}

Marking mark(const std::vector<double>& eta_T, double tol_h, std::size_t nodes) {
  if (!(tol_h > 0.0)) throw std::invalid_argument("mark: TOL_h must be positive");
  if (nodes < 1) throw std::invalid_argument("mark: node count must be >= 1");
  const double unit = tol_h / std::sqrt(static_cast<double>(nodes));
  Marking m;
  for (std::size_t t = 0; t < eta_T.size(); ++t) {
    if (eta_T[t] > 0.9 * unit) {
      m.refine.push_back(static_cast<std::int32_t>(t));
    } else if (eta_T[t] < 0.1 * unit) {
      m.coarsen.push_back(static_cast<std::int32_t>(t));
    }
  }
  return m;
}

AdaptDecision adjust_timestep(double eta_time2, int fp_iters, double tol_tau, double tau,
                              TimeStepLimits limits) {
  if (!(tau > 0.0)) throw std::invalid_argument("adjust_timestep: tau must be positive");
  AdaptDecision d;
  if (eta_time2 > tol_tau || fp_iters > kHalveIterations) {
    d.tau = 0.5 * tau;
    d.halved = true;
  } else if (eta_time2 < 0.3 * tol_tau && fp_iters < kGrowIterations) {
    d.tau = 1.5 * tau;
    d.grew = true;
  } else {
    d.tau = tau;
  }
  d.tau = std::clamp(d.tau, limits.min, limits.max);
  return d;
}

}  // namespace stvf
