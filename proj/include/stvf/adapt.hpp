// Pathwise adaptive control: equidistribution marking and time-step rules.
#pragma once

#include <cstdint>
#include <vector>

namespace stvf {

struct Tolerances {
  double h = 2.0;     // TOL_h
  double tau = 0.25;  // TOL_tau

  // TOL_k = 2^-k (2, 0.25). Throws std::invalid_argument for k < 0.
  static Tolerances level(int k);
};

struct Marking {
  std::vector<std::int32_t> refine;
  std::vector<std::int32_t> coarsen;
};

// refine: eta_T > 0.9 TOL_h / sqrt(nodes); coarsen: eta_T < 0.1 TOL_h / sqrt(nodes).
Marking mark(const std::vector<double>& eta_T, double tol_h, std::size_t nodes);

struct TimeStepLimits {
  double min = 1e-8;
  double max = 5e-3;
};

struct AdaptDecision {
  Marking marking;
  double tau = 0.0;
  bool halved = false;
  bool grew = false;
};

inline constexpr int kHalveIterations = 30;
inline constexpr int kGrowIterations = 15;

// 0.5 tau if eta_time2 > TOL_tau or fp_iters > 30; 1.5 tau if
// eta_time2 < 0.3 TOL_tau and fp_iters < 15; otherwise tau. Clamped.
AdaptDecision adjust_timestep(double eta_time2, int fp_iters, double tol_tau, double tau,
                              TimeStepLimits limits = {});

}  // namespace stvf
