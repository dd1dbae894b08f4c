// Property checks runnable from the command line and the acceptance suite.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stvf/config.hpp"

namespace stvf {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;  // measured quantity
  double bound = 0.0;  // threshold it is compared with
  std::string detail;
  double seconds = 0.0;
};

// max_n ||Y^n - (X^n - Sigma^n)||_{L2} for one adaptive path, where Y
// follows the noise-free recurrence driven by the computed X^n.
CheckResult check_transformation(const RunConfig& config, int path = 0);

// Noise-free FIX(1e-10) run on a fixed mesh: energy plus dissipation must not
// increase by more than 1e-8 in any step.
CheckResult check_energy_decay(int macro_n = 16, int steps = 200, double tau = 1e-4);

struct EpsilonGap {
  double sup_gap_sq = 0.0;   // sup_n ||X^{eps1,n} - X^{eps2,n}||^2
  double analytic = 0.0;     // 2 T |O| (eps1 + eps2)
  std::size_t steps = 0;
};

// Noise-free runs on a fixed mesh sharing the step sizes chosen by the eps1 run.
EpsilonGap epsilon_gap_study(const RunConfig& config, double eps1, double eps2);
CheckResult check_epsilon_gap(const RunConfig& config, double eps1 = 1.0 / 32.0,
                              double eps2 = 1.0 / 128.0);

struct IsometrySample {
  double mean = 0.0;      // sample mean of ||Sigma_h^N||^2
  double stderr_ = 0.0;   // its standard error
  double expected = 0.0;  // sum_i tau_i sum_k ||sigma_h,k||^2
};

// Noise-only accumulation on the macro mesh with the driver's increment streams.
IsometrySample ito_isometry(const RunConfig& config, int paths, double tau, int steps);
CheckResult check_isometry(const RunConfig& config, int paths = 1000, double tau = 1e-3,
                           int steps = 50);

}  // namespace stvf
