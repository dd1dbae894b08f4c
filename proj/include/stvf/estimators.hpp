// A posteriori indicators: residuals, time, space, noise and linearization.
// All values are per path; expectations are taken by the Monte Carlo driver.
#pragma once

#include <cstddef>
#include <vector>

#include "stvf/fem.hpp"
#include "stvf/noise.hpp"

namespace stvf {

struct IndicatorRecord {
  int n = 0;
  double t = 0.0;
  double tau = 0.0;
  std::size_t ndof = 0;
  double eta_time1 = 0.0;
  double eta_time2 = 0.0;
  double eta_space1 = 0.0;
  double eta_space2 = 0.0;
  double eta_noise1 = 0.0;
  double eta_noise2 = 0.0;
  double eta_noise3 = 0.0;
  double eta_lin = 0.0;
  int fp_iters = 0;
  std::vector<double> eta_T;  // per leaf of the step's mesh; not written to CSV
};

// ||R||^2_{L2(T)} per leaf, R = lambda (g - X^n) - (X^n - X^{n-1})/tau + noise/tau.
std::vector<double> interior_residual(const FeSpace& space, const FeFunction& xn,
                                      const FeFunction& xprev, const FeFunction& g,
                                      const FeFunction& noise, double tau, double lambda,
                                      Exec exec = Exec::parallel);

// ||J_E||^2_{L2(E)} = h_E J_E^2 per edge with J_E = 1/2 (q_K1 - q_K2) . nu_E,
// q = grad X / |grad X|_eps. Zero on boundary edges.
std::vector<double> jump_residual(const FeSpace& space, const FeFunction& xn, double eps,
                                  Exec exec = Exec::parallel);

struct TimeIndicators {
  double eta1 = 0.0;  // ||X^n - X^{n-1}||_{L2}
  double eta2 = 0.0;  // ||grad (X^n - X^{n-1})||_{L2}
};

TimeIndicators eta_time(const FeSpace& space, const FeFunction& xn, const FeFunction& xprev);

struct SpaceIndicators {
  double eta1 = 0.0;
  double eta2 = 0.0;
  // h_T^2 ||R||_T^2 plus h_E ||J_E||^2 of every edge of T.
  std::vector<double> per_element;
};

SpaceIndicators eta_space(const FeSpace& space, const std::vector<double>& residual_sq,
                          const std::vector<double>& jump_sq, Exec exec = Exec::parallel);

// sum_T area |grad X^n|^2 (1/|grad X*|_eps - 1/|grad X^n|_eps)^2
double eta_lin(const FeSpace& space, const FeFunction& xn, const FeFunction& xstar, double eps,
               Exec exec = Exec::parallel);

struct NoiseIndicators {
  double eta1 = 0.0;
  double eta2 = 0.0;
  double eta3 = 0.0;
};

// Running sums over completed steps needed by the noise indicators. The
// spatial norms compare the analytic modes with their macro-mesh
// interpolants (sigma_h) using a degree-4 rule on the macro mesh; time
// integrals use the composite trapezoid rule on kTimeSamples subintervals.
class NoiseHistory {
 public:
  static constexpr int kTimeSamples = 8;

  NoiseHistory(const NoiseModel& model, const Mesh& macro);

  // Indicators of the step [t_prev, t_next]; the step is then recorded.
  NoiseIndicators advance(double t_prev, double t_next);

  // Sums over modes: ||sigma(t) - sigma(s)||^2 and ||grad(...)||^2.
  std::array<double, 2> drift_sq(double t, double s) const;
  // Sums over modes: ||sigma(t) - sigma_h(t)||^2 and ||grad(...)||^2.
  std::array<double, 2> interpolation_sq(double t) const;
  // Sums over modes: ||sigma(t)||^2 and ||grad sigma(t)||^2.
  std::array<double, 2> norm_sq(double t) const;

 private:
  const NoiseModel* model_;
  const Mesh* macro_;
  Geometry geometry_;
  bool constant_;
  bool cached_ = false;
  std::array<double, 2> const_interp_{};
  std::array<double, 2> const_norm_{};
  double drift_l2_ = 0.0, drift_h1_ = 0.0;
  double interp_l2_ = 0.0, interp_h1_ = 0.0;
};

}  // namespace stvf
