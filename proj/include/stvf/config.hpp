// Run configuration: a flat JSON object whose keys default to the
// reference experiment, so an empty object reproduces it.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stvf/adapt.hpp"
#include "stvf/solver.hpp"

namespace stvf {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  double T = 0.05;
  double lambda = 200.0;
  double eps = 1.0 / 32.0;
  double sigma_amplitude = 0.25;
  double tau0 = 1e-5;
  int macro_n = 32;
  int tol_level = 0;
  std::optional<double> tol_h;    // overrides the level when set
  std::optional<double> tol_tau;  // overrides the level when set
  double fp_tol = 1e-4;
  int fp_max_iters = 30;
  std::string scheme = "fix";
  double cg_tol = 1e-10;
  int paths = 10;
  std::uint64_t seed = 1;
  std::vector<double> snapshot_times{0.0, 0.0017, 0.0026, 0.0038, 0.05};
  std::string output_dir = "out";
  bool adapt_space = true;
  bool adapt_time = true;
  std::string noise = "paper-sines";
  double data_perturbation = 0.1;  // amplitude of the random part of g_h
  double tau_min = 1e-8;
  std::optional<double> tau_max;  // T / 10 when unset

  Tolerances tolerances() const;
  SchemeVariant variant() const;
  TimeStepLimits limits() const;

  // Throws ConfigError naming the first offending field.
  void validate() const;

  static RunConfig from_json(const std::string& text);
  static RunConfig from_file(const std::string& path);
  std::string to_json() const;
};

}  // namespace stvf
