// Pathwise adaptive simulation and Monte Carlo ensembles.
#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "stvf/config.hpp"
#include "stvf/estimators.hpp"
#include "stvf/fem.hpp"
#include "stvf/noise.hpp"
#include "stvf/solver.hpp"

namespace stvf {

// Characteristic function of the disc of radius 0.25 around (0.5, 0.5).
double disc_indicator(Point p);

struct Snapshot {
  double t = 0.0;
  std::shared_ptr<const Mesh> mesh;
  FeFunction x;
  std::vector<double> eta_T;  // empty for the initial snapshot
};

struct PathLog {
  int path_id = 0;
  std::vector<IndicatorRecord> records;
  std::vector<Snapshot> snapshots;
  std::shared_ptr<const Mesh> final_mesh;
  FeFunction final_x;
  bool failed = false;
  std::string error;
};

// Everything a step observer may inspect; all functions live on `space`.
struct StepView {
  int n;
  double t;
  double tau;
  const FeSpace& space;
  const FeFunction& x_prev;      // X^{n-1} transferred to the step's mesh
  const FeFunction& g_h;
  const FeFunction& sigma_prev;  // Sigma^{n-1} transferred
  const FeFunction& sigma;       // Sigma^n
  const StepResult& result;
  const RunConfig& config;
};

using StepObserver = std::function<void(const StepView&)>;

struct PathOptions {
  StepObserver observer;
  // Replays these step sizes instead of the adaptive time-step rule.
  const std::vector<double>* tau_sequence = nullptr;
  bool keep_snapshots = true;
  bool keep_eta_T = false;  // retain per-element maps in every record
};

// Throws std::runtime_error when the solver keeps failing at tau_min.
PathLog run_path(const RunConfig& config, int path, const PathOptions& options = {});

enum class Quantity {
  time1, time2, space1, space2, noise1, noise2, noise3, lin,
  space_total,  // sum_T eta_T = eta_space1 + 2 eta_space2
  count
};
inline constexpr std::size_t kQuantityCount = static_cast<std::size_t>(Quantity::count);
const char* quantity_name(Quantity q);
double quantity(const IndicatorRecord& r, Quantity q);

// Running average t_n^{-1} sum_{i<=n} tau_i eta^i.
std::vector<double> time_average(const std::vector<IndicatorRecord>& records, Quantity q);

struct EnsembleSummary {
  int paths_ok = 0;
  std::vector<int> failed_paths;
  std::array<double, kQuantityCount> mean_final_average{};
  std::array<double, kQuantityCount> stderr_final_average{};
  double mean_final_ndof = 0.0;
  double mean_steps = 0.0;
};

struct McResult {
  std::vector<PathLog> logs;  // ordered by path id
  EnsembleSummary summary;
};

// Runs config.paths paths in parallel; a failed path is reported in
// its log and excluded from the summary.
McResult run_mc(const RunConfig& config, const PathOptions& options = {});

EnsembleSummary summarize(const std::vector<PathLog>& logs);

// Thread count: STVF_THREADS if set and positive, else the OpenMP default.
int thread_budget();

}  // namespace stvf
