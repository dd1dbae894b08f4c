// stvf: adaptive simulation of the regularized stochastic TV flow.
//
//   stvf run       [flags]   Monte Carlo run: indicators.csv, summary.json, *.vtk
//   stvf validate  SUITE     transformation | energy | epsilon | isometry | oracles
//   stvf sweep     [flags]   run for tolerance levels 0, 1, 2
//
// Exit codes: 0 success, 1 path or validation failure, 2 bad configuration.

#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "oracle_suite.hpp"
#include "stvf/config.hpp"
#include "stvf/driver.hpp"
#include "stvf/io.hpp"
#include "stvf/validation.hpp"

namespace fs = std::filesystem;
using namespace stvf;

namespace {

struct Flags {
  std::string config;
  std::optional<int> paths;
  std::optional<std::uint64_t> seed;
  std::optional<int> tol_level;
  std::optional<std::string> scheme;
  bool no_adapt = false;
  std::optional<std::string> out;
};

void add_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON configuration file")->check(CLI::ExistingFile);
  app->add_option("--paths", f.paths, "number of Monte Carlo paths");
  app->add_option("--seed", f.seed, "base random seed");
  app->add_option("--tol-level", f.tol_level, "tolerance level k: TOL = 2^-k (2, 0.25)");
  app->add_option("--scheme", f.scheme, "linearization: si, fix3 or fix")
      ->check(CLI::IsMember({"si", "fix3", "fix"}));
  app->add_flag("--no-adapt", f.no_adapt, "fixed macro mesh and fixed time step");
  app->add_option("--out", f.out, "output directory");
}

RunConfig load(const Flags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : RunConfig::from_file(f.config);
  if (f.paths) c.paths = *f.paths;
  if (f.seed) c.seed = *f.seed;
  if (f.tol_level) c.tol_level = *f.tol_level;
  if (f.scheme) c.scheme = *f.scheme;
  if (f.no_adapt) c.adapt_space = c.adapt_time = false;
  if (f.out) c.output_dir = *f.out;
  c.validate();
  return c;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

// Returns the number of failed paths.
int run_and_write(const RunConfig& cfg, const std::string& suffix) {
  fs::create_directories(cfg.output_dir);
  const McResult result = run_mc(cfg);
  const fs::path dir(cfg.output_dir);
  write_csv((dir / ("indicators" + suffix + ".csv")).string(), result.logs);
  write_text(dir / ("summary" + suffix + ".json"), summary_json(cfg, result));
  for (const auto& log : result.logs) {
    for (std::size_t k = 0; k < log.snapshots.size(); ++k) {
      const auto& s = log.snapshots[k];
      char name[96];
      std::snprintf(name, sizeof name, "path%d%s_t%.4f.vtk", log.path_id, suffix.c_str(), s.t);
      write_vtk((dir / name).string(), *s.mesh, s.x, s.eta_T);
    }
  }
  for (const auto& log : result.logs) {
    if (log.failed) std::cerr << "path " << log.path_id << " failed: " << log.error << '\n';
  }
  std::cout << "paths ok " << result.summary.paths_ok << '/' << cfg.paths << ", mean steps "
            << result.summary.mean_steps << ", mean final ndof " << result.summary.mean_final_ndof
            << ", output " << cfg.output_dir << '\n';
  return static_cast<int>(result.summary.failed_paths.size());
}

int report(const CheckResult& r) {
  std::printf("%s %s: %s (%.1f s)\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
              r.detail.c_str(), r.seconds);
  return r.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive finite elements for the regularized stochastic TV flow"};
  app.require_subcommand(1);
  Flags flags;
  auto* run = app.add_subcommand("run", "Monte Carlo run with output files");
  add_flags(run, flags);
  auto* sweep = app.add_subcommand("sweep", "run for tolerance levels 0..2");
  add_flags(sweep, flags);
  auto* validate = app.add_subcommand("validate", "run a validation suite");
  std::string suite;
  validate->add_option("suite", suite, "validation suite")
      ->required()
      ->check(CLI::IsMember({"transformation", "energy", "epsilon", "isometry", "oracles"}));
  add_flags(validate, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  omp_set_num_threads(thread_budget());
  try {
    if (run->parsed()) {
      return run_and_write(load(flags), "") > 0 ? 1 : 0;
    }
    if (sweep->parsed()) {
      RunConfig base = load(flags);
      int failed = 0;
      for (int k = 0; k <= 2; ++k) {
        RunConfig c = base;
        c.tol_level = k;
        c.tol_h.reset();
        c.tol_tau.reset();
        failed += run_and_write(c, "_tol" + std::to_string(k));
      }
      return failed > 0 ? 1 : 0;
    }
    const RunConfig cfg = load(flags);
    if (suite == "transformation") {
      RunConfig c = cfg;
      c.paths = 1;
      return report(check_transformation(c));
    }
    if (suite == "energy") return report(check_energy_decay());
    if (suite == "epsilon") return report(check_epsilon_gap(cfg));
    if (suite == "isometry") return report(check_isometry(cfg));
    const int a = report(oracle::estimator_oracles());
    const int b = report(oracle::energy_gradient_check());
    return a | b;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
