// Acceptance suite: one PASS/FAIL line per criterion.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "oracle_suite.hpp"
#include "stvf/driver.hpp"
#include "stvf/validation.hpp"

using namespace stvf;

namespace {

int failures = 0;
std::vector<int> known;        // criteria documented as unattainable
std::vector<int> failed_ids;

void line(int id, const std::string& name, bool passed, const std::string& detail, double seconds,
          double budget) {
  const bool in_time = seconds <= budget;
  const bool ok = passed && in_time;
  if (!ok) {
    ++failures;
    failed_ids.push_back(id);
  }
  std::printf("[%s] %d %s: %s; %.1f s (budget %.0f s)%s\n", ok ? "PASS" : "FAIL", id,
              name.c_str(), detail.c_str(), seconds, budget, in_time ? "" : " OVER BUDGET");
  std::fflush(stdout);
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Localization {
  int depth = 0;
  std::size_t deepest = 0;
  double share = 0.0;
};

// Share of the deepest leaves whose barycenter is within 0.05 of the circle.
Localization localization(const Mesh& mesh) {
  Localization out;
  out.depth = mesh.max_level();
  std::size_t inside = 0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.leaf_element(t).level != out.depth) continue;
    ++out.deepest;
    double cx = 0.0, cy = 0.0;
    for (VertexId i : mesh.triangle(t)) {
      cx += mesh.vertex(i).x / 3.0;
      cy += mesh.vertex(i).y / 3.0;
    }
    if (std::abs(std::hypot(cx - 0.5, cy - 0.5) - 0.25) <= 0.05) ++inside;
  }
  out.share = out.deepest ? static_cast<double>(inside) / out.deepest : 0.0;
  return out;
}

}  // namespace

// Usage: acceptance [--known-failure ID]...
// Known failures still print FAIL; they only stop counting towards the
// exit status.
int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--known-failure") known.push_back(std::atoi(argv[++i]));
  }
  omp_set_num_threads(thread_budget());
  RunConfig reference;

  // 1, 7, 8: one adaptive reference path.
  auto t0 = std::chrono::steady_clock::now();
  RunConfig cfg1 = reference;
  cfg1.paths = 1;
  cfg1.snapshot_times.clear();
  const CheckResult tr = check_transformation(cfg1, 0);
  line(1, "discrete transformation", tr.passed, tr.detail, tr.seconds, 120.0);

  {
    const CheckResult r = check_energy_decay(16, 200, 1e-4);
    line(2, "deterministic energy decay", r.passed, r.detail, r.seconds, 60.0);
  }
  {
    const CheckResult r = check_epsilon_gap(reference, 1.0 / 32.0, 1.0 / 128.0);
    line(3, "epsilon gap", r.passed, r.detail, r.seconds, 180.0);
  }
  {
    const CheckResult r = check_isometry(reference, 1000, 1e-3, 50);
    line(4, "Ito isometry", r.passed, r.detail, r.seconds, 120.0);
  }
  {
    const CheckResult r = oracle::estimator_oracles();
    line(5, "estimator oracles", r.passed, r.detail, r.seconds, 5.0);
  }
  {
    const CheckResult r = oracle::energy_gradient_check();
    line(6, "energy gradient", r.passed, r.detail, r.seconds, 5.0);
  }

  t0 = std::chrono::steady_clock::now();
  PathOptions opts;
  opts.keep_snapshots = false;
  PathOptions with_eta = opts;
  with_eta.keep_eta_T = true;
  const PathLog fix = run_path(cfg1, 0, with_eta);
  const double fix_seconds = since(t0);
  {
    const Localization loc = localization(*fix.final_mesh);
    const Tolerances tol = reference.tolerances();
    double max_eta = 0.0;
    std::size_t max_nodes = 0;
    for (const auto& r : fix.records) {
      for (double e : r.eta_T) max_eta = std::max(max_eta, e);
      max_nodes = std::max(max_nodes, r.ndof);
    }
    const double threshold = 0.9 * tol.h / std::sqrt(static_cast<double>(max_nodes));
    // Not asserted: the same path with a 100x smaller TOL_h, to show where
    // the marking refines once it is triggered at all.
    RunConfig diag = cfg1;
    diag.tol_h = 0.02;
    const auto t1 = std::chrono::steady_clock::now();
    const Localization small = localization(*run_path(diag, 0, opts).final_mesh);
    const double diag_seconds = since(t1);
    line(7, "adaptive localization", loc.deepest > 0 && loc.share >= 0.8,
         num(100.0 * loc.share) + "% of " + std::to_string(loc.deepest) + " leaves at depth " +
             std::to_string(loc.depth) + " in the annulus (>= 80%); largest eta_T " +
             num(max_eta) + " vs refinement threshold " + num(threshold) +
             "; with TOL_h = 0.02 (not asserted): " + num(100.0 * small.share) + "% of " +
             std::to_string(small.deepest) + " leaves at depth " + std::to_string(small.depth),
         fix_seconds + diag_seconds, 600.0);
  }
  {
    const Tolerances tol = reference.tolerances();
    const double avg_time2 = time_average(fix.records, Quantity::time2).back();
    const double avg_space = time_average(fix.records, Quantity::space_total).back();
    line(8, "tolerance compliance", avg_time2 <= tol.tau && avg_space <= tol.h,
         "time-averaged eta_time2 " + num(avg_time2) + " <= " + num(tol.tau) +
             ", time-averaged sum eta_T " + num(avg_space) + " <= " + num(tol.h),
         fix_seconds, 600.0);
  }
  {
    t0 = std::chrono::steady_clock::now();
    RunConfig c = cfg1;
    c.scheme = "fix3";
    const PathLog fix3 = run_path(c, 0, opts);
    c.scheme = "si";
    const PathLog si = run_path(c, 0, opts);
    const double seconds = since(t0) + fix_seconds;
    const double l_fix = time_average(fix.records, Quantity::lin).back();
    const double l_fix3 = time_average(fix3.records, Quantity::lin).back();
    const double l_si = time_average(si.records, Quantity::lin).back();
    const double t2 = time_average(fix.records, Quantity::time2).back();
    line(9, "scheme ordering", l_fix <= l_fix3 && l_fix3 <= l_si,
         "time-averaged eta_lin FIX " + num(l_fix) + " <= FIX3 " + num(l_fix3) + " <= SI " +
             num(l_si) + "; FIX / eta_time2 = " + num(l_fix / t2) + " (reported)",
         seconds, 900.0);
  }
  int unexpected = 0;
  std::string listed;
  for (int id : failed_ids) {
    const bool is_known = std::find(known.begin(), known.end(), id) != known.end();
    if (!is_known) ++unexpected;
    listed += " " + std::to_string(id) + (is_known ? " (known)" : "");
  }
  std::printf("%d of 9 criteria failed:%s\n", failures, failures ? listed.c_str() : " none");
  return unexpected == 0 ? 0 : 1;
}
