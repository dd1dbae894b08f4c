#include "stvf/validation.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "stvf/driver.hpp"

namespace stvf {

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string describe(double value, const char* op, double bound) {
  std::ostringstream ss;
  ss.precision(6);
  ss << value << ' ' << op << ' ' << bound;
  return ss.str();
}

}  // namespace

CheckResult check_transformation(const RunConfig& config, int path) {
  Stopwatch clock;
  CheckResult out;
  out.name = "transformation";
  std::shared_ptr<const Mesh> y_mesh;
  FeFunction y;
  double defect = 0.0;
  PathOptions opts;
  opts.keep_snapshots = false;
  opts.observer = [&](const StepView& s) {
    const Mesh& mesh = s.space.mesh();
    const FeFunction y_prev = y_mesh ? transfer(y, *y_mesh, mesh) : s.space.zero();
    // M Y^n = M Y^{n-1} - tau A(X*) X^n - tau lambda M (X^n - g_h) on interior rows.
    const FeFunction& xn = s.result.x;
    const auto A = assemble_tv_stiffness(s.space, s.result.x_star, s.config.eps);
    auto rhs = s.space.mass().apply((y_prev - s.config.lambda * s.tau * (xn - s.g_h)).values);
    const auto axn = A.apply(xn.values);
    const auto mask = mesh.boundary_mask();
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = mask[i] ? 0.0 : rhs[i] - s.tau * axn[i];
    const auto Md = eliminate_dirichlet(s.space.mass(), mask);
    y = FeFunction{cg_solve(Md, rhs, 1e-14), mesh.generation()};
    y_mesh = s.space.mesh_ptr();
    defect = std::max(defect, l2_norm(s.space, y - (xn - s.sigma)));
  };
  const PathLog log = run_path(config, path, opts);
  const auto steps = static_cast<double>(log.records.size());
  out.value = defect;
  out.bound = steps * 1e-8;
  out.passed = defect <= out.bound;
  out.detail = "max defect " + describe(defect, "<=", out.bound) + " over " +
               std::to_string(log.records.size()) + " steps";
  out.seconds = clock.seconds();
  return out;
}

CheckResult check_energy_decay(int macro_n, int steps, double tau) {
  Stopwatch clock;
  CheckResult out;
  out.name = "energy";
  RunConfig cfg;
  cfg.macro_n = macro_n;
  cfg.sigma_amplitude = 0.0;
  cfg.scheme = "fix";
  cfg.fp_tol = 1e-10;
  cfg.fp_max_iters = 1000;
  cfg.tau0 = tau;
  cfg.T = tau * steps;
  cfg.adapt_space = false;
  cfg.adapt_time = false;
  cfg.paths = 1;
  cfg.snapshot_times.clear();
  double worst = -std::numeric_limits<double>::infinity();
  int max_iters = 0;
  PathOptions opts;
  opts.keep_snapshots = false;
  opts.observer = [&](const StepView& s) {
    const FeFunction& xn = s.result.x;
    const FeFunction d = xn - s.x_prev;
    const auto Md = s.space.mass().apply(d.values);
    const double dissipation = kernels::parallel::dot(d.values, Md) / (2.0 * s.tau);
    const double lhs = energy(s.space, xn, s.g_h, s.config.eps, s.config.lambda) + dissipation;
    const double rhs = energy(s.space, s.x_prev, s.g_h, s.config.eps, s.config.lambda);
    worst = std::max(worst, lhs - rhs);
    max_iters = std::max(max_iters, s.result.fp_iters);
  };
  const PathLog log = run_path(cfg, 0, opts);
  out.value = worst;
  out.bound = 1e-8;
  out.passed = worst <= out.bound && static_cast<int>(log.records.size()) == steps;
  out.detail = "max energy increase " + describe(worst, "<=", out.bound) + " over " +
               std::to_string(log.records.size()) + " steps, max fixed-point iterations " +
               std::to_string(max_iters);
  out.seconds = clock.seconds();
  return out;
}

EpsilonGap epsilon_gap_study(const RunConfig& config, double eps1, double eps2) {
  RunConfig cfg = config;
  cfg.sigma_amplitude = 0.0;
  cfg.adapt_space = false;
  cfg.snapshot_times.clear();
  std::vector<std::vector<double>> first;
  PathOptions opts;
  opts.keep_snapshots = false;
  opts.observer = [&](const StepView& s) { first.push_back(s.result.x.values); };
  cfg.eps = eps1;
  const PathLog a = run_path(cfg, 0, opts);
  std::vector<double> taus;
  for (const auto& r : a.records) taus.push_back(r.tau);

  EpsilonGap out;
  out.steps = taus.size();
  out.analytic = 2.0 * cfg.T * 1.0 * (eps1 + eps2);
  cfg.eps = eps2;
  opts.tau_sequence = &taus;
  opts.observer = [&](const StepView& s) {
    const FeFunction other{first.at(static_cast<std::size_t>(s.n - 1)), s.space.generation()};
    const double d = l2_norm(s.space, s.result.x - other);
    out.sup_gap_sq = std::max(out.sup_gap_sq, d * d);
  };
  run_path(cfg, 0, opts);
  return out;
}

CheckResult check_epsilon_gap(const RunConfig& config, double eps1, double eps2) {
  Stopwatch clock;
  CheckResult out;
  out.name = "epsilon";
  const EpsilonGap gap = epsilon_gap_study(config, eps1, eps2);
  out.value = gap.sup_gap_sq;
  out.bound = 2.0 * gap.analytic;
  out.passed = gap.sup_gap_sq <= out.bound;
  out.detail = "sup gap^2 " + describe(gap.sup_gap_sq, "<=", out.bound) + " (analytic " +
               describe(gap.analytic, "x", 2.0) + "), " + std::to_string(gap.steps) + " steps";
  out.seconds = clock.seconds();
  return out;
}

IsometrySample ito_isometry(const RunConfig& config, int paths, double tau, int steps) {
  const auto macro = std::make_shared<const Mesh>(Mesh::macro(config.macro_n));
  const FeSpace space(macro);
  const NoiseModel model = NoiseModel::preset(config.noise, config.sigma_amplitude);
  const auto sig = sigma_h(model, 0.0, *macro, space);
  IsometrySample out;
  for (const auto& s : sig) {
    const double n = l2_norm(space, s);
    out.expected += n * n;
  }
  out.expected *= tau * steps;

  std::vector<double> samples(static_cast<std::size_t>(paths));
  for (int p = 0; p < paths; ++p) {
    PathRng rng(config.seed, static_cast<std::uint64_t>(p), Stream::increments);
    FeFunction acc = space.zero();
    for (int n = 0; n < steps; ++n) {
      const auto dw = wiener_increments(rng, tau, model.num_drivers());
      acc = accumulate_sigma(acc, sig, dw, *macro);
    }
    const double norm = l2_norm(space, acc);
    samples[static_cast<std::size_t>(p)] = norm * norm;
  }
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= paths;
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  out.mean = mean;
  out.stderr_ = paths > 1 ? std::sqrt(var / (paths - 1.0) / paths) : 0.0;
  return out;
}

CheckResult check_isometry(const RunConfig& config, int paths, double tau, int steps) {
  Stopwatch clock;
  CheckResult out;
  out.name = "isometry";
  const IsometrySample s = ito_isometry(config, paths, tau, steps);
  out.value = std::abs(s.mean - s.expected);
  out.bound = 3.0 * s.stderr_;
  out.passed = out.value <= out.bound;
  out.detail = "|mean - expected| " + describe(out.value, "<=", out.bound) + " (mean " +
               std::to_string(s.mean) + ", expected " + std::to_string(s.expected) + ")";
  out.seconds = clock.seconds();
  return out;
}

}  // namespace stvf
