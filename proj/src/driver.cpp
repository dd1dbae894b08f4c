#include "stvf/driver.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "stvf/adapt.hpp"

namespace stvf {

double disc_indicator(Point p) {
  const double dx = p.x - 0.5, dy = p.y - 0.5;
  return dx * dx + dy * dy <= 0.0625 ? 1.0 : 0.0;
}

int thread_budget() {
  if (const char* env = std::getenv("STVF_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return omp_get_max_threads();
}

namespace {

// State bound to one mesh of the path.
struct Level {
  std::shared_ptr<FeSpace> space;
  FeFunction g_h;
  std::vector<FeFunction> sigma_h;
  double sigma_time = -1.0;
};

}  // namespace

PathLog run_path(const RunConfig& cfg, int path, const PathOptions& options) {
  cfg.validate();
  const auto macro = std::make_shared<const Mesh>(Mesh::macro(cfg.macro_n));
  const NoiseModel model = NoiseModel::preset(cfg.noise, cfg.sigma_amplitude);
  const Tolerances tol = cfg.tolerances();
  const TimeStepLimits limits = cfg.limits();
  const SchemeVariant variant = cfg.variant();

  PathRng increments(cfg.seed, static_cast<std::uint64_t>(path), Stream::increments);
  // g is fixed data: one realization of its perturbation per seed.
  PathRng data(cfg.seed, 0, Stream::data);
  const FeFunction xi = g_perturbation(data, *macro, cfg.data_perturbation);
  NoiseHistory history(model, *macro);

  Level level;
  const auto bind = [&](std::shared_ptr<const Mesh> mesh) {
    level.space = std::make_shared<FeSpace>(std::move(mesh));
    level.g_h = level.space->interpolate_dirichlet(disc_indicator) +
                transfer(xi, *macro, level.space->mesh());
    level.sigma_h.clear();
    level.sigma_time = -1.0;
  };
  const auto sigma_at = [&](double t) -> const std::vector<FeFunction>& {
    if (level.sigma_time < 0.0 || (!model.time_constant() && level.sigma_time != t)) {
      level.sigma_h = sigma_h(model, t, *macro, *level.space);
      level.sigma_time = t;
    }
    return level.sigma_h;
  };
  bind(macro);

  PathLog log;
  log.path_id = path;
  FeFunction x = level.space->zero();
  FeFunction sigma_acc = level.space->zero();
  std::vector<double> eta_T_prev;

  std::vector<double> snap_times = cfg.snapshot_times;
  std::sort(snap_times.begin(), snap_times.end());
  std::size_t next_snap = 0;
  const auto take_snapshots = [&](double t, const FeFunction& f, const std::vector<double>& eta) {
    while (next_snap < snap_times.size() && t >= snap_times[next_snap] - 1e-14) {
      if (options.keep_snapshots) {
        log.snapshots.push_back({snap_times[next_snap], level.space->mesh_ptr(), f, eta});
      }
      ++next_snap;
    }
  };
  take_snapshots(0.0, x, {});

  const double T = cfg.T;
  double t = 0.0;
  double tau = std::clamp(cfg.tau0, limits.min, limits.max);
  int n = 0;
  while (t < T) {
    ++n;
    if (n > 1 && cfg.adapt_space) {
      const Marking mk = mark(eta_T_prev, tol.h, level.space->mesh().num_vertices());
      std::shared_ptr<const Mesh> mesh = level.space->mesh_ptr();
      std::vector<ElementKey> coarse_keys;
      coarse_keys.reserve(mk.coarsen.size());
      for (auto k : mk.coarsen) coarse_keys.push_back(mesh->leaf_element(k).key);
      if (!mk.refine.empty()) mesh = std::make_shared<const Mesh>(refine(*mesh, mk.refine));
      std::vector<std::int32_t> coarse_ids;
      for (auto key : coarse_keys) {
        if (auto leaf = mesh->find_leaf(key)) coarse_ids.push_back(*leaf);
      }
      if (!coarse_ids.empty()) {
        auto coarser = std::make_shared<const Mesh>(coarsen(*mesh, coarse_ids));
        if (coarser->num_triangles() != mesh->num_triangles()) mesh = std::move(coarser);
      }
      if (mesh != level.space->mesh_ptr()) {
        const auto old = level.space->mesh_ptr();
        x = transfer(x, *old, *mesh);
        sigma_acc = transfer(sigma_acc, *old, *mesh);
        bind(mesh);
      }
    }
    const FeSpace& space = *level.space;

    double tau_n = options.tau_sequence
                       ? options.tau_sequence->at(static_cast<std::size_t>(n - 1))
                       : tau;
    if (t + tau_n >= T || T - (t + tau_n) < 1e-12 * T) tau_n = T - t;

    const auto& sig = sigma_at(t);
    StepParams params{tau_n, cfg.eps, cfg.lambda, variant, cfg.cg_tol};
    StepResult result;
    FeFunction noise;
    for (;;) {
      params.tau = tau_n;
      const auto dw = wiener_increments(increments, tau_n, model.num_drivers());
      noise = noise_term(sig, dw, space.mesh());
      try {
        result = step(space, x, level.g_h, noise, params);
        break;
      } catch (const SolverError& e) {
        if (options.tau_sequence || 0.5 * tau_n < limits.min) {
          throw std::runtime_error("path " + std::to_string(path) + " step " +
                                   std::to_string(n) + ": " + e.what());
        }
        tau_n *= 0.5;
        tau = tau_n;
      }
    }
    const double t_next = (tau_n == T - t) ? T : t + tau_n;
    FeFunction sigma_next = sigma_acc + noise;

    if (options.observer) {
      options.observer(
          StepView{n, t_next, tau_n, space, x, level.g_h, sigma_acc, sigma_next, result, cfg});
    }

    IndicatorRecord rec;
    rec.n = n;
    rec.t = t_next;
    rec.tau = tau_n;
    rec.ndof = space.dim();
    const auto tm = eta_time(space, result.x, x);
    rec.eta_time1 = tm.eta1;
    rec.eta_time2 = tm.eta2;
    const auto sp = eta_space(
        space, interior_residual(space, result.x, x, level.g_h, noise, tau_n, cfg.lambda),
        jump_residual(space, result.x, cfg.eps));
    rec.eta_space1 = sp.eta1;
    rec.eta_space2 = sp.eta2;
    const auto nz = history.advance(t, t_next);
    rec.eta_noise1 = nz.eta1;
    rec.eta_noise2 = nz.eta2;
    rec.eta_noise3 = nz.eta3;
    rec.eta_lin = eta_lin(space, result.x, result.x_star, cfg.eps);
    rec.fp_iters = result.fp_iters;
    if (options.keep_eta_T) rec.eta_T = sp.per_element;

    if (!options.tau_sequence && cfg.adapt_time) {
      const int iters = result.cap_hit ? variant.max_iters + 1 : result.fp_iters;
      tau = adjust_timestep(rec.eta_time2, iters, tol.tau, tau_n, limits).tau;
    }

    x = std::move(result.x);
    sigma_acc = std::move(sigma_next);
    t = t_next;
    take_snapshots(t, x, sp.per_element);
    eta_T_prev = sp.per_element;
    log.records.push_back(std::move(rec));
  }
  if (!log.records.empty()) log.records.back().eta_T = eta_T_prev;
  log.final_mesh = level.space->mesh_ptr();
  log.final_x = std::move(x);
  return log;
}

const char* quantity_name(Quantity q) {
  switch (q) {
    case Quantity::time1: return "eta_time1";
    case Quantity::time2: return "eta_time2";
    case Quantity::space1: return "eta_space1";
    case Quantity::space2: return "eta_space2";
    case Quantity::noise1: return "eta_noise1";
    case Quantity::noise2: return "eta_noise2";
    case Quantity::noise3: return "eta_noise3";
    case Quantity::lin: return "eta_lin";
    case Quantity::space_total: return "eta_T_sum";
    case Quantity::count: break;
  }
  throw std::invalid_argument("quantity_name: bad quantity");
}

double quantity(const IndicatorRecord& r, Quantity q) {
  switch (q) {
    case Quantity::time1: return r.eta_time1;
    case Quantity::time2: return r.eta_time2;
    case Quantity::space1: return r.eta_space1;
    case Quantity::space2: return r.eta_space2;
    case Quantity::noise1: return r.eta_noise1;
    case Quantity::noise2: return r.eta_noise2;
    case Quantity::noise3: return r.eta_noise3;
    case Quantity::lin: return r.eta_lin;
    case Quantity::space_total: return r.eta_space1 + 2.0 * r.eta_space2;
    case Quantity::count: break;
  }
  throw std::invalid_argument("quantity: bad quantity");
}

std::vector<double> time_average(const std::vector<IndicatorRecord>& records, Quantity q) {
  std::vector<double> out;
  out.reserve(records.size());
  double acc = 0.0;
  for (const auto& r : records) {
    acc += r.tau * quantity(r, q);
    out.push_back(acc / r.t);
  }
  return out;
}

EnsembleSummary summarize(const std::vector<PathLog>& logs) {
  EnsembleSummary s;
  std::vector<std::array<double, kQuantityCount>> finals;
  double ndof = 0.0, steps = 0.0;
  for (const auto& log : logs) {
    if (log.failed || log.records.empty()) {
      s.failed_paths.push_back(log.path_id);
      continue;
    }
    std::array<double, kQuantityCount> f{};
    for (std::size_t q = 0; q < kQuantityCount; ++q) {
      f[q] = time_average(log.records, static_cast<Quantity>(q)).back();
    }
    finals.push_back(f);
    ndof += static_cast<double>(log.records.back().ndof);
    steps += static_cast<double>(log.records.size());
  }
  s.paths_ok = static_cast<int>(finals.size());
  if (finals.empty()) return s;
  const double m = static_cast<double>(finals.size());
  s.mean_final_ndof = ndof / m;
  s.mean_steps = steps / m;
  for (std::size_t q = 0; q < kQuantityCount; ++q) {
    double mean = 0.0;
    for (const auto& f : finals) mean += f[q];
    mean /= m;
    double var = 0.0;
    for (const auto& f : finals) var += (f[q] - mean) * (f[q] - mean);
    s.mean_final_average[q] = mean;
    s.stderr_final_average[q] = finals.size() > 1 ? std::sqrt(var / (m - 1.0) / m) : 0.0;
  }
  return s;
}

McResult run_mc(const RunConfig& cfg, const PathOptions& options) {
  cfg.validate();
  McResult out;
  out.logs.resize(static_cast<std::size_t>(cfg.paths));
  const int threads = std::max(1, std::min(thread_budget(), cfg.paths));
  omp_set_num_threads(thread_budget());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads) if (cfg.paths > 1)
  for (int p = 0; p < cfg.paths; ++p) {
    try {
      out.logs[p] = run_path(cfg, p, options);
    } catch (const std::exception& e) {
      out.logs[p].path_id = p;
      out.logs[p].failed = true;
      out.logs[p].error = e.what();
    }
  }
  out.summary = summarize(out.logs);
  return out;
}

}  // namespace stvf
