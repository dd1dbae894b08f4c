#include "stvf/solver.hpp"

#include <cmath>

namespace stvf {

SchemeVariant SchemeVariant::fix(double tol, int max_iters) {
  if (!(tol > 0.0)) throw std::invalid_argument("FIX tolerance must be positive");
  if (max_iters < 1) throw std::invalid_argument("FIX iteration cap must be >= 1");
  return {SchemeKind::fix, tol, max_iters};
}

std::string SchemeVariant::name() const {
  switch (kind) {
    case SchemeKind::si: return "si";
    case SchemeKind::fix3: return "fix3";
    case SchemeKind::fix: return "fix";
  }
  return "fix";
}

SchemeVariant SchemeVariant::parse(const std::string& name, double tol, int max_iters) {
  if (name == "si") return si();
  if (name == "fix3") return fix3();
  if (name == "fix") return fix(tol, max_iters);
  throw std::invalid_argument("unknown scheme: " + name + " (expected si, fix3 or fix)");
}

std::vector<double> cg_solve(const SparseOperator& A, std::span<const double> b, double tol,
                             CgReport* report) {
  namespace k = kernels::parallel;
  const std::size_t n = A.dim();
  std::vector<double> x(n, 0.0);
  const double bnorm = std::sqrt(k::dot(b, b));
  if (report) *report = CgReport{};
  if (bnorm == 0.0) return x;

  const auto diag = A.diagonal();
  std::vector<double> inv_d(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(diag[i] > 0.0)) throw SolverError("cg_solve: non-positive diagonal entry");
    inv_d[i] = 1.0 / diag[i];
  }

  std::vector<double> r(b.begin(), b.end());
  std::vector<double> z(n), p(n), q(n);
  const int cap = static_cast<int>(10 * n);
  int it = 0;
  double rel = 1.0;
  // Restart from the true residual when the recursive one has drifted.
  for (int restart = 0; restart < 4 && it < cap; ++restart) {
    if (restart > 0) {
      A.apply(x, q);
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_d[i] * r[i];
    p = z;
    double rz = k::dot(r, z);
    rel = std::sqrt(k::dot(r, r)) / bnorm;
    while (rel > tol && it < cap) {
      A.apply(p, q);
      const double pq = k::dot(p, q);
      if (!(pq > 0.0)) throw SolverError("cg_solve: operator is not positive definite");
      const double alpha = rz / pq;
      k::axpy(alpha, p, x);
      k::axpy(-alpha, q, r);
      for (std::size_t i = 0; i < n; ++i) z[i] = inv_d[i] * r[i];
      const double rz_new = k::dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
      ++it;
      rel = std::sqrt(k::dot(r, r)) / bnorm;
      if (report) {
        report->alpha.push_back(alpha);
        report->beta.push_back(beta);
      }
    }
    A.apply(x, q);
    double true_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) true_res += (b[i] - q[i]) * (b[i] - q[i]);
    rel = std::sqrt(true_res) / bnorm;
    if (rel <= tol) break;
  }
  if (report) {
    report->iterations = it;
    report->relative_residual = rel;
  }
  if (rel > tol) {
    throw SolverError("cg_solve: no convergence after " + std::to_string(it) +
                      " iterations (relative residual " + std::to_string(rel) + ")");
  }
  return x;
}

StepResult step(const FeSpace& space, const FeFunction& x_prev, const FeFunction& g_h,
                const FeFunction& noise, const StepParams& params, bool keep_cg_reports) {
  const Mesh& mesh = space.mesh();
  require_on(mesh, {&x_prev, &g_h, &noise});
  if (!(params.tau > 0.0)) throw std::invalid_argument("step: tau must be positive");
  if (params.lambda < 0.0) throw std::invalid_argument("step: lambda must be >= 0");

  const double tau = params.tau;
  const std::size_t n = space.dim();
  std::vector<double> combined(n);
  for (std::size_t i = 0; i < n; ++i) {
    combined[i] = x_prev[i] + tau * params.lambda * g_h[i] + noise[i];
  }
  auto rhs = space.mass().apply(combined);
  const auto mask = mesh.boundary_mask();
  for (std::size_t i = 0; i < n; ++i) {
    if (mask[i]) rhs[i] = 0.0;
  }

  const auto solve_frozen = [&](const FeFunction& frozen, StepResult& out) {
    const auto A = assemble_tv_stiffness(space, frozen, params.eps);
    const auto S = eliminate_dirichlet(
        linear_combination(1.0 + tau * params.lambda, space.mass(), tau, A), mask);
    CgReport rep;
    FeFunction x{cg_solve(S, rhs, params.cg_tol, &rep), mesh.generation()};
    out.cg_residuals.push_back(rep.relative_residual);
    out.cg_iterations.push_back(rep.iterations);
    if (keep_cg_reports) out.cg_reports.push_back(std::move(rep));
    return x;
  };

  StepResult out;
  const int solves = params.variant.kind == SchemeKind::si     ? 1
                     : params.variant.kind == SchemeKind::fix3 ? 3
                                                               : params.variant.max_iters;
  FeFunction current = x_prev;
  for (int l = 1; l <= solves; ++l) {
    FeFunction next = solve_frozen(current, out);
    out.update = linf_diff(next, current);
    out.fp_iters = l;
    out.x_star = std::move(current);
    current = std::move(next);
    if (params.variant.kind == SchemeKind::fix && out.update < params.variant.tol) break;
  }
  out.cap_hit = params.variant.kind == SchemeKind::fix && !(out.update < params.variant.tol);
  out.x = std::move(current);
  return out;
}

}  // namespace stvf
