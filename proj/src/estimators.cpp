#include "stvf/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stvf {

namespace {

double reduce(std::span<const double> parts, Exec exec) {
  return exec == Exec::serial ? kernels::serial::sum(parts) : kernels::parallel::sum(parts);
}

template <typename Term>
std::vector<double> per_index(std::size_t n, Exec exec, Term term) {
  std::vector<double> out(n);
  const auto m = static_cast<std::int64_t>(n);
  if (exec == Exec::serial) {
    for (std::int64_t i = 0; i < m; ++i) out[i] = term(static_cast<std::size_t>(i));
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < m; ++i) out[i] = term(static_cast<std::size_t>(i));
  }
  return out;
}

// Degree-4 six-point rule on the reference triangle (barycentric points).
struct QuadPoint {
  double l0, l1, l2, w;
};
constexpr double kA1 = 0.445948490915965;
constexpr double kW1 = 0.223381589678011;
constexpr double kA2 = 0.091576213509771;
constexpr double kW2 = 0.109951743655322;
constexpr std::array<QuadPoint, 6> kDegree4{{
    {1.0 - 2.0 * kA1, kA1, kA1, kW1},
    {kA1, 1.0 - 2.0 * kA1, kA1, kW1},
    {kA1, kA1, 1.0 - 2.0 * kA1, kW1},
    {1.0 - 2.0 * kA2, kA2, kA2, kW2},
    {kA2, 1.0 - 2.0 * kA2, kA2, kW2},
    {kA2, kA2, 1.0 - 2.0 * kA2, kW2},
}};

}  // namespace

std::vector<double> interior_residual(const FeSpace& space, const FeFunction& xn,
                                      const FeFunction& xprev, const FeFunction& g,
                                      const FeFunction& noise, double tau, double lambda,
                                      Exec exec) {
  const Mesh& mesh = space.mesh();
  require_on(mesh, {&xn, &xprev, &g, &noise});
  if (!(tau > 0.0)) throw std::invalid_argument("interior_residual: tau must be positive");
  std::vector<double> r(space.dim());
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = lambda * (g[i] - xn[i]) - (xn[i] - xprev[i]) / tau + noise[i] / tau;
  }
  const auto& tri = space.geometry().triangles;
  return per_index(mesh.num_triangles(), exec, [&](std::size_t t) {
    const auto& v = mesh.triangle(t);
    const double a = r[v[0]], b = r[v[1]], c = r[v[2]];
    const double s = a + b + c;
    return tri[t].area / 12.0 * (a * a + b * b + c * c + s * s);
  });
}

std::vector<double> jump_residual(const FeSpace& space, const FeFunction& xn, double eps,
                                  Exec exec) {
  const Mesh& mesh = space.mesh();
  require_on(mesh, {&xn});
  const auto flux = [&](std::int32_t t) {
    auto g = space.gradient(xn, static_cast<std::size_t>(t));
    const double inv = 1.0 / reg_norm(g[0], g[1], eps);
    return std::array<double, 2>{g[0] * inv, g[1] * inv};
  };
  const auto edges = mesh.edges();
  const auto& eg = space.geometry().edges;
  return per_index(edges.size(), exec, [&](std::size_t e) {
    if (edges[e].boundary()) return 0.0;
    const auto q1 = flux(edges[e].tri[0]);
    const auto q2 = flux(edges[e].tri[1]);
    const double j =
        0.5 * ((q1[0] - q2[0]) * eg[e].normal[0] + (q1[1] - q2[1]) * eg[e].normal[1]);
    return eg[e].length * j * j;
  });
}

TimeIndicators eta_time(const FeSpace& space, const FeFunction& xn, const FeFunction& xprev) {
  const FeFunction d = xn - xprev;
  return {l2_norm(space, d), h1_seminorm(space, d)};
}

SpaceIndicators eta_space(const FeSpace& space, const std::vector<double>& residual_sq,
                          const std::vector<double>& jump_sq, Exec exec) {
  const Mesh& mesh = space.mesh();
  if (residual_sq.size() != mesh.num_triangles() || jump_sq.size() != mesh.num_edges()) {
    throw std::invalid_argument("eta_space: inputs do not match the mesh");
  }
  const auto& tg = space.geometry().triangles;
  const auto& eg = space.geometry().edges;
  SpaceIndicators out;
  const auto elem = per_index(mesh.num_triangles(), exec, [&](std::size_t t) {
    return tg[t].diameter * tg[t].diameter * residual_sq[t];
  });
  const auto edge = per_index(mesh.num_edges(), exec,
                              [&](std::size_t e) { return eg[e].length * jump_sq[e]; });
  out.eta1 = reduce(elem, exec);
  out.eta2 = reduce(edge, exec);
  out.per_element = per_index(mesh.num_triangles(), exec, [&](std::size_t t) {
    const auto& te = mesh.triangle_edges(t);
    return elem[t] + edge[te[0]] + edge[te[1]] + edge[te[2]];
  });
  return out;
}

double eta_lin(const FeSpace& space, const FeFunction& xn, const FeFunction& xstar, double eps,
               Exec exec) {
  require_on(space.mesh(), {&xn, &xstar});
  const auto& tri = space.geometry().triangles;
  const auto parts = per_index(space.mesh().num_triangles(), exec, [&](std::size_t t) {
    const auto g = space.gradient(xn, t);
    const auto gs = space.gradient(xstar, t);
    const double d = 1.0 / reg_norm(gs[0], gs[1], eps) - 1.0 / reg_norm(g[0], g[1], eps);
    return tri[t].area * (g[0] * g[0] + g[1] * g[1]) * d * d;
  });
  return reduce(parts, exec);
}

NoiseHistory::NoiseHistory(const NoiseModel& model, const Mesh& macro)
    : model_(&model), macro_(&macro), geometry_(stvf::geometry(macro)),
      constant_(model.time_constant()) {
  if (constant_) {
    const_interp_ = interpolation_sq(0.0);
    const_norm_ = norm_sq(0.0);
    cached_ = true;
  }
}

std::array<double, 2> NoiseHistory::drift_sq(double t, double s) const {
  std::array<double, 2> out{0.0, 0.0};
  if (constant_) return out;
  const double a2 = model_->amplitude * model_->amplitude;
  for (const auto& mode : model_->modes) {
    if (mode.time_constant) continue;
    for (std::size_t k = 0; k < macro_->num_triangles(); ++k) {
      const auto& v = macro_->triangle(k);
      const Point p0 = macro_->vertex(v[0]), p1 = macro_->vertex(v[1]), p2 = macro_->vertex(v[2]);
      const double area = geometry_.triangles[k].area;
      for (const auto& q : kDegree4) {
        const Point x{q.l0 * p0.x + q.l1 * p1.x + q.l2 * p2.x,
                      q.l0 * p0.y + q.l1 * p1.y + q.l2 * p2.y};
        const double dv = mode.value(t, x) - mode.value(s, x);
        const auto gt = mode.gradient(t, x);
        const auto gs = mode.gradient(s, x);
        const double dx = gt[0] - gs[0], dy = gt[1] - gs[1];
        out[0] += q.w * area * a2 * dv * dv;
        out[1] += q.w * area * a2 * (dx * dx + dy * dy);
      }
    }
  }
  return out;
}

std::array<double, 2> NoiseHistory::interpolation_sq(double t) const {
  std::array<double, 2> out{0.0, 0.0};
  if (cached_) return const_interp_;
  const double amp = model_->amplitude;
  std::vector<double> nodal(macro_->num_vertices());
  for (const auto& mode : model_->modes) {
    for (std::size_t i = 0; i < nodal.size(); ++i) {
      const auto vi = static_cast<VertexId>(i);
      nodal[i] = macro_->on_boundary(vi) ? 0.0 : amp * mode.value(t, macro_->vertex(vi));
    }
    for (std::size_t k = 0; k < macro_->num_triangles(); ++k) {
      const auto& v = macro_->triangle(k);
      const auto& tg = geometry_.triangles[k];
      const Point p0 = macro_->vertex(v[0]), p1 = macro_->vertex(v[1]), p2 = macro_->vertex(v[2]);
      const double hx = nodal[v[0]] * tg.grad[0][0] + nodal[v[1]] * tg.grad[1][0] +
                        nodal[v[2]] * tg.grad[2][0];
      const double hy = nodal[v[0]] * tg.grad[0][1] + nodal[v[1]] * tg.grad[1][1] +
                        nodal[v[2]] * tg.grad[2][1];
      for (const auto& q : kDegree4) {
        const Point x{q.l0 * p0.x + q.l1 * p1.x + q.l2 * p2.x,
                      q.l0 * p0.y + q.l1 * p1.y + q.l2 * p2.y};
        const double dv =
            amp * mode.value(t, x) - (q.l0 * nodal[v[0]] + q.l1 * nodal[v[1]] + q.l2 * nodal[v[2]]);
        const auto g = mode.gradient(t, x);
        const double dx = amp * g[0] - hx, dy = amp * g[1] - hy;
        out[0] += q.w * tg.area * dv * dv;
        out[1] += q.w * tg.area * (dx * dx + dy * dy);
      }
    }
  }
  return out;
}

std::array<double, 2> NoiseHistory::norm_sq(double t) const {
  std::array<double, 2> out{0.0, 0.0};
  if (cached_) return const_norm_;
  const double a2 = model_->amplitude * model_->amplitude;
  for (const auto& mode : model_->modes) {
    for (std::size_t k = 0; k < macro_->num_triangles(); ++k) {
      const auto& v = macro_->triangle(k);
      const Point p0 = macro_->vertex(v[0]), p1 = macro_->vertex(v[1]), p2 = macro_->vertex(v[2]);
      const double area = geometry_.triangles[k].area;
      for (const auto& q : kDegree4) {
        const Point x{q.l0 * p0.x + q.l1 * p1.x + q.l2 * p2.x,
                      q.l0 * p0.y + q.l1 * p1.y + q.l2 * p2.y};
        const double s = mode.value(t, x);
        const auto g = mode.gradient(t, x);
        out[0] += q.w * area * a2 * s * s;
        out[1] += q.w * area * a2 * (g[0] * g[0] + g[1] * g[1]);
      }
    }
  }
  return out;
}

NoiseIndicators NoiseHistory::advance(double t_prev, double t_next) {
  const double tau = t_next - t_prev;
  if (!(tau > 0.0)) throw std::invalid_argument("NoiseHistory::advance: empty step");
  constexpr int m = kTimeSamples;
  const double h = tau / m;

  // Trapezoid for the drift over this step; nested trapezoid for
  // int_{t_prev}^{t_next} int_t^{t_next} ||sigma(s)||^2 ds dt.
  std::array<double, 2> drift{0.0, 0.0};
  std::array<double, 2> dbl{0.0, 0.0};
  if (constant_) {
    dbl = {0.5 * tau * tau * const_norm_[0], 0.5 * tau * tau * const_norm_[1]};
  } else {
    std::array<std::array<double, 2>, m + 1> f{};
    for (int j = 0; j <= m; ++j) {
      const double tj = t_prev + j * h;
      const auto d = drift_sq(tj, t_prev);
      const double wj = (j == 0 || j == m) ? 0.5 * h : h;
      drift[0] += wj * d[0];
      drift[1] += wj * d[1];
      f[j] = norm_sq(tj);
    }
    // inner[j] = int_{t_j}^{t_next} f, accumulated from the right.
    std::array<std::array<double, 2>, m + 1> inner{};
    for (int j = m - 1; j >= 0; --j) {
      for (int c = 0; c < 2; ++c) inner[j][c] = inner[j + 1][c] + 0.5 * h * (f[j][c] + f[j + 1][c]);
    }
    for (int j = 0; j <= m; ++j) {
      const double wj = (j == 0 || j == m) ? 0.5 * h : h;
      dbl[0] += wj * inner[j][0];
      dbl[1] += wj * inner[j][1];
    }
  }
  const auto e = interpolation_sq(t_prev);

  NoiseIndicators out;
  out.eta1 = tau * (drift_l2_ + interp_l2_) + dbl[0] + tau * tau * e[0];
  out.eta2 = tau * (drift_h1_ + interp_h1_) + dbl[1] + tau * tau * e[1];
  out.eta3 = drift[0] + tau * e[0];

  drift_l2_ += drift[0];
  drift_h1_ += drift[1];
  interp_l2_ += tau * e[0];
  interp_h1_ += tau * e[1];
  return out;
}

}  // namespace stvf
