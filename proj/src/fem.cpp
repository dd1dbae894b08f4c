#include "stvf/fem.hpp"

#include <algorithm>
#include <stdexcept>

namespace stvf {

namespace {

template <typename LocalFn>
SparseOperator assemble_with(const FeSpace& space, Exec exec, LocalFn local) {
  const auto nt = static_cast<std::int64_t>(space.mesh().num_triangles());
  std::vector<LocalMatrix> locals(nt);
  SparseOperator op{space.pattern(), std::vector<double>(space.pattern()->nnz())};
  if (exec == Exec::serial) {
    for (std::int64_t t = 0; t < nt; ++t) locals[t] = local(t);
    kernels::serial::assemble(*op.pattern, locals, op.values);
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t t = 0; t < nt; ++t) locals[t] = local(t);
    kernels::parallel::assemble(*op.pattern, locals, op.values);
  }
  return op;
}

LocalMatrix stiffness_local(const TriangleGeometry& g, double scale) {
  LocalMatrix m{};
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      m[3 * a + b] = scale * g.area * (g.grad[a][0] * g.grad[b][0] + g.grad[a][1] * g.grad[b][1]);
    }
  }
  return m;
}

// Per-triangle sum evaluated with the deterministic blocked reduction.
template <typename Term>
double triangle_sum(std::size_t nt, Term term) {
  std::vector<double> parts(nt);
  const auto n = static_cast<std::int64_t>(nt);
#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < n; ++t) parts[t] = term(static_cast<std::size_t>(t));
  return kernels::parallel::sum(parts);
}

}  // namespace

void require_on(const Mesh& mesh, std::initializer_list<const FeFunction*> fs) {
  for (const FeFunction* f : fs) {
    if (f->generation != mesh.generation() || f->size() != mesh.num_vertices()) {
      throw std::invalid_argument("FeFunction does not live on this mesh generation");
    }
  }
}

FeSpace::FeSpace(std::shared_ptr<const Mesh> mesh)
    : mesh_(std::move(mesh)),
      geometry_(stvf::geometry(*mesh_)),
      pattern_(std::make_shared<SparsityPattern>(*mesh_)) {
  mass_ = assemble_mass(*this);
  laplace_ = assemble_laplace(*this);
}

FeFunction FeSpace::zero() const { return {std::vector<double>(dim(), 0.0), generation()}; }

FeFunction FeSpace::interpolate(const std::function<double(Point)>& f) const {
  FeFunction out = zero();
  for (std::size_t i = 0; i < dim(); ++i) out[i] = f(mesh_->vertex(static_cast<VertexId>(i)));
  return out;
}

FeFunction FeSpace::interpolate_dirichlet(const std::function<double(Point)>& f) const {
  FeFunction out = interpolate(f);
  for (std::size_t i = 0; i < dim(); ++i) {
    if (mesh_->on_boundary(static_cast<VertexId>(i))) out[i] = 0.0;
  }
  return out;
}

std::array<double, 2> FeSpace::gradient(const FeFunction& f, std::size_t t) const {
  const auto& v = mesh_->triangle(t);
  const auto& g = geometry_.triangles[t];
  std::array<double, 2> out{0.0, 0.0};
  for (int a = 0; a < 3; ++a) {
    out[0] += f[v[a]] * g.grad[a][0];
    out[1] += f[v[a]] * g.grad[a][1];
  }
  return out;
}

SparseOperator assemble_mass(const FeSpace& space, Exec exec) {
  const auto& tri = space.geometry().triangles;
  return assemble_with(space, exec, [&](std::int64_t t) {
    const double d = tri[t].area / 6.0;
    const double o = tri[t].area / 12.0;
    return LocalMatrix{d, o, o, o, d, o, o, o, d};
  });
}

SparseOperator assemble_laplace(const FeSpace& space, Exec exec) {
  const auto& tri = space.geometry().triangles;
  return assemble_with(space, exec, [&](std::int64_t t) { return stiffness_local(tri[t], 1.0); });
}

SparseOperator assemble_tv_stiffness(const FeSpace& space, const FeFunction& w, double eps,
                                     Exec exec) {
  if (!(eps > 0.0)) throw std::invalid_argument("assemble_tv_stiffness: eps must be positive");
  require_on(space.mesh(), {&w});
  const auto& tri = space.geometry().triangles;
  return assemble_with(space, exec, [&](std::int64_t t) {
    const auto g = space.gradient(w, static_cast<std::size_t>(t));
    return stiffness_local(tri[t], 1.0 / reg_norm(g[0], g[1], eps));
  });
}

double energy(const FeSpace& space, const FeFunction& u, const FeFunction& g, double eps,
              double lambda) {
  require_on(space.mesh(), {&u, &g});
  const auto& tri = space.geometry().triangles;
  const double tv = triangle_sum(tri.size(), [&](std::size_t t) {
    const auto gr = space.gradient(u, t);
    return tri[t].area * reg_norm(gr[0], gr[1], eps);
  });
  const FeFunction d = u - g;
  const auto Md = space.mass().apply(d.values);
  return tv + 0.5 * lambda * kernels::parallel::dot(d.values, Md);
}

std::vector<double> energy_gradient(const FeSpace& space, const FeFunction& u,
                                    const FeFunction& g, double eps, double lambda) {
  const auto A = assemble_tv_stiffness(space, u, eps);
  auto out = A.apply(u.values);
  const FeFunction d = u - g;
  const auto Md = space.mass().apply(d.values);
  kernels::parallel::axpy(lambda, Md, out);
  return out;
}

FeFunction transfer(const FeFunction& f, const Mesh& from, const Mesh& to) {
  require_on(from, {&f});
  FeFunction out{std::vector<double>(to.num_vertices()), to.generation()};
  if (from.generation() == to.generation()) {
    out.values = f.values;
    return out;
  }
  const auto n = static_cast<std::int64_t>(to.num_vertices());
#pragma omp parallel for schedule(dynamic, 256)
  for (std::int64_t i = 0; i < n; ++i) {
    const Point p = to.vertex(static_cast<VertexId>(i));
    if (auto v = from.find_vertex(p)) {
      out[i] = f[*v];
      continue;
    }
    const Location loc = from.locate(p);
    const auto& v = from.triangle(loc.triangle);
    out[i] = loc.bary[0] * f[v[0]] + loc.bary[1] * f[v[1]] + loc.bary[2] * f[v[2]];
  }
  return out;
}

double l2_norm(const FeSpace& space, const FeFunction& f) {
  require_on(space.mesh(), {&f});
  const auto& tri = space.geometry().triangles;
  const double s = triangle_sum(tri.size(), [&](std::size_t t) {
    const auto& v = space.mesh().triangle(t);
    const double a = f[v[0]], b = f[v[1]], c = f[v[2]];
    const double sum = a + b + c;
    return tri[t].area / 12.0 * (a * a + b * b + c * c + sum * sum);
  });
  return std::sqrt(std::max(s, 0.0));
}

double h1_seminorm(const FeSpace& space, const FeFunction& f) {
  require_on(space.mesh(), {&f});
  const auto& tri = space.geometry().triangles;
  const double s = triangle_sum(tri.size(), [&](std::size_t t) {
    const auto g = space.gradient(f, t);
    return tri[t].area * (g[0] * g[0] + g[1] * g[1]);
  });
  return std::sqrt(std::max(s, 0.0));
}

double linf_diff(const FeFunction& f, const FeFunction& g) {
  if (f.generation != g.generation || f.size() != g.size()) {
    throw std::invalid_argument("linf_diff: functions live on different meshes");
  }
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i] - g[i]));
  return m;
}

namespace {
FeFunction combine(const FeFunction& a, const FeFunction& b, double sb) {
  if (a.generation != b.generation || a.size() != b.size()) {
    throw std::invalid_argument("FeFunction arithmetic across different meshes");
  }
  FeFunction out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += sb * b[i];
  return out;
}
}  // namespace

FeFunction operator-(const FeFunction& a, const FeFunction& b) { return combine(a, b, -1.0); }
FeFunction operator+(const FeFunction& a, const FeFunction& b) { return combine(a, b, 1.0); }
FeFunction operator*(double s, const FeFunction& a) {
  FeFunction out = a;
  for (double& v : out.values) v *= s;
  return out;
}

}  // namespace stvf
