#include "stvf/mesh.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace stvf {

namespace {

std::atomic<std::uint64_t> g_generation{0};

std::uint64_t next_generation() { return g_generation.fetch_add(1) + 1; }

constexpr int kKeyBits = kMaxLevel + 1;
constexpr ElementKey kLowMask = (ElementKey{1} << kKeyBits) - 1;

ElementKey root_key(std::size_t macro_id) {
  return (static_cast<ElementKey>(macro_id) << kKeyBits) | 1U;
}

ElementKey child_key(ElementKey key, int c) {
  return (key & ~kLowMask) | ((((key & kLowMask) << 1) | static_cast<ElementKey>(c)) & kLowMask);
}

std::uint64_t edge_key(VertexId a, VertexId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

std::uint64_t coord_key(Point p) {
  const auto hx = std::bit_cast<std::uint64_t>(p.x);
  const auto hy = std::bit_cast<std::uint64_t>(p.y);
  return hx ^ (hy * 0x9E3779B97F4A7C15ULL + (hx << 6) + (hx >> 2));
}

double orient(const Point& a, const Point& b, const Point& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

std::array<double, 3> barycentric(const Point& p0, const Point& p1, const Point& p2,
                                  const Point& q) {
  const double det = orient(p0, p1, p2);
  const double l1 = orient(p0, q, p2) / det;
  const double l2 = orient(p0, p1, q) / det;
  return {1.0 - l1 - l2, l1, l2};
}

double min_of(const std::array<double, 3>& a) { return std::min({a[0], a[1], a[2]}); }

}  // namespace

// Mutable working copy of a mesh used by refine and coarsen.
class MeshBuilder {
 public:
  explicit MeshBuilder(const Mesh& m)
      : macro_n(m.macro_n_),
        macro_count(m.macro_count_),
        vertices(m.vertices_),
        forest(m.forest_) {}

  VertexId midpoint(VertexId a, VertexId b) {
    const auto key = edge_key(a, b);
    if (auto it = midpoints.find(key); it != midpoints.end()) return it->second;
    const Point& pa = vertices[a];
    const Point& pb = vertices[b];
    vertices.push_back({0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)});
    const auto id = static_cast<VertexId>(vertices.size() - 1);
    midpoints.emplace(key, id);
    return id;
  }

  // Bisects forest node fid; optionally bisects the children again across
  // the parent's edges (v0, v1) and (v2, v0).
  void bisect(std::int32_t fid, bool split_e2, bool split_e1) {
    const Element parent = forest[fid];
    if (parent.level + 1 > kMaxLevel) {
      throw std::runtime_error("refine: maximum bisection level exceeded");
    }
    const auto [p, a, b] = parent.v;
    const VertexId m = midpoint(a, b);
    Element c0;
    c0.v = {m, p, a};
    Element c1;
    c1.v = {m, b, p};
    for (int c = 0; c < 2; ++c) {
      Element& e = (c == 0) ? c0 : c1;
      e.parent = fid;
      e.level = parent.level + 1;
      e.key = child_key(parent.key, c);
    }
    const auto id0 = static_cast<std::int32_t>(forest.size());
    forest.push_back(c0);
    forest.push_back(c1);
    forest[fid].child = {id0, id0 + 1};
    if (split_e2) bisect(id0, false, false);
    if (split_e1) bisect(id0 + 1, false, false);
  }

  Mesh build() {
    Mesh out;
    out.macro_n_ = macro_n;
    out.macro_count_ = macro_count;
    out.vertices_ = std::move(vertices);
    out.forest_ = std::move(forest);
    out.finalize();
    return out;
  }

  int macro_n;
  std::size_t macro_count;
  std::vector<Point> vertices;
  std::vector<Element> forest;
  std::unordered_map<std::uint64_t, VertexId> midpoints;
};

Mesh Mesh::macro(int n) {
  if (n < 1) throw std::invalid_argument("macro_mesh: subdivision count must be >= 1");
  Mesh mesh;
  mesh.macro_n_ = n;
  const auto grid = [n](int i, int j) { return static_cast<VertexId>(j * (n + 1) + i); };
  const auto center = [n](int i, int j) {
    return static_cast<VertexId>((n + 1) * (n + 1) + j * n + i);
  };
  mesh.vertices_.reserve(static_cast<std::size_t>((n + 1) * (n + 1) + n * n));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      mesh.vertices_.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      mesh.vertices_.push_back({(i + 0.5) / n, (j + 0.5) / n});
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const VertexId c = center(i, j);
      const std::array<VertexId, 4> corners = {grid(i, j), grid(i + 1, j), grid(i + 1, j + 1),
                                               grid(i, j + 1)};
      for (int k = 0; k < 4; ++k) {
        Element e;
        // The square side is the longest edge and becomes the refinement edge.
        e.v = {c, corners[k], corners[(k + 1) % 4]};
        e.key = root_key(mesh.forest_.size());
        mesh.forest_.push_back(e);
      }
    }
  }
  mesh.macro_count_ = mesh.forest_.size();
  mesh.finalize();
  return mesh;
}

Mesh Mesh::from_triangles(std::vector<Point> points,
                          const std::vector<std::array<VertexId, 3>>& triangles) {
  if (triangles.empty()) throw std::invalid_argument("from_triangles: no triangles");
  Mesh mesh;
  mesh.vertices_ = std::move(points);
  for (const auto& v : triangles) {
    for (VertexId i : v) {
      if (i < 0 || static_cast<std::size_t>(i) >= mesh.vertices_.size()) {
        throw std::invalid_argument("from_triangles: vertex index out of range");
      }
    }
    if (!(orient(mesh.vertices_[v[0]], mesh.vertices_[v[1]], mesh.vertices_[v[2]]) > 0.0)) {
      throw std::invalid_argument("from_triangles: triangles must be counter-clockwise");
    }
    Element e;
    e.v = v;
    e.key = root_key(mesh.forest_.size());
    mesh.forest_.push_back(e);
  }
  mesh.macro_count_ = mesh.forest_.size();
  mesh.finalize();
  return mesh;
}

void Mesh::finalize() {
  generation_ = next_generation();

  // Leaves in depth-first order over the macro roots.
  leaves_.clear();
  std::vector<std::int32_t> stack;
  for (std::size_t r = macro_count_; r-- > 0;) stack.push_back(static_cast<std::int32_t>(r));
  while (!stack.empty()) {
    const auto f = stack.back();
    stack.pop_back();
    Element& e = forest_[f];
    if (e.is_leaf()) {
      e.leaf = static_cast<std::int32_t>(leaves_.size());
      leaves_.push_back(f);
    } else {
      e.leaf = -1;
      stack.push_back(e.child[1]);
      stack.push_back(e.child[0]);
    }
  }

  boundary_.assign(vertices_.size(), 0);
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Point& p = vertices_[i];
    boundary_[i] = (p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0) ? 1 : 0;
  }

  edges_.clear();
  tri_edges_.assign(leaves_.size(), {-1, -1, -1});
  std::unordered_map<std::uint64_t, std::int32_t> edge_ids;
  edge_ids.reserve(leaves_.size() * 2);
  for (std::size_t t = 0; t < leaves_.size(); ++t) {
    const auto& v = forest_[leaves_[t]].v;
    for (int i = 0; i < 3; ++i) {
      const VertexId a = v[(i + 1) % 3];
      const VertexId b = v[(i + 2) % 3];
      const auto [it, inserted] =
          edge_ids.try_emplace(edge_key(a, b), static_cast<std::int32_t>(edges_.size()));
      if (inserted) {
        Edge e;
        e.v = {std::min(a, b), std::max(a, b)};
        e.tri[0] = static_cast<std::int32_t>(t);
        edges_.push_back(e);
      } else {
        Edge& e = edges_[it->second];
        if (e.tri[1] >= 0) throw std::logic_error("mesh: edge shared by more than two triangles");
        e.tri[1] = static_cast<std::int32_t>(t);
      }
      tri_edges_[t][i] = it->second;
    }
  }

  vt_offset_.assign(vertices_.size() + 1, 0);
  for (std::size_t t = 0; t < leaves_.size(); ++t) {
    for (VertexId v : forest_[leaves_[t]].v) ++vt_offset_[v + 1];
  }
  for (std::size_t i = 0; i < vertices_.size(); ++i) vt_offset_[i + 1] += vt_offset_[i];
  vt_index_.assign(vt_offset_.back(), 0);
  {
    std::vector<std::int32_t> fill(vt_offset_.begin(), vt_offset_.end() - 1);
    for (std::size_t t = 0; t < leaves_.size(); ++t) {
      for (VertexId v : forest_[leaves_[t]].v) vt_index_[fill[v]++] = static_cast<std::int32_t>(t);
    }
  }

  leaf_by_key_.clear();
  leaf_by_key_.reserve(leaves_.size());
  for (std::size_t t = 0; t < leaves_.size(); ++t) {
    leaf_by_key_.emplace(forest_[leaves_[t]].key, static_cast<std::int32_t>(t));
  }
  vertex_by_coord_.clear();
  vertex_by_coord_.reserve(vertices_.size());
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    vertex_by_coord_.emplace(coord_key(vertices_[i]), static_cast<VertexId>(i));
  }
}

std::optional<std::int32_t> Mesh::find_leaf(ElementKey key) const {
  if (auto it = leaf_by_key_.find(key); it != leaf_by_key_.end()) return it->second;
  return std::nullopt;
}

std::optional<VertexId> Mesh::find_vertex(Point p) const {
  if (auto it = vertex_by_coord_.find(coord_key(p)); it != vertex_by_coord_.end()) {
    const Point& q = vertices_[it->second];
    if (q.x == p.x && q.y == p.y) return it->second;
  }
  return std::nullopt;
}

Location Mesh::locate(Point p) const {
  if (macro_n_ == 0) return locate_from_roots(p);
  const int n = macro_n_;
  const int i = std::clamp(static_cast<int>(std::floor(p.x * n)), 0, n - 1);
  const int j = std::clamp(static_cast<int>(std::floor(p.y * n)), 0, n - 1);
  std::int32_t best = -1;
  std::array<double, 3> best_bary{};
  double best_score = -std::numeric_limits<double>::infinity();
  // Search the square's four macro triangles, then its neighbours' in case
  // rounding put the point just outside.
  for (int dj = 0; dj <= 1 && best_score < -1e-12; ++dj) {
    for (int jj = j - dj; jj <= j + dj; ++jj) {
      for (int ii = i - dj; ii <= i + dj; ++ii) {
        if (ii < 0 || jj < 0 || ii >= n || jj >= n) continue;
        for (int k = 0; k < 4; ++k) {
          const auto f = static_cast<std::int32_t>(4 * (jj * n + ii) + k);
          const auto& v = forest_[f].v;
          const auto b = barycentric(vertices_[v[0]], vertices_[v[1]], vertices_[v[2]], p);
          if (min_of(b) > best_score) {
            best_score = min_of(b);
            best = f;
            best_bary = b;
          }
        }
      }
    }
  }
  if (best < 0 || best_score < -1e-9) throw std::logic_error("locate: point outside the domain");
  return descend(best, best_bary, p);
}

Location Mesh::locate_from_roots(Point p) const {
  std::int32_t best = -1;
  std::array<double, 3> best_bary{};
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < macro_count_; ++r) {
    const auto& v = forest_[r].v;
    const auto b = barycentric(vertices_[v[0]], vertices_[v[1]], vertices_[v[2]], p);
    if (min_of(b) > best_score) {
      best_score = min_of(b);
      best = static_cast<std::int32_t>(r);
      best_bary = b;
    }
  }
  if (best < 0 || best_score < -1e-9) throw std::logic_error("locate: point outside the domain");
  return descend(best, best_bary, p);
}

Location Mesh::descend(std::int32_t root, std::array<double, 3> best_bary, Point p) const {
  std::int32_t f = root;
  while (!forest_[f].is_leaf()) {
    std::int32_t next = -1;
    double score = -std::numeric_limits<double>::infinity();
    for (auto c : forest_[f].child) {
      const auto& v = forest_[c].v;
      const auto b = barycentric(vertices_[v[0]], vertices_[v[1]], vertices_[v[2]], p);
      if (min_of(b) > score) {
        score = min_of(b);
        next = c;
        best_bary = b;
      }
    }
    f = next;
  }
  return {forest_[f].leaf, best_bary};
}

int Mesh::max_level() const {
  int level = 0;
  for (auto f : leaves_) level = std::max(level, forest_[f].level);
  return level;
}

Mesh refine(const Mesh& mesh, std::span<const std::int32_t> marked) {
  const std::size_t ne = mesh.num_edges();
  std::vector<std::uint8_t> edge_marked(ne, 0);
  std::vector<std::int32_t> work;
  const auto mark_edge = [&](std::int32_t e) {
    if (edge_marked[e]) return;
    edge_marked[e] = 1;
    for (auto t : mesh.edges()[e].tri) {
      if (t >= 0) work.push_back(t);
    }
  };
  for (auto t : marked) {
    if (t < 0 || static_cast<std::size_t>(t) >= mesh.num_triangles()) {
      throw std::out_of_range("refine: triangle id " + std::to_string(t) + " is not a leaf");
    }
    mark_edge(mesh.triangle_edges(t)[0]);
  }
  // Closure: a leaf with any marked edge must also bisect its refinement edge.
  while (!work.empty()) {
    const auto t = work.back();
    work.pop_back();
    const auto& te = mesh.triangle_edges(t);
    if (!edge_marked[te[0]] && (edge_marked[te[1]] || edge_marked[te[2]])) mark_edge(te[0]);
  }

  MeshBuilder builder(mesh);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& te = mesh.triangle_edges(t);
    if (!edge_marked[te[0]]) continue;
    const auto fid = static_cast<std::int32_t>(&mesh.leaf_element(t) - mesh.forest().data());
    builder.bisect(fid, edge_marked[te[2]] != 0, edge_marked[te[1]] != 0);
  }
  return builder.build();
}

Mesh coarsen(const Mesh& mesh, std::span<const std::int32_t> marked) {
  const std::size_t nt = mesh.num_triangles();
  std::vector<std::uint8_t> leaf_marked(nt, 0);
  for (auto t : marked) {
    if (t < 0 || static_cast<std::size_t>(t) >= nt) {
      throw std::out_of_range("coarsen: triangle id " + std::to_string(t) + " is not a leaf");
    }
    leaf_marked[t] = 1;
  }
  const auto forest = mesh.forest();

  std::vector<std::uint8_t> merge(forest.size(), 0);
  std::vector<std::uint8_t> vertex_seen(mesh.num_vertices(), 0);
  bool any = false;
  for (std::size_t t = 0; t < nt; ++t) {
    const Element& e = mesh.leaf_element(t);
    if (!leaf_marked[t] || e.level == 0) continue;
    const VertexId m = e.v[0];
    if (vertex_seen[m]) continue;
    vertex_seen[m] = 1;
    const auto around = mesh.vertex_triangles(m);
    const std::size_t expected = mesh.on_boundary(m) ? 2 : 4;
    if (around.size() != expected) continue;
    bool ok = true;
    for (auto k : around) {
      const Element& ek = mesh.leaf_element(k);
      if (!leaf_marked[k] || ek.level == 0 || ek.v[0] != m) {
        ok = false;
        break;
      }
      const Element& parent = forest[ek.parent];
      for (auto c : parent.child) {
        if (!forest[c].is_leaf() || forest[c].v[0] != m) ok = false;
      }
    }
    if (!ok) continue;
    for (auto k : around) merge[mesh.leaf_element(k).parent] = 1;
    any = true;
  }

  MeshBuilder builder(mesh);
  if (any) {
    // Rebuild the forest without the merged children: roots first, then
    // descendants in depth-first order.
    std::vector<Element> kept;
    kept.reserve(forest.size());
    std::vector<std::int32_t> remap(forest.size(), -1);
    for (std::size_t r = 0; r < mesh.num_macro_triangles(); ++r) {
      remap[r] = static_cast<std::int32_t>(kept.size());
      kept.push_back(forest[r]);
    }
    std::vector<std::int32_t> stack;
    for (std::size_t r = mesh.num_macro_triangles(); r-- > 0;) {
      stack.push_back(static_cast<std::int32_t>(r));
    }
    while (!stack.empty()) {
      const auto f = stack.back();
      stack.pop_back();
      Element& copy = kept[remap[f]];
      if (forest[f].is_leaf() || merge[f]) {
        copy.child = {-1, -1};
        continue;
      }
      for (int c = 0; c < 2; ++c) {
        const auto child = forest[f].child[c];
        remap[child] = static_cast<std::int32_t>(kept.size());
        Element ce = forest[child];
        ce.parent = remap[f];
        kept.push_back(ce);
        kept[remap[f]].child[c] = remap[child];
      }
      stack.push_back(forest[f].child[1]);
      stack.push_back(forest[f].child[0]);
    }

    // Drop vertices no longer referenced by any element.
    std::vector<VertexId> vmap(builder.vertices.size(), -1);
    for (const Element& e : kept) {
      for (VertexId v : e.v) vmap[v] = 0;
    }
    std::vector<Point> verts;
    verts.reserve(builder.vertices.size());
    for (std::size_t i = 0; i < vmap.size(); ++i) {
      if (vmap[i] == 0) {
        vmap[i] = static_cast<VertexId>(verts.size());
        verts.push_back(builder.vertices[i]);
      }
    }
    for (Element& e : kept) {
      for (VertexId& v : e.v) v = vmap[v];
    }
    builder.vertices = std::move(verts);
    builder.forest = std::move(kept);
  }
  return builder.build();
}

TriangleGeometry triangle_geometry(const Point& p0, const Point& p1, const Point& p2) {
  TriangleGeometry g;
  const double det = orient(p0, p1, p2);
  g.area = 0.5 * det;
  const auto len = [](const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); };
  g.diameter = std::max({len(p0, p1), len(p1, p2), len(p2, p0)});
  g.grad[0] = {(p1.y - p2.y) / det, (p2.x - p1.x) / det};
  g.grad[1] = {(p2.y - p0.y) / det, (p0.x - p2.x) / det};
  g.grad[2] = {(p0.y - p1.y) / det, (p1.x - p0.x) / det};
  return g;
}

Geometry geometry(const Mesh& mesh) {
  Geometry geo;
  const auto nt = static_cast<std::int64_t>(mesh.num_triangles());
  const auto ne = static_cast<std::int64_t>(mesh.num_edges());
  geo.triangles.resize(nt);
  geo.edges.resize(ne);
  bool degenerate = false;
#pragma omp parallel for schedule(static) reduction(|| : degenerate)
  for (std::int64_t t = 0; t < nt; ++t) {
    const auto& v = mesh.triangle(t);
    geo.triangles[t] = triangle_geometry(mesh.vertex(v[0]), mesh.vertex(v[1]), mesh.vertex(v[2]));
    if (!(geo.triangles[t].area > 0.0)) degenerate = true;
  }
  if (degenerate) throw std::logic_error("geometry: non-positive triangle area");
#pragma omp parallel for schedule(static)
  for (std::int64_t e = 0; e < ne; ++e) {
    const Edge& edge = mesh.edges()[e];
    const Point& a = mesh.vertex(edge.v[0]);
    const Point& b = mesh.vertex(edge.v[1]);
    EdgeGeometry& g = geo.edges[e];
    g.length = std::hypot(b.x - a.x, b.y - a.y);
    double nx = (b.y - a.y) / g.length;
    double ny = -(b.x - a.x) / g.length;
    // Orient away from K1: the vertex of K1 off the edge lies on the negative side.
    const auto& tv = mesh.triangle(edge.tri[0]);
    for (VertexId w : tv) {
      if (w == edge.v[0] || w == edge.v[1]) continue;
      const Point& c = mesh.vertex(w);
      if ((c.x - a.x) * nx + (c.y - a.y) * ny > 0.0) {
        nx = -nx;
        ny = -ny;
      }
    }
    g.normal = {nx, ny};
  }
  return geo;
}

double min_angle(const Mesh& mesh) {
  double result = std::numbers::pi;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& v = mesh.triangle(t);
    for (int i = 0; i < 3; ++i) {
      const Point& p = mesh.vertex(v[i]);
      const Point& q = mesh.vertex(v[(i + 1) % 3]);
      const Point& r = mesh.vertex(v[(i + 2) % 3]);
      const double ux = q.x - p.x, uy = q.y - p.y, wx = r.x - p.x, wy = r.y - p.y;
      const double angle = std::atan2(std::abs(ux * wy - uy * wx), ux * wx + uy * wy);
      result = std::min(result, angle);
    }
  }
  return result;
}

}  // namespace stvf
