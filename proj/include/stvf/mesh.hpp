// Conforming triangulations of the unit square refined and coarsened by
// newest-vertex bisection (NVB) over a fixed macro mesh.
//
// Every element stores its vertices as (peak, a, b): the peak is the newest
// vertex and (a, b) is the refinement edge. Bisecting inserts m = mid(a, b)
// and produces the children (m, peak, a) and (m, b, peak), so the children's
// refinement edges are the parent's two remaining edges.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace stvf {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

using VertexId = std::int32_t;

// Stable identity of a forest node: macro root id in the high bits, the
// bisection path below a leading 1 bit in the low bits.
using ElementKey = std::uint64_t;

inline constexpr int kMaxLevel = 40;

struct Element {
  std::array<VertexId, 3> v{};  // v[0] = peak, (v[1], v[2]) = refinement edge
  std::int32_t parent = -1;
  std::array<std::int32_t, 2> child{-1, -1};
  std::int32_t level = 0;
  std::int32_t leaf = -1;  // leaf index, or -1 for interior forest nodes
  ElementKey key = 0;

  bool is_leaf() const { return child[0] < 0; }
};

struct Edge {
  std::array<VertexId, 2> v{};       // ascending vertex ids
  std::array<std::int32_t, 2> tri{-1, -1};  // K1 < K2; tri[1] = -1 on the boundary
  bool boundary() const { return tri[1] < 0; }
};

// A located point: leaf triangle and barycentric coordinates in it.
struct Location {
  std::int32_t triangle = -1;
  std::array<double, 3> bary{};
};

class Mesh {
 public:
  // Unit square split into n x n squares, each cut into four triangles by
  // its center point. Throws std::invalid_argument for n < 1.
  static Mesh macro(int n);
  // Arbitrary conforming coarse mesh of the unit square. Each triangle is
  // given as (peak, a, b), counter-clockwise, with (a, b) its refinement
  // edge. Throws std::invalid_argument on bad indices or orientation.
  static Mesh from_triangles(std::vector<Point> points,
                             const std::vector<std::array<VertexId, 3>>& triangles);

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return leaves_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_macro_triangles() const { return macro_count_; }
  int macro_n() const { return macro_n_; }
  std::uint64_t generation() const { return generation_; }

  std::span<const Point> vertices() const { return vertices_; }
  const Point& vertex(VertexId i) const { return vertices_[i]; }
  bool on_boundary(VertexId i) const { return boundary_[i] != 0; }
  std::span<const std::uint8_t> boundary_mask() const { return boundary_; }

  // Leaf triangle t in (peak, a, b) order.
  const std::array<VertexId, 3>& triangle(std::size_t t) const {
    return forest_[leaves_[t]].v;
  }
  const Element& leaf_element(std::size_t t) const { return forest_[leaves_[t]]; }
  std::span<const Element> forest() const { return forest_; }
  std::span<const Edge> edges() const { return edges_; }
  // Edge ids of leaf t; entry i is the edge opposite vertex i.
  const std::array<std::int32_t, 3>& triangle_edges(std::size_t t) const {
    return tri_edges_[t];
  }
  // Leaves incident to each vertex, ascending.
  std::span<const std::int32_t> vertex_triangles(VertexId v) const {
    return {vt_index_.data() + vt_offset_[v], vt_index_.data() + vt_offset_[v + 1]};
  }

  std::optional<std::int32_t> find_leaf(ElementKey key) const;
  std::optional<VertexId> find_vertex(Point p) const;

  // Leaf containing p (unit square, closed), found by descending the forest.
  Location locate(Point p) const;

  int max_level() const;

 private:
  friend class MeshBuilder;
  Mesh() = default;
  void finalize();
  Location locate_from_roots(Point p) const;
  Location descend(std::int32_t root, std::array<double, 3> bary, Point p) const;

  int macro_n_ = 0;
  std::size_t macro_count_ = 0;
  std::uint64_t generation_ = 0;
  std::vector<Point> vertices_;
  std::vector<std::uint8_t> boundary_;
  std::vector<Element> forest_;
  std::vector<std::int32_t> leaves_;
  std::vector<Edge> edges_;
  std::vector<std::array<std::int32_t, 3>> tri_edges_;
  std::vector<std::int32_t> vt_offset_;
  std::vector<std::int32_t> vt_index_;
  std::unordered_map<ElementKey, std::int32_t> leaf_by_key_;
  std::unordered_map<std::uint64_t, VertexId> vertex_by_coord_;
};

inline Mesh macro_mesh(int n) { return Mesh::macro(n); }

// Bisects every marked leaf once, plus the conforming closure.
Mesh refine(const Mesh& mesh, std::span<const std::int32_t> marked);

// Undoes the last bisection around a vertex when every leaf sharing it is
// marked and has it as newest vertex. Other marks are ignored.
Mesh coarsen(const Mesh& mesh, std::span<const std::int32_t> marked);

struct TriangleGeometry {
  double area = 0.0;
  double diameter = 0.0;
  // Gradients of the three barycentric basis functions.
  std::array<std::array<double, 2>, 3> grad{};
};

struct EdgeGeometry {
  double length = 0.0;
  std::array<double, 2> normal{};  // unit, pointing from K1 to K2
};

struct Geometry {
  std::vector<TriangleGeometry> triangles;
  std::vector<EdgeGeometry> edges;
};

// Throws std::logic_error on a non-positive triangle area.
Geometry geometry(const Mesh& mesh);

TriangleGeometry triangle_geometry(const Point& p0, const Point& p1, const Point& p2);

double min_angle(const Mesh& mesh);

}  // namespace stvf
