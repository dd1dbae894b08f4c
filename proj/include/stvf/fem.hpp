// P1 Lagrange spaces: assembly, norms, the regularized TV energy and
// transfer between meshes of one refinement forest.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "stvf/mesh.hpp"
#include "stvf/sparse.hpp"

namespace stvf {

enum class Exec { serial, parallel };

// Nodal coefficients of a P1 function, tagged with the mesh generation.
struct FeFunction {
  std::vector<double> values;
  std::uint64_t generation = 0;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
};

// Throws std::invalid_argument unless every function lives on `mesh`.
void require_on(const Mesh& mesh, std::initializer_list<const FeFunction*> fs);

inline double reg_norm(double gx, double gy, double eps) {
  return std::sqrt(gx * gx + gy * gy + eps * eps);
}

// A mesh with its geometry, sparsity pattern and the two
// coefficient-independent operators.
class FeSpace {
 public:
  explicit FeSpace(std::shared_ptr<const Mesh> mesh);

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  const Geometry& geometry() const { return geometry_; }
  const std::shared_ptr<const SparsityPattern>& pattern() const { return pattern_; }
  const SparseOperator& mass() const { return mass_; }
  const SparseOperator& laplace() const { return laplace_; }
  std::size_t dim() const { return mesh_->num_vertices(); }
  std::uint64_t generation() const { return mesh_->generation(); }

  FeFunction zero() const;
  FeFunction interpolate(const std::function<double(Point)>& f) const;
  // Nodal interpolant with boundary values forced to zero.
  FeFunction interpolate_dirichlet(const std::function<double(Point)>& f) const;

  // Constant gradient of f on leaf t.
  std::array<double, 2> gradient(const FeFunction& f, std::size_t t) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  Geometry geometry_;
  std::shared_ptr<const SparsityPattern> pattern_;
  SparseOperator mass_;
  SparseOperator laplace_;
};

// M_ij = integral of phi_i phi_j, exact.
SparseOperator assemble_mass(const FeSpace& space, Exec exec = Exec::parallel);
// K_ij = integral of grad phi_i . grad phi_j.
SparseOperator assemble_laplace(const FeSpace& space, Exec exec = Exec::parallel);
// A(w)_ij = sum_T area_T grad phi_i . grad phi_j / |grad w|_T|_eps.
// Throws std::invalid_argument for eps <= 0.
SparseOperator assemble_tv_stiffness(const FeSpace& space, const FeFunction& w, double eps,
                                     Exec exec = Exec::parallel);

// sum_T area_T |grad u|_eps + lambda/2 (u-g)^T M (u-g)
double energy(const FeSpace& space, const FeFunction& u, const FeFunction& g, double eps,
              double lambda);

// A(u)u + lambda M (u - g), the gradient of energy() in the coefficients.
std::vector<double> energy_gradient(const FeSpace& space, const FeFunction& u,
                                    const FeFunction& g, double eps, double lambda);

// Nodal interpolation of f (a function on `from`) at the vertices of `to`.
FeFunction transfer(const FeFunction& f, const Mesh& from, const Mesh& to);

// Exact P1 norms, computed element by element.
double l2_norm(const FeSpace& space, const FeFunction& f);
double h1_seminorm(const FeSpace& space, const FeFunction& f);
double linf_diff(const FeFunction& f, const FeFunction& g);

FeFunction operator-(const FeFunction& a, const FeFunction& b);
FeFunction operator+(const FeFunction& a, const FeFunction& b);
FeFunction operator*(double s, const FeFunction& a);

}  // namespace stvf
