// Independent reference computations for the test suites. Nothing here
// reuses the library's geometry, quadrature or assembly.
#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "stvf/mesh.hpp"

namespace stvf::oracle {

// Two triangles on the unit square and their second uniform refinement.
Mesh two_triangle_mesh();
Mesh eight_triangle_mesh();

struct Tri {
  std::array<Point, 3> p;
  std::array<double, 3> v;
};

Tri tri_of(const Mesh& mesh, std::size_t t, const std::vector<double>& f);

// Seven-point degree-5 rule: integral of (P1 interpolant)^2 over a triangle.
double l2_sq_quad7(const Tri& t);
double area(const Tri& t);
double diameter(const Tri& t);
// Gradient from the two edge difference quotients.
std::array<double, 2> gradient(const Tri& t);

double l2_norm_sq(const Mesh& mesh, const std::vector<double>& f);
double h1_seminorm_sq(const Mesh& mesh, const std::vector<double>& f);

double eta_space1(const Mesh& mesh, const std::vector<double>& r);
// Edges found by brute-force pair search; normal from the lower to the
// higher leaf index.
double eta_space2(const Mesh& mesh, const std::vector<double>& x, double eps);
double eta_lin(const Mesh& mesh, const std::vector<double>& x, const std::vector<double>& xs,
               double eps);

// Dense operators from quadrature of basis products.
Eigen::MatrixXd dense_mass(const Mesh& mesh);
Eigen::MatrixXd dense_tv_stiffness(const Mesh& mesh, const std::vector<double>& w, double eps);

// Damped Newton on the full nonlinear step with finite-difference Jacobian.
std::vector<double> newton_step(const Mesh& mesh, const std::vector<double>& x_prev,
                                const std::vector<double>& g, const std::vector<double>& noise,
                                double tau, double eps, double lambda, double tol);

}  // namespace stvf::oracle
