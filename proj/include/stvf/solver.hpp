// One implicit time step of the regularized flow, linearized by freezing
// the coefficient 1/|grad X*|_eps, and the conjugate-gradient inner solver.
#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stvf/fem.hpp"
#include "stvf/sparse.hpp"

namespace stvf {

// Linear solve failed to reach its tolerance within the iteration cap.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SchemeKind { si, fix3, fix };

struct SchemeVariant {
  SchemeKind kind = SchemeKind::fix;
  double tol = 1e-4;   // FIX only: stop once the L-infinity update drops below
  int max_iters = 30;  // FIX only

  static SchemeVariant si() { return {SchemeKind::si, 0.0, 1}; }
  static SchemeVariant fix3() { return {SchemeKind::fix3, 0.0, 3}; }
  // Throws std::invalid_argument unless tol > 0 and max_iters >= 1.
  static SchemeVariant fix(double tol, int max_iters = 30);

  std::string name() const;
  static SchemeVariant parse(const std::string& name, double tol, int max_iters);
};

struct CgReport {
  int iterations = 0;
  double relative_residual = 0.0;
  // CG step coefficients; they define the Lanczos tridiagonal whose
  // eigenvalues are the Ritz values of the preconditioned operator.
  std::vector<double> alpha;
  std::vector<double> beta;
};

// Jacobi-preconditioned CG for symmetric positive definite A. Stops at
// ||Ax - b|| <= tol ||b||; throws SolverError after 10 * dim iterations.
std::vector<double> cg_solve(const SparseOperator& A, std::span<const double> b, double tol,
                             CgReport* report = nullptr);

struct StepParams {
  double tau = 1e-5;
  double eps = 1.0 / 32.0;
  double lambda = 200.0;
  SchemeVariant variant;
  double cg_tol = 1e-10;
};

struct StepResult {
  FeFunction x;       // X^n
  FeFunction x_star;  // frozen iterate of the last linear solve
  int fp_iters = 0;   // linear solves performed
  double update = 0.0;
  bool cap_hit = false;  // FIX did not reach its tolerance
  std::vector<double> cg_residuals;
  std::vector<int> cg_iterations;
  std::vector<CgReport> cg_reports;  // only filled when requested
};

// Solves (M + tau A(X*) + tau lambda M) X = M X_prev + tau lambda M g_h + M noise
// with X = 0 on the boundary. Throws SolverError if a linear solve fails.
StepResult step(const FeSpace& space, const FeFunction& x_prev, const FeFunction& g_h,
                const FeFunction& noise, const StepParams& params, bool keep_cg_reports = false);

}  // namespace stvf
