#pragma once

#include <Eigen/Sparse>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgs/geometry_grid.hpp"
#include "pgs/shock_front.hpp"

namespace pgs {

double zeta(double s, double eps);
double zeta_prime(double s, double eps);

struct OperatorSpec {
  double epsilon = 0.0;
  double cutoff_eps = 0.0;             // scale of zeta; equals epsilon in the solver
  const std::vector<double>* omega = nullptr;  // frozen coefficient field
};

// Data for the rows that are not interior rows. sonic_value is used on Sonic
// tags unless dirichlet is non-empty, in which case dirichlet[index] is used
// on every boundary node (Sonic and Shock). source (optional) is the
// right-hand side on interior, axis and pole rows.
struct BoundaryData {
  double sonic_value = 0.0;
  const ShockBC* shock = nullptr;
  const std::vector<double>* dirichlet = nullptr;
  const std::vector<double>* source = nullptr;
};

struct LinearSystem {
  Eigen::SparseMatrix<double, Eigen::RowMajor> A;
  Eigen::VectorXd b;
  int upwinded_rows = 0;
};

struct CoefficientError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

LinearSystem assemble_linear(const DomainGrid& g, const OperatorSpec& spec, const BoundaryData& bd);

struct LinearSolveError : std::runtime_error {
  std::vector<double> residual_history;
  LinearSolveError(const std::string& m, std::vector<double> h)
      : std::runtime_error(m), residual_history(std::move(h)) {}
};

struct LinearSolveInfo {
  int iterations = 0;
  double relative_residual = 0.0;
  bool used_fallback = false;
};

// Holds an incomplete factorization that later solves of nearby systems of the
// same size may reuse; it is refactored when the Krylov iteration slows down.
struct LinearSolverCache {
  struct Impl;
  std::shared_ptr<Impl> impl;
  int refactorizations = 0;
};

std::vector<double> solve_linear(const LinearSystem& sys, double tol, int max_iter,
                                 const std::vector<double>* guess = nullptr,
                                 LinearSolveInfo* info = nullptr,
                                 LinearSolverCache* cache = nullptr);

// Q^{eps,+} p at every node (zero on non-interior rows)
std::vector<double> nonlinear_residual(const DomainGrid& g, const std::vector<double>& p,
                                       double epsilon);

// L^{eps,+} with omega applied to p, same derivative stencils as the residual
std::vector<double> linear_operator_apply(const DomainGrid& g, const std::vector<double>& omega,
                                          const std::vector<double>& p, double epsilon);

// weights w_k on the first ring with sum w_k (P_k - P_0) = (1/2) Laplacian(p)(0) + O(h^2)
struct PoleWeight {
  int index;
  double w;
};
std::vector<PoleWeight> pole_weights(const DomainGrid& g);

}  // namespace pgs
