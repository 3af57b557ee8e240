#pragma once

#include <functional>
#include <vector>

#include "pgs/geometry_grid.hpp"
#include "pgs/riemann_setup.hpp"

namespace pgs {

enum class Branch { Right, Left };

// r' on the shock; 0 when r^2 <= pbar (clamp)
double shock_rhs_g(double p_on_shock, double r, double p2, Branch branch);

struct ObliqueCoeffs {
  double beta1 = 0.0, beta2 = 0.0, mu = 0.0;
};

ObliqueCoeffs oblique_coeffs(double p, double r, double rprime, double p2);

// one-point value at P2 from 2 r^2 = p + p2; throws ConfigError when p_hat <= p2
double p_hat_at_P2(double r_at_P2, double p2);

// Per shock node boundary data. `orient` is +1 on the left branch and -1 on the
// right one, so that orient*mu >= 0; `upwind` is the theta index offset used
// for the tangential derivative.
struct ShockBCNode {
  int j = -1;
  double beta1 = 0.0, beta2 = 0.0, mu = 0.0;
  double pbar = 0.0, jump = 0.0;
  bool is_P2 = false;
  int orient = 1;
  int upwind = 1;
};

struct ShockBC {
  std::vector<ShockBCNode> nodes;  // grid shock nodes strictly between P3 and P1
  double p_hat = 0.0;
  double p2 = 0.0;
};

// Coefficients from the current field at the shock nodes. When `freeze` is
// given, the upwind directions are copied from it.
ShockBC make_shock_bc(const DomainGrid& g, const std::vector<double>& field, double p2,
                      double p_hat, const ShockBC* freeze = nullptr);

// pressure at the shock samples of shock_thetas(g) (Half mode mirrored)
std::vector<double> shock_trace(const DomainGrid& g, const std::vector<double>& field);

// RK4 for r' = g along one branch from (theta_from, r0) to theta_to with the
// given nodes; p(theta) supplies the shock pressure.
struct BranchResult {
  std::vector<double> thetas, r, rprime;
  std::vector<std::uint8_t> clamped;
  double theta_tangent = 0.0;  // estimated first tangency angle (may lie beyond the end)
  bool reached_tangency = false;
};

BranchResult integrate_branch(const std::function<double(double)>& p_of_theta, double p2,
                              Branch branch, double r0, const std::vector<double>& nodes);

struct MapJResult {
  ShockCurve curve;
  double branch_mismatch = 0.0;
  // signed tangency defect: 3pi/2 - theta_tangent on the left branch (mirrored
  // on the right); > 0 when the curve becomes tangent before P2
  double defect = 0.0;
  bool tangent = false;  // tangency reached on or before P2 (both branches in Full mode)
  int frozen_count = 0;
};

MapJResult map_J(const ShockCurve& shock, const std::vector<double>& trace, const WaveFan& fan,
                 SymmetryMode mode);

}  // namespace pgs
