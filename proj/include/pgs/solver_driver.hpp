#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "pgs/elliptic_core.hpp"
#include "pgs/geometry_grid.hpp"
#include "pgs/riemann_setup.hpp"
#include "pgs/shock_front.hpp"

namespace pgs {

std::vector<double> geometric_schedule(double from, double to, double ratio);

struct SolverConfig {
  int Ns = 128;
  int Ntheta = 256;
  std::vector<double> eps_schedule = geometric_schedule(1e-1, 1e-6, 0.31622776601683794);
  double picard_tol = 1e-10;
  int picard_max = 400;
  double picard_damping = 0.5;
  double shock_damping = 0.5;
  double outer_tol = 1e-7;
  int outer_max = 400;
  double linear_tol = 1e-12;
  int linear_max_iter = 2000;
  SymmetryMode symmetry_mode = SymmetryMode::Half;
  // radial clustering towards the sonic circle and the shock, see radial_nodes
  double radial_stretch = 0.0;
  // stage ellipticity margin is taken over nodes with r1 - r >= this * r1
  double ellipticity_probe_distance = 0.1;
  // bracket width for the P2 value search
  double phat_tol = 1e-7;
  int phat_max = 60;
  bool verbose = false;

  void validate() const;
};

struct TraceRecord {
  int stage = 0;
  double epsilon = 0.0;
  int outer = 0;
  double p_hat = 0.0;
  double shock_change = 0.0;
  int picard_iterations = 0;
  double linear_residual = 0.0;
  double branch_mismatch = 0.0;
  double defect = 0.0;
  int frozen = 0;
  double p_min = 0.0, p_max = 0.0;
  double shock_gap_min = 0.0;   // min over shock of p - p2
  double ellipticity_min = 0.0; // min over interior of p - r^2
};

struct StageSummary {
  double epsilon = 0.0;
  double p_hat = 0.0;
  int outer_iterations = 0;         // shape iterations spent in this stage
  double final_change = 0.0;
  double defect = 0.0;
  int frozen = 0;
  double ellipticity_margin = 0.0;  // min of p - r^2 at probes away from the sonic arc
  double change_from_previous = 0.0;  // max |r - r_prev| against the previous stage, NaN first
  std::vector<double> shock_r;      // samples at the final stage grid
};

// min of p - r^2 over interior nodes at least d * r1 inside the sonic circle
double ellipticity_margin(const DomainGrid& g, const std::vector<double>& p, double d);

struct ConvergenceTrace {
  std::vector<TraceRecord> records;
  std::vector<StageSummary> stages;
};

struct SolverError : std::runtime_error {
  ConvergenceTrace trace;
  SolverError(const std::string& m, ConvergenceTrace t = {})
      : std::runtime_error(m), trace(std::move(t)) {}
};

struct FixedBoundaryResult {
  PressureField field;
  int picard_iterations = 0;
  double last_change = 0.0;
  double linear_residual = 0.0;
};

// damped Picard iteration on the linearized operator with the boundary rows of
// the current shock; p_hat is the one-point value at P2
FixedBoundaryResult solve_fixed_boundary(const DomainGrid& g, const WaveFan& fan, double p_hat,
                                         double eps, const SolverConfig& cfg,
                                         const std::vector<double>& init);
FixedBoundaryResult solve_fixed_boundary(const DomainGrid& g, const WaveFan& fan, double p_hat,
                                         double eps, const SolverConfig& cfg,
                                         const std::vector<double>& init, double tol,
                                         LinearSolverCache* cache = nullptr);

struct FreeBoundaryState {
  ShockCurve shock;
  DomainGrid grid;
  PressureField field;
  double p_hat = 0.0;
  double p_hat_step = 0.0;  // initial bracket step for the next search (0: default)
  double defect = 0.0;
  bool tangent = false;
  int frozen = 0;
  double last_change = 0.0;
  double branch_mismatch = 0.0;
  int outer_iterations = 0;
  LinearSolverCache cache;  // preconditioner shared by the solves of this state
};

// shape iteration r <- (1-lambda) r + lambda J(r) at fixed P2 value
FreeBoundaryState iterate_shape(const WaveFan& fan, double eps, const SolverConfig& cfg,
                                FreeBoundaryState st, ConvergenceTrace* trace, int stage);
FreeBoundaryState iterate_shape(const WaveFan& fan, double eps, const SolverConfig& cfg,
                                FreeBoundaryState st, ConvergenceTrace* trace, int stage,
                                double tol);

// free boundary fixed point: the P2 value is the smallest one for which the
// shock reaches tangency with the sonic circle by 3pi/2
FreeBoundaryState solve_free_boundary(const WaveFan& fan, double eps, const SolverConfig& cfg,
                                      FreeBoundaryState init, ConvergenceTrace* trace,
                                      int stage = 0);

FreeBoundaryState initial_state(const WaveFan& fan, const SolverConfig& cfg);

struct Solution {
  WaveFan fan;
  SolverConfig cfg;
  FreeBoundaryState state;
  ConvergenceTrace trace;
};

Solution continuation_solve(const WaveFan& fan, const SolverConfig& cfg);

// rebuild a field on a new grid by interpolation along rays in physical radius
std::vector<double> resample_field(const DomainGrid& from, const std::vector<double>& p,
                                   const DomainGrid& to);

}  // namespace pgs
