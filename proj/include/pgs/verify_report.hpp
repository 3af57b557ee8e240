#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pgs/field_recovery.hpp"

namespace pgs {

struct Check {
  std::string name;
  std::vector<std::pair<std::string, double>> values;
  std::string criterion;  // human-readable pass rule with its tolerance
  double tolerance = 0.0;
  bool pass = false;
  bool inconclusive = false;
  std::string note;

  double value(const std::string& key) const;
};

struct PropertyReport {
  std::vector<Check> checks;
  bool all_pass() const;
  const Check* find(const std::string& name) const;
};

struct VerifyOptions {
  double bound_slack = 1e-8;
  double convexity_slack = 1e-6;  // times r1
  double interior_fraction = 0.8; // central part of the xi range for strict convexity
  double phi_slack = 1e-8;
  double sonic_band = 0.25;       // x_probe / r1
  double phi_x_band = 0.05;
  int fit_points = 4;
  double corner_min = 0.5;        // times r1
};

Check check_bounds(const CompositeSolution& sol, const VerifyOptions& o = {});
Check check_shock_gap(const CompositeSolution& sol, const VerifyOptions& o = {});
Check check_convexity(const CompositeSolution& sol, const VerifyOptions& o = {});
// returns the phi bound check and the extrapolated phi_x check
std::pair<Check, Check> check_sonic_regularity(const CompositeSolution& sol,
                                               const VerifyOptions& o = {});
Check check_corner_disparity(const CompositeSolution& sol, const VerifyOptions& o = {});
Check check_ellipticity(const CompositeSolution& sol, const VerifyOptions& o = {});

PropertyReport verify_solution(const CompositeSolution& sol, const VerifyOptions& o = {});

// phi_x(0) from a least-squares fit phi = a x + b x^2 on the first n samples
double extrapolate_slope(const std::vector<double>& x, const std::vector<double>& phi, int n);

// distance from (r, theta) to the sonic arc of C1 between P1 and P3
double distance_to_sonic(const WaveFan& fan, double r, double theta);

std::string report_json(const PropertyReport& rep, int indent = 2);
PropertyReport report_from_json(const std::string& text);

}  // namespace pgs
