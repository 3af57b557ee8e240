#pragma once

#include <cstdint>
#include <vector>

#include "pgs/geometry_grid.hpp"
#include "pgs/riemann_setup.hpp"

namespace pgs {

// Pressure on all rays around the origin, theta in [theta3, theta3 + 2pi).
// Half-mode grids are mirrored about the eta axis. Value (k, 0) is the pole.
struct RayField {
  int Ns = 0;
  std::vector<double> s;
  std::vector<double> theta;
  std::vector<double> R, dR;
  std::vector<std::uint8_t> on_shock;
  std::vector<double> p;  // ray-major, Ns + 1 values per ray

  int rays() const { return static_cast<int>(theta.size()); }
  int at(int k, int i) const { return k * (Ns + 1) + i; }
  double radius(int k, int i) const { return s[i] * R[k]; }
};

RayField full_rays(const DomainGrid& g, const std::vector<double>& p, const WaveFan& fan);

// sector of the supersonic state outside the shock at angle theta: 2, 3 or 4;
// a ray exactly on a vortex direction goes to the lower-theta sector
int vortex_sector(const WaveFan& fan, double theta);

// theta mapped into [theta3, theta3 + 2pi)
double unwrap_angle(const WaveFan& fan, double theta);

struct VelocityField {
  double s_min = 1e-2;
  std::vector<double> u, v;             // same layout as RayField::p; NaN where s < s_min
  std::vector<std::int8_t> sector;      // per ray: 1 on sonic rays, 2/3/4 on shock rays
};

// jump (u_out - u_in, v_out - v_in) across the shock from the first two RH
// relations, with [p] = p_in - p_out
Vec2 shock_velocity_jump(double jump_p, double r, double rprime, double theta);

VelocityField recover_velocity(const RayField& f, const WaveFan& fan, double s_min = 1e-2);

struct CompositeSolution {
  WaveFan fan;
  ShockCurve shock;
  RayField field;
  VelocityField velocity;
};

CompositeSolution make_composite(const WaveFan& fan, const ShockCurve& shock, RayField field);

enum class Region : std::uint8_t { State1, State2, State3, State4, Subsonic };
const char* to_string(Region r);

struct SampleResult {
  double p = 0.0, u = 0.0, v = 0.0;
  Region region = Region::State1;
  bool velocity_available = true;
};

SampleResult sample_solution(const CompositeSolution& sol, double xi, double eta);

// bilinear interpolation of a RayField quantity at polar (r, theta)
double interpolate_rays(const RayField& f, const std::vector<double>& values, double r,
                        double theta);

}  // namespace pgs
