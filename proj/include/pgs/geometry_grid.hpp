#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pgs/riemann_setup.hpp"

namespace pgs {

struct ShockCurve {
  std::vector<double> thetas;  // strictly increasing over [theta3, theta1]
  std::vector<double> r;
  std::vector<double> rprime;
  std::vector<std::uint8_t> frozen_mask;

  std::size_t size() const { return thetas.size(); }
  double theta3() const { return thetas.front(); }
  double theta1() const { return thetas.back(); }
  Vec2 point(std::size_t k) const;
};

// Straight planar shocks of the wave fan, clipped at the circle r = sqrt(pbar0)
// around P2 when the foot of a line lies inside the shock arc.
ShockCurve initial_shock(const WaveFan& fan, const std::vector<double>& thetas);

// Polar form of a straight line: r = d / cos(theta - psi).
ShockCurve line_shock(double d, double psi, const std::vector<double>& thetas);

// Monotone cubic Hermite evaluation of (r, r') at theta in [theta3, theta1].
std::pair<double, double> interp_shock(const ShockCurve& shock, double theta);

enum class SymmetryMode { Half, Full };
enum class NodeTag : std::uint8_t { Interior, Sonic, Shock, SymmetryAxis, Pole };

const char* to_string(NodeTag t);
const char* to_string(SymmetryMode m);

// Theta nodes for a resolution of Ntheta intervals around the full circle.
// Half: [pi/2, 3pi/2] with theta3 a node. Full: one period [theta3, theta3 + 2pi)
// with 3pi/2 and theta1 as nodes.
std::vector<double> make_theta_nodes(double theta1, double theta3, int Ntheta, SymmetryMode mode);

struct DomainGrid {
  SymmetryMode mode = SymmetryMode::Half;
  int Ns = 0;
  int Ntheta = 0;
  double r1 = 0.0;
  double stretch = 0.0;  // s_i = tanh(stretch * i / Ns) / tanh(stretch), uniform at 0
  std::vector<double> s;
  std::vector<double> theta;
  std::vector<double> Rb, dRb;
  std::vector<std::uint8_t> shock_node;  // theta node lies on [theta3, theta1]
  int j3 = -1, j2 = -1, j1 = -1;         // theta3, 3pi/2, theta1 node indices (j1 = -1 in Half)

  int nth() const { return static_cast<int>(theta.size()); }
  bool periodic() const { return mode == SymmetryMode::Full; }
  int size() const { return 1 + Ns * nth(); }
  int index(int i, int j) const { return i == 0 ? 0 : 1 + (i - 1) * nth() + j; }
  // radial spacing below node i, in s
  double hs(int i) const { return s[i] - s[i - 1]; }
  double radius(int i, int j) const { return s[i] * Rb[j]; }
  double xi(int i, int j) const;
  double eta(int i, int j) const;
  NodeTag tag(int i, int j) const;
  // left branch (theta < 3pi/2) or right branch of the shock
  bool left_branch(int j) const { return theta[j] < kTheta2; }

  // neighbor across theta with reflection (Half) or wrap (Full): (index, spacing)
  std::pair<int, double> theta_neighbor(int j, int side) const;

  // area weights per unknown (pole gets its disk share); Half mode weights
  // cover the half disk and are doubled by area().
  std::vector<double> quadrature_weights() const;
  double area() const;
};

// relative radii 0 = s_0 < ... < s_Ns = 1, clustered towards s = 1 for stretch > 0
std::vector<double> radial_nodes(int Ns, double stretch);

DomainGrid build_grid(const WaveFan& fan, const ShockCurve& shock, int Ns, int Ntheta,
                      SymmetryMode mode, double stretch = 0.0);

// grid over a full disk of radius R0 (no shock)
DomainGrid build_disk_grid(double R0, int Ns, int Ntheta, double stretch = 0.0);

struct PressureField {
  std::vector<double> values;
  double at(const DomainGrid& g, int i, int j) const { return values[g.index(i, j)]; }
};

// Sample angles of the whole shock [theta3, theta1] matching the grid's shock
// nodes; Half mode mirrors the left branch about 3pi/2.
std::vector<double> shock_thetas(const DomainGrid& g);

}  // namespace pgs
