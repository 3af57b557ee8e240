#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace pgs {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kTheta2 = 1.5 * kPi;  // angular position of P2

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0, y = 0.0;
};

inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

struct RiemannConfig {
  double p1 = 2.0;
  double u1 = 0.0;
  double v1 = 0.0;
  double p2 = 1.0;
  double alpha1 = 0.25 * kPi;
  double alpha2 = 0.25 * kPi;
};

// Throws ConfigError quoting the violated invariant. alpha1 == 0 is accepted
// only when allow_critical is set (analytic path).
void validate(const RiemannConfig& cfg, bool allow_critical = false);

struct State {
  double p = 0.0, u = 0.0, v = 0.0;
  double E() const { return 0.5 * (u * u + v * v) + p; }
};

// { X : n . X = offset }, n unit
struct PlanarLine {
  Vec2 n;
  double offset = 0.0;
};

// ray from the origin with unit direction d
struct Ray {
  Vec2 d;
};

enum class WaveKind { ShockPlus, ShockMinus, VortexPlus, VortexMinus, None };
const char* to_string(WaveKind k);

struct WaveFan {
  RiemannConfig cfg;
  std::array<State, 4> states;  // states[k] is state k+1
  PlanarLine shock_S12m, shock_S41p;
  Ray vortex_J23p, vortex_J34m;
  double r1 = 0.0, r2 = 0.0;
  double theta1 = 0.0, theta3 = 0.0;
  double pbar0 = 0.0;

  const State& state(int k) const { return states[k - 1]; }
};

WaveFan build_wave_fan(const RiemannConfig& cfg);

struct Anchors {
  double theta1 = 0.0, theta3 = 0.0;
  Vec2 P1, P3;
};

Anchors sonic_anchors(const WaveFan& fan);

// direction: unit tangent of the discontinuity pointing away from the origin
// (for a shock line, away from the foot of the perpendicular). `left` is the
// state on the counterclockwise side of direction.
WaveKind classify_discontinuity(const State& left, const State& right, Vec2 direction,
                                double tol = 1e-10);

// Unit tangents used with classify_discontinuity for the four initial waves,
// taken at the sonic intersection points for the shocks.
Vec2 tangent_S12m(const WaveFan& fan);
Vec2 tangent_S41p(const WaveFan& fan);

double rh_residual(const State& a, const State& b);

// Piecewise-constant solution of the alpha1 = 0 configuration: state 1 above
// the line eta = -sqrt(pbar0), the common lower state below it.
struct CriticalSolution {
  double p1 = 0, p2 = 0, pbar0 = 0;
  State upper, lower;
  double line_eta = 0.0;
  double theta1 = 0.0, theta3 = 0.0;
  State sample(double xi, double eta) const;
};

CriticalSolution critical_case(const RiemannConfig& cfg);

}  // namespace pgs
