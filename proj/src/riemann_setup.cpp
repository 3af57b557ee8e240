#include "pgs/riemann_setup.hpp"

#include <cmath>
#include <sstream>

namespace pgs {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void validate(const RiemannConfig& c, bool allow_critical) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(c.p1) || !finite(c.p2) || !finite(c.u1) || !finite(c.v1) || !finite(c.alpha1) ||
      !finite(c.alpha2))
    throw ConfigError("non-finite value in Riemann data");
  if (!(c.p2 > 0.0)) throw ConfigError("p2 > 0 required (got p2=" + fmt(c.p2) + ")");
  if (!(c.p1 > c.p2)) throw ConfigError("p1 > p2 required");
  const double half = 0.5 * kPi;
  bool a1_ok = c.alpha1 > 0.0 && c.alpha1 < half;
  if (allow_critical && c.alpha1 == 0.0) a1_ok = true;
  if (!a1_ok) throw ConfigError("alpha1 in (0, pi/2) required (got " + fmt(c.alpha1) + ")");
  if (!(c.alpha2 > 0.0 && c.alpha2 < half))
    throw ConfigError("alpha2 in (0, pi/2) required (got " + fmt(c.alpha2) + ")");
}

const char* to_string(WaveKind k) {
  switch (k) {
    case WaveKind::ShockPlus: return "S+";
    case WaveKind::ShockMinus: return "S-";
    case WaveKind::VortexPlus: return "J+";
    case WaveKind::VortexMinus: return "J-";
    default: return "none";
  }
}

WaveFan build_wave_fan(const RiemannConfig& cfg) {
  if (std::sin(cfg.alpha2) == 0.0) throw ConfigError("sin(alpha2) = 0: state 3 undefined");
  WaveFan f;
  f.cfg = cfg;
  const double jump = cfg.p1 - cfg.p2;
  const double pbar = 0.5 * (cfg.p1 + cfg.p2);
  const double k = jump / std::sqrt(pbar);
  const double s1 = std::sin(cfg.alpha1), c1 = std::cos(cfg.alpha1);
  const double s2 = std::sin(cfg.alpha2), c2 = std::cos(cfg.alpha2);

  f.states[0] = {cfg.p1, cfg.u1, cfg.v1};
  f.states[1] = {cfg.p2, cfg.u1 - k * s1, cfg.v1 - k * c1};
  f.states[3] = {cfg.p2, cfg.u1 + k * s1, cfg.v1 - k * c1};
  // both vortex relations across J23 and J34 solved exactly
  f.states[2] = {cfg.p2, cfg.u1, cfg.v1 + k * (s1 * c2 / s2 - c1)};

  f.pbar0 = pbar;
  f.r1 = std::sqrt(cfg.p1);
  f.r2 = std::sqrt(cfg.p2);
  const double d = std::sqrt(pbar);
  f.shock_S12m = {{-s1, -c1}, d};
  f.shock_S41p = {{s1, -c1}, d};
  f.vortex_J23p = {{-s2, -c2}};
  f.vortex_J34m = {{s2, -c2}};

  // P1 is the far root (r' > 0 along the line as theta increases), P3 its mirror
  const double psiR = cfg.alpha1 - 0.5 * kPi;
  const double half = std::acos(d / f.r1);
  // theta1 in (3pi/2, 5pi/2), theta3 = 3pi - theta1 in (pi/2, 3pi/2)
  f.theta1 = kTwoPi + psiR + half;
  f.theta3 = 3.0 * kPi - f.theta1;
  return f;
}

Anchors sonic_anchors(const WaveFan& fan) {
  const double d = fan.shock_S41p.offset;
  if (!(d < fan.r1)) throw ConfigError("shock lines do not meet the sonic circle C1");
  Anchors a;
  a.theta1 = fan.theta1;
  a.theta3 = fan.theta3;
  a.P1 = {fan.r1 * std::cos(a.theta1), fan.r1 * std::sin(a.theta1)};
  a.P3 = {fan.r1 * std::cos(a.theta3), fan.r1 * std::sin(a.theta3)};
  return a;
}

Vec2 tangent_S12m(const WaveFan& fan) {
  const Vec2 n = fan.shock_S12m.n;
  return {n.y, -n.x};
}

Vec2 tangent_S41p(const WaveFan& fan) {
  const Vec2 n = fan.shock_S41p.n;
  return {-n.y, n.x};
}

double rh_residual(const State& a, const State& b) {
  const double jp = a.p - b.p, pb = 0.5 * (a.p + b.p);
  const double du = a.u - b.u, dv = a.v - b.v;
  return std::abs(jp * jp - pb * (du * du + dv * dv));
}

WaveKind classify_discontinuity(const State& left, const State& right, Vec2 t, double tol) {
  const Vec2 m{-t.y, t.x};
  const double jp = left.p - right.p;
  const Vec2 du{left.u - right.u, left.v - right.v};
  const double scale = 1.0 + std::abs(left.p) + std::abs(right.p) + std::hypot(du.x, du.y);

  if (std::abs(jp) <= tol * scale) {
    // vortex sheet: velocity jump along the sheet
    const double along = dot(du, t);
    if (std::abs(along) <= tol * scale) return WaveKind::None;
    if (std::abs(cross(t, du)) > tol * scale) return WaveKind::None;
    return cross(m, du) > 0 ? WaveKind::VortexPlus : WaveKind::VortexMinus;
  }
  if (rh_residual(left, right) > tol * scale * scale) return WaveKind::None;
  if (std::abs(dot(du, t)) > tol * scale) return WaveKind::None;
  return jp > 0 ? WaveKind::ShockPlus : WaveKind::ShockMinus;
}

CriticalSolution critical_case(const RiemannConfig& cfg) {
  validate(cfg, true);
  CriticalSolution c;
  c.p1 = cfg.p1;
  c.p2 = cfg.p2;
  c.pbar0 = 0.5 * (cfg.p1 + cfg.p2);
  const double k = (cfg.p1 - cfg.p2) / std::sqrt(c.pbar0);
  c.upper = {cfg.p1, cfg.u1, cfg.v1};
  c.lower = {cfg.p2, cfg.u1, cfg.v1 - k};
  c.line_eta = -std::sqrt(c.pbar0);
  const double half = std::acos(std::sqrt(c.pbar0 / cfg.p1));
  c.theta1 = kTheta2 + half;
  c.theta3 = kTheta2 - half;
  return c;
}

State CriticalSolution::sample(double, double eta) const {
  return eta > line_eta ? upper : lower;
}

}  // namespace pgs
