#include "pgs/field_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "pgs/shock_front.hpp"

namespace pgs {

double unwrap_angle(const WaveFan& fan, double theta) {
  double t = std::fmod(theta - fan.theta3, kTwoPi);
  if (t < 0) t += kTwoPi;
  return fan.theta3 + t;
}

RayField full_rays(const DomainGrid& g, const std::vector<double>& p, const WaveFan& fan) {
  struct Ray {
    double theta, R, dR;
    std::uint8_t shock;
    int j;
    bool mirrored;
  };
  std::vector<Ray> list;
  for (int j = 0; j < g.nth(); ++j) {
    const bool shock = g.shock_node[j] && j != g.j3 && j != g.j1;
    list.push_back({unwrap_angle(fan, g.theta[j]), g.Rb[j], g.dRb[j], shock, j, false});
    if (g.mode == SymmetryMode::Half && j > 0 && j < g.nth() - 1)
      list.push_back({unwrap_angle(fan, 3.0 * kPi - g.theta[j]), g.Rb[j], -g.dRb[j], shock, j, true});
  }
  std::sort(list.begin(), list.end(), [](const Ray& a, const Ray& b) { return a.theta < b.theta; });
  RayField f;
  f.Ns = g.Ns;
  f.s = g.s;
  const int n = g.Ns + 1;
  for (const Ray& r : list) {
    f.theta.push_back(r.theta);
    f.R.push_back(r.R);
    f.dR.push_back(r.dR);
    f.on_shock.push_back(r.shock);
    for (int i = 0; i < n; ++i) f.p.push_back(p[g.index(i, r.j)]);
  }
  return f;
}

namespace {

double ray_angle(Vec2 d) {
  return std::atan2(d.y, d.x);
}

}  // namespace

int vortex_sector(const WaveFan& fan, double theta) {
  const double t = unwrap_angle(fan, theta);
  const double t23 = unwrap_angle(fan, ray_angle(fan.vortex_J23p.d));
  const double t34 = unwrap_angle(fan, ray_angle(fan.vortex_J34m.d));
  if (t <= t23) return 2;
  if (t <= t34) return 3;
  return 4;
}

Vec2 shock_velocity_jump(double jump_p, double r, double rprime, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {jump_p * (c + rprime * s / r) / r, jump_p * (s - rprime * c / r) / r};
}

VelocityField recover_velocity(const RayField& f, const WaveFan& fan, double s_min) {
  VelocityField out;
  out.s_min = s_min;
  const int nr = f.rays(), n = f.Ns + 1;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.u.assign(f.p.size(), nan);
  out.v.assign(f.p.size(), nan);
  out.sector.assign(nr, 1);
  const double p2 = fan.cfg.p2;

  // d/dtheta at fixed s, three-point on the periodic ray list
  auto dtheta = [&](int k, int i) {
    const int km = (k - 1 + nr) % nr, kp = (k + 1) % nr;
    double hm = f.theta[k] - f.theta[km], hp = f.theta[kp] - f.theta[k];
    if (hm <= 0) hm += kTwoPi;
    if (hp <= 0) hp += kTwoPi;
    const double fm = f.p[f.at(km, i)], f0 = f.p[f.at(k, i)], fp = f.p[f.at(kp, i)];
    return (hm * hm * (fp - f0) + hp * hp * (f0 - fm)) / (hm * hp * (hm + hp));
  };
  // d/ds by the three-point parabola through (i-1, i, i+1), one-sided at the boundary
  auto dsd = [&](int k, int i) {
    const int c = std::min(i, f.Ns - 1);
    const double s0 = f.s[c - 1], s1 = f.s[c], s2 = f.s[c + 1], x = f.s[i];
    const double f0 = f.p[f.at(k, c - 1)], f1 = f.p[f.at(k, c)], f2 = f.p[f.at(k, c + 1)];
    return f0 * (2 * x - s1 - s2) / ((s0 - s1) * (s0 - s2)) +
           f1 * (2 * x - s0 - s2) / ((s1 - s0) * (s1 - s2)) +
           f2 * (2 * x - s0 - s1) / ((s2 - s0) * (s2 - s1));
  };

  for (int k = 0; k < nr; ++k) {
    const double th = f.theta[k], c = std::cos(th), sn = std::sin(th);
    const double R = f.R[k];
    State outer = fan.state(1);
    Vec2 jump{0.0, 0.0};
    if (f.on_shock[k]) {
      const int sec = vortex_sector(fan, th);
      out.sector[k] = static_cast<std::int8_t>(sec);
      outer = fan.state(sec);
      const double pin = f.p[f.at(k, f.Ns)];
      // r' from the RH relation at the node keeps [p]^2 = pbar |[u]|^2 exact
      const Branch br = unwrap_angle(fan, th) < kTheta2 ? Branch::Left : Branch::Right;
      const double rp = shock_rhs_g(pin, R, p2, br);
      jump = shock_velocity_jump(pin - p2, R, rp, th);
    }
    auto integrand = [&](int i, double& fu, double& fv) {
      const double r = f.radius(k, i);
      const double ps = dsd(k, i), pt = dtheta(k, i);
      const double pr = ps / R;
      const double pth = pt - ps * f.s[i] * f.dR[k] / R;  // at fixed r
      const double pxi = c * pr - sn * pth / r;
      const double peta = sn * pr + c * pth / r;
      fu = pxi / r;
      fv = peta / r;
    };
    double u = outer.u - jump.x, v = outer.v - jump.y;
    out.u[f.at(k, f.Ns)] = u;
    out.v[f.at(k, f.Ns)] = v;
    double fu0, fv0;
    integrand(f.Ns, fu0, fv0);
    for (int i = f.Ns - 1; i >= 1 && f.s[i] >= s_min * (1.0 - 1e-12); --i) {
      double fu1, fv1;
      integrand(i, fu1, fv1);
      const double dr = f.radius(k, i + 1) - f.radius(k, i);
      u -= 0.5 * dr * (fu0 + fu1);
      v -= 0.5 * dr * (fv0 + fv1);
      out.u[f.at(k, i)] = u;
      out.v[f.at(k, i)] = v;
      fu0 = fu1;
      fv0 = fv1;
    }
  }
  return out;
}

CompositeSolution make_composite(const WaveFan& fan, const ShockCurve& shock, RayField field) {
  CompositeSolution c;
  c.fan = fan;
  c.shock = shock;
  c.velocity = recover_velocity(field, fan);
  c.field = std::move(field);
  return c;
}

const char* to_string(Region r) {
  switch (r) {
    case Region::State1: return "1";
    case Region::State2: return "2";
    case Region::State3: return "3";
    case Region::State4: return "4";
    default: return "omega";
  }
}

double interpolate_rays(const RayField& f, const std::vector<double>& values, double r,
                        double theta) {
  const int nr = f.rays();
  // rays bracketing theta on the periodic list
  const double t0 = f.theta.front();
  double t = std::fmod(theta - t0, kTwoPi);
  if (t < 0) t += kTwoPi;
  t += t0;
  int k1 = static_cast<int>(std::upper_bound(f.theta.begin(), f.theta.end(), t) - f.theta.begin());
  int k0 = k1 - 1;
  double span, a;
  if (k1 == nr) {
    k1 = 0;
    span = f.theta.front() + kTwoPi - f.theta.back();
    a = (t - f.theta.back()) / span;
  } else {
    span = f.theta[k1] - f.theta[k0];
    a = (t - f.theta[k0]) / span;
  }
  auto along = [&](int k) {
    const double sq = std::clamp(r / f.R[k], 0.0, 1.0);
    int i = static_cast<int>(std::upper_bound(f.s.begin(), f.s.end(), sq) - f.s.begin()) - 1;
    i = std::clamp(i, 0, f.Ns - 1);
    const double b = (sq - f.s[i]) / (f.s[i + 1] - f.s[i]);
    return (1.0 - b) * values[f.at(k, i)] + b * values[f.at(k, i + 1)];
  };
  return (1.0 - a) * along(k0) + a * along(k1);
}

SampleResult sample_solution(const CompositeSolution& sol, double xi, double eta) {
  const WaveFan& fan = sol.fan;
  const double r = std::hypot(xi, eta);
  const double th = unwrap_angle(fan, std::atan2(eta, xi));
  auto constant = [&](int k) {
    SampleResult s;
    const State& st = fan.state(k);
    s.p = st.p;
    s.u = st.u;
    s.v = st.v;
    s.region = static_cast<Region>(k - 1);
    return s;
  };
  if (r >= fan.r1) {
    const Vec2 X{xi, eta};
    const bool beyond12 = dot(fan.shock_S12m.n, X) > fan.shock_S12m.offset;
    const bool beyond41 = dot(fan.shock_S41p.n, X) > fan.shock_S41p.offset;
    if (!beyond12 && !beyond41) return constant(1);
    return constant(vortex_sector(fan, th));
  }
  if (th >= fan.theta3 && th <= fan.theta1) {
    const double rs = interp_shock(sol.shock, th).first;
    if (r > rs) return constant(vortex_sector(fan, th));
  }
  SampleResult s;
  s.region = Region::Subsonic;
  s.p = interpolate_rays(sol.field, sol.field.p, r, th);
  // NaN inside the excluded disk propagates through the interpolation
  s.u = interpolate_rays(sol.field, sol.velocity.u, r, th);
  s.v = interpolate_rays(sol.field, sol.velocity.v, r, th);
  if (!std::isfinite(s.u) || !std::isfinite(s.v)) {
    s.u = s.v = std::numeric_limits<double>::quiet_NaN();
    s.velocity_available = false;
  }
  return s;
}

}  // namespace pgs
