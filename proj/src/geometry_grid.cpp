#include "pgs/geometry_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pgs {

Vec2 ShockCurve::point(std::size_t k) const {
  return {r[k] * std::cos(thetas[k]), r[k] * std::sin(thetas[k])};
}

ShockCurve line_shock(double d, double psi, const std::vector<double>& thetas) {
  ShockCurve c;
  c.thetas = thetas;
  for (double t : thetas) {
    const double cs = std::cos(t - psi);
    const double r = d / cs;
    c.r.push_back(r);
    c.rprime.push_back(r * std::tan(t - psi));
    c.frozen_mask.push_back(0);
  }
  return c;
}

ShockCurve initial_shock(const WaveFan& fan, const std::vector<double>& thetas) {
  const double d = std::sqrt(fan.pbar0);
  const double psiL = kTheta2 - fan.cfg.alpha1;
  const double psiR = 2.0 * kPi + fan.cfg.alpha1 - 0.5 * kPi;
  ShockCurve c;
  c.thetas = thetas;
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    const double t = thetas[k];
    double r = d, rp = 0.0;
    std::uint8_t frozen = 1;
    if (t <= psiL) {
      r = d / std::cos(t - psiL);
      rp = r * std::tan(t - psiL);
      frozen = 0;
    } else if (t >= psiR) {
      r = d / std::cos(t - psiR);
      rp = r * std::tan(t - psiR);
      frozen = 0;
    }
    c.r.push_back(r);
    c.rprime.push_back(rp);
    c.frozen_mask.push_back(frozen);
  }
  // end points exactly on C1
  c.r.front() = fan.r1;
  c.r.back() = fan.r1;
  if (std::abs(thetas.front() - fan.theta3) < 1e-12) c.frozen_mask.front() = 0;
  if (std::abs(thetas.back() - fan.theta1) < 1e-12) c.frozen_mask.back() = 0;
  return c;
}

std::pair<double, double> interp_shock(const ShockCurve& c, double theta) {
  const auto& t = c.thetas;
  const std::size_t n = t.size();
  if (n < 2) throw std::invalid_argument("interp_shock: need at least two samples");
  const double tol = 1e-12 * (1.0 + std::abs(theta));
  if (theta < t.front() - tol || theta > t.back() + tol)
    throw std::out_of_range("interp_shock: theta outside [theta3, theta1]");
  theta = std::clamp(theta, t.front(), t.back());
  std::size_t k = std::upper_bound(t.begin(), t.end(), theta) - t.begin();
  k = std::clamp<std::size_t>(k, 1, n - 1) - 1;
  const double h = t[k + 1] - t[k];
  const double y0 = c.r[k], y1 = c.r[k + 1];
  double m0 = c.rprime[k], m1 = c.rprime[k + 1];
  const double delta = (y1 - y0) / h;
  if (delta == 0.0) {
    m0 = m1 = 0.0;
  } else {
    if (m0 / delta < 0) m0 = 0.0;
    if (m1 / delta < 0) m1 = 0.0;
    const double a = m0 / delta, b = m1 / delta;
    const double q = a * a + b * b;
    if (q > 9.0) {
      const double tau = 3.0 / std::sqrt(q);
      m0 = tau * a * delta;
      m1 = tau * b * delta;
    }
  }
  const double u = (theta - t[k]) / h;
  const double u2 = u * u, u3 = u2 * u;
  const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
  const double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
  const double r = h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1;
  const double d00 = (6 * u2 - 6 * u) / h, d10 = 3 * u2 - 4 * u + 1;
  const double d01 = (-6 * u2 + 6 * u) / h, d11 = 3 * u2 - 2 * u;
  const double rp = d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1;
  return {r, rp};
}

const char* to_string(NodeTag t) {
  switch (t) {
    case NodeTag::Interior: return "interior";
    case NodeTag::Sonic: return "sonic";
    case NodeTag::Shock: return "shock";
    case NodeTag::SymmetryAxis: return "axis";
    default: return "pole";
  }
}

const char* to_string(SymmetryMode m) { return m == SymmetryMode::Half ? "half" : "full"; }

namespace {

void append_segment(std::vector<double>& out, double a, double b, int n) {
  for (int k = 0; k < n; ++k) out.push_back(a + (b - a) * k / n);
}

int share(double len, double dt) { return std::max(2, static_cast<int>(std::lround(len / dt))); }

}  // namespace

std::vector<double> make_theta_nodes(double theta1, double theta3, int Ntheta, SymmetryMode mode) {
  if (Ntheta < 8) throw std::invalid_argument("Ntheta too small");
  const double dt = kTwoPi / Ntheta;
  std::vector<double> th;
  if (mode == SymmetryMode::Half) {
    const int total = Ntheta / 2;
    const int nb = std::min(share(kTheta2 - theta3, dt), total - 2);
    const int na = total - nb;
    append_segment(th, 0.5 * kPi, theta3, na);
    append_segment(th, theta3, kTheta2, nb);
    th.push_back(kTheta2);
  } else {
    const int nl = share(kTheta2 - theta3, dt);
    const int nr = share(theta1 - kTheta2, dt);
    const int ns = Ntheta - nl - nr;
    if (ns < 2) throw std::invalid_argument("Ntheta too small for the shock arc");
    append_segment(th, theta3, kTheta2, nl);
    append_segment(th, kTheta2, theta1, nr);
    append_segment(th, theta1, theta3 + kTwoPi, ns);
  }
  return th;
}

double DomainGrid::xi(int i, int j) const { return radius(i, j) * std::cos(theta[j]); }
double DomainGrid::eta(int i, int j) const { return radius(i, j) * std::sin(theta[j]); }

NodeTag DomainGrid::tag(int i, int j) const {
  if (i == 0) return NodeTag::Pole;
  if (i == Ns) {
    if (!shock_node[j] || j == j3 || j == j1) return NodeTag::Sonic;
    return NodeTag::Shock;
  }
  if (mode == SymmetryMode::Half && (j == 0 || j == nth() - 1)) return NodeTag::SymmetryAxis;
  return NodeTag::Interior;
}

std::pair<int, double> DomainGrid::theta_neighbor(int j, int side) const {
  const int n = nth();
  if (periodic()) {
    const int jj = (j + side + n) % n;
    double h = side > 0 ? theta[jj] - theta[j] : theta[j] - theta[jj];
    if (h < 0) h += kTwoPi;
    return {jj, h};
  }
  if (side > 0) {
    if (j < n - 1) return {j + 1, theta[j + 1] - theta[j]};
    return {n - 2, theta[n - 1] - theta[n - 2]};
  }
  if (j > 0) return {j - 1, theta[j] - theta[j - 1]};
  return {1, theta[1] - theta[0]};
}

std::vector<double> DomainGrid::quadrature_weights() const {
  const int n = nth();
  std::vector<double> wt(n);
  for (int j = 0; j < n; ++j) {
    const auto [jp, hp] = theta_neighbor(j, +1);
    const auto [jm, hm] = theta_neighbor(j, -1);
    double w = 0.5 * (hp + hm);
    if (!periodic() && (j == 0 || j == n - 1)) w = 0.5 * (j == 0 ? hp : hm);
    wt[j] = w;
  }
  std::vector<double> w(size(), 0.0);
  for (int i = 1; i <= Ns; ++i) {
    const double width = i == Ns ? 0.5 * hs(i) : 0.5 * (s[i + 1] - s[i - 1]);
    const double ws = width * s[i];
    for (int j = 0; j < n; ++j) w[index(i, j)] = ws * wt[j] * Rb[j] * Rb[j];
  }
  return w;
}

double DomainGrid::area() const {
  double a = 0.0;
  for (double v : quadrature_weights()) a += v;
  return periodic() ? a : 2.0 * a;
}

namespace {

DomainGrid base_grid(int Ns, int Ntheta, SymmetryMode mode, double r1, double stretch) {
  DomainGrid g;
  g.mode = mode;
  g.Ns = Ns;
  g.Ntheta = Ntheta;
  g.r1 = r1;
  g.stretch = stretch;
  g.s = radial_nodes(Ns, stretch);
  return g;
}

}  // namespace

std::vector<double> radial_nodes(int Ns, double stretch) {
  if (Ns < 4) throw std::invalid_argument("Ns too small");
  if (!(stretch >= 0.0) || stretch > 6.0) throw std::invalid_argument("stretch outside [0, 6]");
  std::vector<double> s(Ns + 1);
  for (int i = 0; i <= Ns; ++i) {
    const double u = static_cast<double>(i) / Ns;
    s[i] = stretch > 0.0 ? std::tanh(stretch * u) / std::tanh(stretch) : u;
  }
  s[Ns] = 1.0;
  return s;
}

DomainGrid build_grid(const WaveFan& fan, const ShockCurve& shock, int Ns, int Ntheta,
                      SymmetryMode mode, double stretch) {
  const auto& t = shock.thetas;
  if (t.size() < 3) throw std::invalid_argument("build_grid: shock has too few samples");
  for (std::size_t k = 1; k < t.size(); ++k)
    if (!(t[k] > t[k - 1])) throw std::invalid_argument("build_grid: non-monotone shock samples");
  if (std::abs(t.front() - fan.theta3) > 1e-9 || std::abs(t.back() - fan.theta1) > 1e-9)
    throw std::invalid_argument("build_grid: shock samples do not cover [theta3, theta1]");

  DomainGrid g = base_grid(Ns, Ntheta, mode, fan.r1, stretch);
  g.theta = make_theta_nodes(fan.theta1, fan.theta3, Ntheta, mode);
  const int n = g.nth();
  g.Rb.assign(n, fan.r1);
  g.dRb.assign(n, 0.0);
  g.shock_node.assign(n, 0);
  for (int j = 0; j < n; ++j) {
    const double th = g.theta[j];
    if (std::abs(th - fan.theta3) < 1e-12) g.j3 = j;
    if (std::abs(th - kTheta2) < 1e-12) g.j2 = j;
    if (mode == SymmetryMode::Full && std::abs(th - fan.theta1) < 1e-12) g.j1 = j;
    const double lo = fan.theta3 - 1e-12, hi = fan.theta1 + 1e-12;
    if (th >= lo && th <= hi) {
      g.shock_node[j] = 1;
      const auto [r, rp] = interp_shock(shock, std::clamp(th, fan.theta3, fan.theta1));
      g.Rb[j] = r;
      g.dRb[j] = rp;
    }
  }
  // no slit at P1, P3
  g.Rb[g.j3] = fan.r1;
  if (g.j1 >= 0) g.Rb[g.j1] = fan.r1;
  return g;
}

DomainGrid build_disk_grid(double R0, int Ns, int Ntheta, double stretch) {
  DomainGrid g = base_grid(Ns, Ntheta, SymmetryMode::Full, R0, stretch);
  for (int j = 0; j < Ntheta; ++j) g.theta.push_back(kTwoPi * j / Ntheta);
  g.Rb.assign(Ntheta, R0);
  g.dRb.assign(Ntheta, 0.0);
  g.shock_node.assign(Ntheta, 0);
  return g;
}

std::vector<double> shock_thetas(const DomainGrid& g) {
  std::vector<double> out;
  if (g.mode == SymmetryMode::Full) {
    for (int j = g.j3; j <= g.j1; ++j) out.push_back(g.theta[j]);
    return out;
  }
  for (int j = g.j3; j <= g.j2; ++j) out.push_back(g.theta[j]);
  for (int j = g.j2 - 1; j >= g.j3; --j) out.push_back(3.0 * kPi - g.theta[j]);
  return out;
}

}  // namespace pgs
