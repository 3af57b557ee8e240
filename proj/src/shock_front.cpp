#include "pgs/shock_front.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pgs {

double shock_rhs_g(double p, double r, double p2, Branch branch) {
  const double pbar = 0.5 * (p + p2);
  const double w = r * r - pbar;
  if (w <= 0.0) return 0.0;
  const double g = r * std::sqrt(w / pbar);
  return branch == Branch::Right ? g : -g;
}

ObliqueCoeffs oblique_coeffs(double p, double r, double rp, double p2) {
  const double pbar = 0.5 * (p + p2);
  const double jump = p - p2;
  const double r2 = r * r;
  ObliqueCoeffs c;
  c.beta1 = 2.0 * rp * ((r2 - pbar) / r2 - jump / (4.0 * pbar) + pbar * (r2 - p) / (r2 * p));
  c.beta2 = 4.0 * (r2 - pbar) / r2 - jump / (2.0 * pbar);
  c.mu = -2.0 * rp * (1.0 - pbar / p);
  return c;
}

double p_hat_at_P2(double r, double p2) {
  const double ph = 2.0 * r * r - p2;
  if (!(ph > p2)) throw ConfigError("infeasible geometry: p_hat <= p2 at P2");
  return ph;
}

ShockBC make_shock_bc(const DomainGrid& g, const std::vector<double>& field, double p2,
                      double p_hat, const ShockBC* freeze) {
  ShockBC bc;
  bc.p_hat = p_hat;
  bc.p2 = p2;
  for (int j = 0; j < g.nth(); ++j) {
    if (g.tag(g.Ns, j) != NodeTag::Shock) continue;
    ShockBCNode n;
    n.j = j;
    n.is_P2 = (j == g.j2);
    const double p = field[g.index(g.Ns, j)];
    const double r = g.Rb[j];
    n.orient = g.left_branch(j) || n.is_P2 ? 1 : -1;
    // enforce the (R3) sign pattern for the derivative entering the rows
    double rp = g.dRb[j];
    if (n.orient > 0) rp = std::min(rp, 0.0);
    else rp = std::max(rp, 0.0);
    const ObliqueCoeffs c = oblique_coeffs(p, r, rp, p2);
    n.beta1 = c.beta1;
    n.beta2 = c.beta2;
    n.mu = c.mu;
    n.pbar = 0.5 * (p + p2);
    n.jump = p - p2;
    n.upwind = n.orient * n.beta2 < 0 ? 1 : -1;
    bc.nodes.push_back(n);
  }
  if (freeze && freeze->nodes.size() == bc.nodes.size()) {
    for (std::size_t k = 0; k < bc.nodes.size(); ++k) bc.nodes[k].upwind = freeze->nodes[k].upwind;
  }
  return bc;
}

std::vector<double> shock_trace(const DomainGrid& g, const std::vector<double>& field) {
  std::vector<double> out;
  if (g.mode == SymmetryMode::Full) {
    for (int j = g.j3; j <= g.j1; ++j) out.push_back(field[g.index(g.Ns, j)]);
    return out;
  }
  for (int j = g.j3; j <= g.j2; ++j) out.push_back(field[g.index(g.Ns, j)]);
  for (int j = g.j2 - 1; j >= g.j3; --j) out.push_back(field[g.index(g.Ns, j)]);
  return out;
}

BranchResult integrate_branch(const std::function<double(double)>& pf, double p2, Branch branch,
                              double r0, const std::vector<double>& nodes) {
  BranchResult out;
  const std::size_t n = nodes.size();
  out.thetas = nodes;
  out.r.assign(n, r0);
  out.rprime.assign(n, 0.0);
  out.clamped.assign(n, 0);
  auto g = [&](double t, double r) { return shock_rhs_g(pf(t), r, p2, branch); };
  const double dir = branch == Branch::Left ? 1.0 : -1.0;  // sign of theta progress
  out.theta_tangent = nodes.back();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double t = nodes[k], h = nodes[k + 1] - t, y = out.r[k];
    const double k1 = g(t, y);
    const double k2 = g(t + 0.5 * h, y + 0.5 * h * k1);
    const double k3 = g(t + 0.5 * h, y + 0.5 * h * k2);
    const double k4 = g(t + h, y + h * k3);
    out.r[k + 1] = y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    const double pbar = 0.5 * (pf(nodes[k + 1]) + p2);
    if (out.r[k + 1] * out.r[k + 1] <= pbar * (1.0 + 1e-14)) {
      out.clamped[k + 1] = 1;
      if (!out.reached_tangency) {
        out.reached_tangency = true;
        // resolve the crossing with sub-steps, then sqrt(w) decays linearly in
        // theta at rate r^2/sqrt(pbar) inside the last one
        constexpr int kSub = 64;
        const double hs = h / kSub;
        double ts = t, ys = y;
        bool crossed = false;
        for (int q = 0; q < kSub; ++q) {
          const double a1 = g(ts, ys);
          const double a2 = g(ts + 0.5 * hs, ys + 0.5 * hs * a1);
          const double a3 = g(ts + 0.5 * hs, ys + 0.5 * hs * a2);
          const double a4 = g(ts + hs, ys + hs * a3);
          const double yn = ys + hs / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4);
          if (yn * yn <= 0.5 * (pf(ts + hs) + p2) * (1.0 + 1e-14)) {
            crossed = true;
            break;
          }
          ts += hs;
          ys = yn;
        }
        if (crossed) {
          const double pb = 0.5 * (pf(ts) + p2);
          const double w = std::max(ys * ys - pb, 0.0);
          const double step = std::sqrt(w * pb) / (ys * ys);
          out.theta_tangent = ts + dir * std::min(step, std::abs(hs));
        } else {
          out.theta_tangent = nodes[k + 1];
        }
      }
    }
  }
  for (std::size_t k = 0; k < n; ++k) out.rprime[k] = g(nodes[k], out.r[k]);
  if (!out.reached_tangency) {
    const double t = nodes.back(), y = out.r.back();
    const double pb = 0.5 * (pf(t) + p2);
    const double w = std::max(y * y - pb, 0.0);
    out.theta_tangent = t + dir * std::sqrt(w * pb) / (y * y);
  }
  return out;
}

namespace {

std::function<double(double)> linear_sampler(const std::vector<double>& t,
                                             const std::vector<double>& v) {
  return [&t, &v](double x) {
    if (x <= t.front()) return v.front();
    if (x >= t.back()) return v.back();
    const std::size_t k = std::upper_bound(t.begin(), t.end(), x) - t.begin();
    const double a = (x - t[k - 1]) / (t[k] - t[k - 1]);
    return (1.0 - a) * v[k - 1] + a * v[k];
  };
}

}  // namespace

MapJResult map_J(const ShockCurve& shock, const std::vector<double>& trace, const WaveFan& fan,
                 SymmetryMode mode) {
  const auto& th = shock.thetas;
  if (trace.size() != th.size()) throw std::invalid_argument("map_J: trace size mismatch");
  const std::size_t n = th.size();
  std::size_t k2 = 0;
  while (k2 < n && std::abs(th[k2] - kTheta2) > 1e-12) ++k2;
  if (k2 == n) throw std::invalid_argument("map_J: 3pi/2 is not a shock sample");

  const auto pf = linear_sampler(th, trace);
  const double p2 = fan.cfg.p2;

  std::vector<double> left_nodes(th.begin(), th.begin() + k2 + 1);
  const BranchResult L = integrate_branch(pf, p2, Branch::Left, fan.r1, left_nodes);

  MapJResult res;
  ShockCurve& c = res.curve;
  c.thetas = th;
  c.r.assign(n, 0.0);
  c.rprime.assign(n, 0.0);
  c.frozen_mask.assign(n, 0);
  for (std::size_t k = 0; k <= k2; ++k) {
    c.r[k] = L.r[k];
    c.rprime[k] = L.rprime[k];
    c.frozen_mask[k] = L.clamped[k];
  }
  const double dL = kTheta2 - L.theta_tangent;

  if (mode == SymmetryMode::Half) {
    for (std::size_t k = k2 + 1; k < n; ++k) {
      const std::size_t m = 2 * k2 - k;
      c.r[k] = c.r[m];
      c.rprime[k] = -c.rprime[m];
      c.frozen_mask[k] = c.frozen_mask[m];
    }
    res.defect = dL;
    res.tangent = L.reached_tangency;
  } else {
    std::vector<double> right_nodes(th.rbegin(), th.rbegin() + (n - k2));
    const BranchResult R = integrate_branch(pf, p2, Branch::Right, fan.r1, right_nodes);
    for (std::size_t q = 0; q < right_nodes.size(); ++q) {
      const std::size_t k = n - 1 - q;
      if (k == k2) continue;
      c.r[k] = R.r[q];
      c.rprime[k] = R.rprime[q];
      c.frozen_mask[k] = R.clamped[q];
    }
    const double rR = R.r.back();
    res.branch_mismatch = std::abs(L.r.back() - rR);
    c.r[k2] = 0.5 * (L.r.back() + rR);
    res.defect = 0.5 * (dL + (R.theta_tangent - kTheta2));
    res.tangent = L.reached_tangency && R.reached_tangency;
  }
  c.rprime[k2] = 0.0;
  c.frozen_mask[k2] = 0;
  c.r.front() = fan.r1;
  c.r.back() = fan.r1;
  for (auto f : c.frozen_mask) res.frozen_count += f;
  return res;
}

}  // namespace pgs
