#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "pgs/elliptic_core.hpp"

namespace pgs::testing {

// p(xi, eta) = 2 + 0.2 sin(1.3 xi + 0.4) cos(0.9 eta) - 0.3 (xi^2 + eta^2) on the unit disk,
// where p - r^2 >= 0.5 keeps the cut-off on its identity branch
struct Manufactured {
  double R0 = 1.0;
  double eps = 0.1;

  struct D {
    double p, px, py, pxx, pxy, pyy;
  };
  static D eval(double x, double y) {
    const double a = 1.3 * x + 0.4, b = 0.9 * y;
    const double sa = std::sin(a), ca = std::cos(a), sb = std::sin(b), cb = std::cos(b);
    return {2.0 + 0.2 * sa * cb - 0.3 * (x * x + y * y),
            0.2 * 1.3 * ca * cb - 0.6 * x,
            -0.2 * 0.9 * sa * sb - 0.6 * y,
            -0.2 * 1.69 * sa * cb - 0.6,
            -0.2 * 1.3 * 0.9 * ca * sb,
            -0.2 * 0.81 * sa * cb - 0.6};
  }

  // L^{eps,+} p with omega = p, from closed-form derivatives
  double source(double r, double t) const {
    const double c = std::cos(t), s = std::sin(t);
    const D d = eval(r * c, r * s);
    if (r == 0.0) return (d.p + eps) * (d.pxx + d.pyy);
    const double pr = c * d.px + s * d.py;
    const double prr = c * c * d.pxx + 2 * c * s * d.pxy + s * s * d.pyy;
    const double ptt = r * r * (s * s * d.pxx - 2 * c * s * d.pxy + c * c * d.pyy) - r * pr;
    return (zeta(d.p - r * r, eps) + eps) * prr + (d.p + eps) / (r * r) * ptt +
           (d.p + eps) / r * pr + r * r * pr / d.p * pr - 2 * r * pr;
  }
};

struct MmsResult {
  double max_error = 0.0;
  int upwinded_rows = 0;
};

inline MmsResult mms_error(int n, double stretch = 0.0) {
  const Manufactured m;
  const DomainGrid g = build_disk_grid(m.R0, n, n, stretch);
  std::vector<double> exact(g.size()), src(g.size());
  for (int j = 0; j < g.nth(); ++j)
    for (int i = 0; i <= g.Ns; ++i) {
      const int q = g.index(i, j);
      const double r = g.radius(i, j), t = g.theta[j];
      exact[q] = Manufactured::eval(r * std::cos(t), r * std::sin(t)).p;
      src[q] = m.source(r, t);
    }
  OperatorSpec spec;
  spec.epsilon = m.eps;
  spec.omega = &exact;
  BoundaryData bd;
  bd.dirichlet = &exact;
  bd.source = &src;
  const LinearSystem sys = assemble_linear(g, spec, bd);
  const std::vector<double> p = solve_linear(sys, 1e-13, 4000);
  MmsResult res;
  res.upwinded_rows = sys.upwinded_rows;
  for (int j = 0; j < g.nth(); ++j)
    for (int i = 0; i < g.Ns; ++i) {
      const int q = g.index(i, j);
      res.max_error = std::max(res.max_error, std::abs(p[q] - exact[q]));
    }
  return res;
}

}  // namespace pgs::testing
