#include "pgs/elliptic_core.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <algorithm>
#include <cmath>

namespace pgs {

double zeta(double s, double eps) {
  if (s >= 0.0) return s;
  if (s <= -eps) return -0.5 * eps;
  // cubic Hermite on [-eps, 0]: zeta(0)=0, zeta'(0)=1, zeta(-eps)=-eps/2, zeta'(-eps)=0
  const double u = -s / eps;
  return eps * (-(u * u * u - 2 * u * u + u) - 0.5 * (-2 * u * u * u + 3 * u * u));
}

double zeta_prime(double s, double eps) {
  if (s >= 0.0) return 1.0;
  if (s <= -eps) return 0.0;
  const double u = -s / eps;
  // d/ds = -(1/eps) d/du
  return (3 * u * u - 4 * u + 1) + 0.5 * (-6 * u * u + 6 * u);
}

namespace {

struct Entry {
  int col;
  double w;
};

// quadratic Lagrange interpolation along ray jj at relative radius sq <= 1
void ray_interp(const DomainGrid& g, int jj, double sq, double scale, std::vector<Entry>& out) {
  // centre node of the three nearest
  int k = static_cast<int>(std::lower_bound(g.s.begin(), g.s.end(), sq) - g.s.begin());
  if (k > 0 && (k > g.Ns || sq - g.s[k - 1] < g.s[k] - sq)) --k;
  k = std::clamp(k, 1, g.Ns - 1);
  for (int a = k - 1; a <= k + 1; ++a) {
    double v = 1.0;
    for (int b = k - 1; b <= k + 1; ++b)
      if (b != a) v *= (sq - g.s[b]) / (g.s[a] - g.s[b]);
    if (v != 0.0) out.push_back({g.index(a, jj), scale * v});
  }
}

struct Arm {
  double h;
  std::vector<Entry> val;  // weights of the value at the arm end
};

// value at angular distance h towards ray jn along the circle through (i, j). If the
// circle leaves the domain first, the arm ends on the shock (R linear in theta) and
// takes the shock value interpolated between the two ray ends.
Arm theta_arm(const DomainGrid& g, int i, int j, int jn, double h) {
  Arm a{h, {}};
  const double r = g.radius(i, j);
  if (r <= g.Rb[jn]) {
    ray_interp(g, jn, r / g.Rb[jn], 1.0, a.val);
    return a;
  }
  const double tau = std::max((g.Rb[j] - r) / (g.Rb[j] - g.Rb[jn]), 1e-3);
  a.h = tau * h;
  a.val.push_back({g.index(g.Ns, j), 1.0 - tau});
  a.val.push_back({g.index(g.Ns, jn), tau});
  return a;
}

// d^2/dtheta^2 at fixed r for node (i, j)
void theta_stencil(const DomainGrid& g, int i, int j, std::vector<Entry>& out, double& diag) {
  const auto [jp, hp0] = g.theta_neighbor(j, +1);
  const auto [jm, hm0] = g.theta_neighbor(j, -1);
  const Arm ap = theta_arm(g, i, j, jp, hp0);
  const Arm am = theta_arm(g, i, j, jm, hm0);
  const double fp = 2.0 / (ap.h * (ap.h + am.h));
  const double fm = 2.0 / (am.h * (ap.h + am.h));
  for (const auto& e : ap.val) out.push_back({e.col, fp * e.w});
  for (const auto& e : am.val) out.push_back({e.col, fm * e.w});
  diag = -(fp + fm);
}

struct Coeffs {
  double A, B, C;
};

// three-point weights on the radial neighbours (i-1, i, i+1) of ray j
struct RadialStencil {
  double hm, hp;
  double d1[3], d2[3];
};

RadialStencil radial_stencil(const DomainGrid& g, int i, int j) {
  RadialStencil st;
  st.hm = g.hs(i) * g.Rb[j];
  st.hp = g.hs(i + 1) * g.Rb[j];
  const double hm = st.hm, hp = st.hp, sum = hm + hp;
  st.d1[0] = -hp / (hm * sum);
  st.d1[1] = (hp - hm) / (hm * hp);
  st.d1[2] = hm / (hp * sum);
  st.d2[0] = 2.0 / (hm * sum);
  st.d2[1] = -2.0 / (hm * hp);
  st.d2[2] = 2.0 / (hp * sum);
  return st;
}

Coeffs coefficients(const DomainGrid& g, const std::vector<double>& om, int i, int j, double eps,
                    double cut) {
  const double r = g.radius(i, j);
  const RadialStencil st = radial_stencil(g, i, j);
  const double w = om[g.index(i, j)];
  if (!(w > 0.0)) throw CoefficientError("frozen coefficient field must be positive");
  const double wr = st.d1[0] * om[g.index(i - 1, j)] + st.d1[1] * w + st.d1[2] * om[g.index(i + 1, j)];
  Coeffs c;
  c.A = zeta(w - r * r, cut) + eps;
  c.B = (w + eps) / (r * r);
  c.C = (w + eps) / r + r * r * wr / w - 2.0 * r;
  return c;
}

}  // namespace

std::vector<PoleWeight> pole_weights(const DomainGrid& g) {
  struct P {
    int idx;
    double x, y;
  };
  std::vector<P> pts;
  const int n = g.nth();
  for (int j = 0; j < n; ++j) {
    const double r = g.radius(1, j), t = g.theta[j];
    pts.push_back({g.index(1, j), r * std::cos(t), r * std::sin(t)});
  }
  if (!g.periodic()) {
    // mirror image about the eta axis
    for (int j = 1; j < n - 1; ++j) {
      const double r = g.radius(1, j), t = 3.0 * kPi - g.theta[j];
      pts.push_back({g.index(1, j), r * std::cos(t), r * std::sin(t)});
    }
  }
  const int m = static_cast<int>(pts.size());
  Eigen::MatrixXd M(5, m);
  for (int k = 0; k < m; ++k) {
    const double x = pts[k].x, y = pts[k].y;
    M(0, k) = x;
    M(1, k) = y;
    M(2, k) = x * x;
    M(3, k) = y * y;
    M(4, k) = x * y;
  }
  Eigen::VectorXd rhs(5);
  rhs << 0, 0, 1, 1, 0;
  const Eigen::VectorXd lam = (M * M.transpose()).ldlt().solve(rhs);
  const Eigen::VectorXd w = M.transpose() * lam;
  std::vector<PoleWeight> out;
  for (int k = 0; k < m; ++k) out.push_back({pts[k].idx, w(k)});
  return out;
}

LinearSystem assemble_linear(const DomainGrid& g, const OperatorSpec& spec, const BoundaryData& bd) {
  if (!spec.omega) throw CoefficientError("operator spec has no coefficient field");
  const auto& om = *spec.omega;
  const int N = g.size();
  if (static_cast<int>(om.size()) != N) throw CoefficientError("coefficient field size mismatch");
  const double eps = spec.epsilon;
  const double cut = spec.cutoff_eps > 0 ? spec.cutoff_eps : std::max(eps, 1e-300);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(N) * 16);
  LinearSystem sys;
  sys.b = Eigen::VectorXd::Zero(N);
  auto src = [&](int row) { return bd.source ? (*bd.source)[row] : 0.0; };

  // pole row: (omega+eps) * Laplacian = f
  {
    const double w0 = om[0];
    if (!(w0 > 0.0)) throw CoefficientError("frozen coefficient field must be positive");
    const double a = 2.0 * (w0 + eps);
    double tot = 0.0;
    for (const auto& pw : pole_weights(g)) {
      trip.emplace_back(0, pw.index, a * pw.w);
      tot += pw.w;
    }
    trip.emplace_back(0, 0, -a * tot);
    sys.b(0) = src(0);
  }

  std::vector<int> shock_row(g.nth(), -1);
  if (bd.shock)
    for (std::size_t k = 0; k < bd.shock->nodes.size(); ++k) shock_row[bd.shock->nodes[k].j] = k;

  std::vector<Entry> th;
  for (int j = 0; j < g.nth(); ++j) {
    for (int i = 1; i <= g.Ns; ++i) {
      const int row = g.index(i, j);
      const NodeTag tag = g.tag(i, j);
      if (tag == NodeTag::Sonic || tag == NodeTag::Shock) {
        if (bd.dirichlet) {
          trip.emplace_back(row, row, 1.0);
          sys.b(row) = (*bd.dirichlet)[row];
          continue;
        }
        if (tag == NodeTag::Sonic) {
          trip.emplace_back(row, row, 1.0);
          sys.b(row) = bd.sonic_value;
          continue;
        }
        if (!bd.shock || shock_row[j] < 0) throw CoefficientError("shock node without boundary data");
        const ShockBCNode& n = bd.shock->nodes[shock_row[j]];
        if (n.is_P2) {
          trip.emplace_back(row, row, 1.0);
          sys.b(row) = bd.shock->p_hat;
          continue;
        }
        // orient*(mu/R P_s + beta2 P_theta) = 0, one-sided in s, upwind in theta
        const double a = std::max(n.orient * n.mu, 0.0) / (g.Rb[j] * g.hs(i));
        const int ju = j + n.upwind;
        const double h = std::abs(g.theta[ju] - g.theta[j]);
        const double c = std::max(std::abs(n.beta2), 1e-12) / h;
        trip.emplace_back(row, row, a + c);
        if (a != 0.0) trip.emplace_back(row, g.index(i - 1, j), -a);
        trip.emplace_back(row, g.index(i, ju), -c);
        continue;
      }
      const Coeffs k = coefficients(g, om, i, j, eps, cut);
      const RadialStencil st = radial_stencil(g, i, j);
      // centred, with the least added diffusion keeping the off-diagonals non-negative;
      // continuous in (A, C) so Picard iterates do not toggle between stencils
      const double A = std::max({k.A, 0.5 * k.C * st.hp, -0.5 * k.C * st.hm});
      if (A > k.A) ++sys.upwinded_rows;
      const double cm = A * st.d2[0] + k.C * st.d1[0];
      const double c0 = A * st.d2[1] + k.C * st.d1[1];
      const double cp = A * st.d2[2] + k.C * st.d1[2];
      th.clear();
      double dth = 0.0;
      theta_stencil(g, i, j, th, dth);
      trip.emplace_back(row, g.index(i + 1, j), cp);
      trip.emplace_back(row, g.index(i - 1, j), cm);
      for (const auto& e : th) trip.emplace_back(row, e.col, k.B * e.w);
      trip.emplace_back(row, row, c0 + k.B * dth);
      sys.b(row) = src(row);
    }
  }
  sys.A.resize(N, N);
  sys.A.setFromTriplets(trip.begin(), trip.end());
  sys.A.makeCompressed();
  return sys;
}

namespace {

double rel_residual(const LinearSystem& s, const Eigen::VectorXd& x) {
  const double nb = s.b.norm();
  const double nr = (s.b - s.A * x).norm();
  return nb > 0 ? nr / nb : nr;
}

bool sor(const LinearSystem& s, Eigen::VectorXd& x, double tol, int max_iter, double omega,
         std::vector<double>& hist) {
  const auto& A = s.A;
  for (int it = 0; it < max_iter; ++it) {
    for (int row = 0; row < A.outerSize(); ++row) {
      double diag = 0.0, sum = s.b(row);
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator e(A, row); e; ++e) {
        if (e.col() == row) diag = e.value();
        else sum -= e.value() * x(e.col());
      }
      if (diag == 0.0) return false;
      x(row) = (1.0 - omega) * x(row) + omega * sum / diag;
    }
    if (it % 10 == 9) {
      hist.push_back(rel_residual(s, x));
      if (hist.back() <= tol) return true;
      if (!std::isfinite(hist.back())) return false;
    }
  }
  return false;
}

}  // namespace

namespace {

using Ilut = Eigen::IncompleteLUT<double>;

// preconditioner adaptor around a factorization owned elsewhere
struct SharedIlut {
  const Ilut* f = nullptr;
  SharedIlut() = default;
  template <class M>
  explicit SharedIlut(const M&) {}
  template <class M>
  SharedIlut& analyzePattern(const M&) { return *this; }
  template <class M>
  SharedIlut& factorize(const M&) { return *this; }
  template <class M>
  SharedIlut& compute(const M&) { return *this; }
  template <class V>
  Eigen::VectorXd solve(const V& b) const { return f->solve(b); }
  Eigen::ComputationInfo info() const { return Eigen::Success; }
};

constexpr int kReuseIterations = 40;

}  // namespace

struct LinearSolverCache::Impl {
  Ilut ilut;
  Eigen::Index n = -1;
};

std::vector<double> solve_linear(const LinearSystem& raw, double tol, int max_iter,
                                 const std::vector<double>* guess, LinearSolveInfo* info,
                                 LinearSolverCache* cache) {
  const int N = static_cast<int>(raw.b.size());
  // unit diagonal rows, so the residual is measured in units of p
  LinearSystem sys = raw;
  for (int row = 0; row < N; ++row) {
    double d = 0.0;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator e(sys.A, row); e; ++e)
      if (e.col() == row) d = e.value();
    if (d == 0.0) throw LinearSolveError("zero diagonal in linear system", {});
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator e(sys.A, row); e; ++e)
      e.valueRef() /= d;
    sys.b(row) /= d;
  }
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(N);
  if (guess) x0 = Eigen::Map<const Eigen::VectorXd>(guess->data(), N);
  std::vector<double> hist;
  LinearSolveInfo local;
  const Eigen::SparseMatrix<double> Ac = sys.A;
  LinearSolverCache scratch;
  LinearSolverCache& c = cache ? *cache : scratch;
  const bool reuse = c.impl && c.impl->n == N;
  for (int attempt = reuse ? 0 : 1; attempt < 2; ++attempt) {
    if (attempt == 1) {
      c.impl = std::make_shared<LinearSolverCache::Impl>();
      c.impl->ilut.setDroptol(1e-5);
      c.impl->ilut.setFillfactor(20);
      c.impl->ilut.compute(Ac);
      c.impl->n = N;
      ++c.refactorizations;
      if (c.impl->ilut.info() != Eigen::Success) {
        c.impl.reset();
        break;
      }
    }
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, SharedIlut> solver;
    solver.preconditioner().f = &c.impl->ilut;
    solver.setTolerance(tol);
    solver.setMaxIterations(attempt == 0 ? kReuseIterations : max_iter);
    solver.compute(Ac);
    Eigen::VectorXd x = solver.solveWithGuess(sys.b, x0);
    const double rr = rel_residual(sys, x);
    hist.push_back(rr);
    if (x.allFinite() && rr <= tol * 10.0) {
      local.iterations = static_cast<int>(solver.iterations());
      local.relative_residual = rr;
      if (info) *info = local;
      return {x.data(), x.data() + N};
    }
  }
  Eigen::VectorXd x = x0;
  local.used_fallback = true;
  const bool ok = sor(sys, x, tol, std::max(max_iter, 20000), 1.3, hist);
  if (!ok) throw LinearSolveError("linear solve did not converge", hist);
  local.relative_residual = hist.empty() ? rel_residual(sys, x) : hist.back();
  if (info) *info = local;
  return {x.data(), x.data() + N};
}

namespace {

template <class F>
void for_interior(const DomainGrid& g, F&& f) {
  for (int j = 0; j < g.nth(); ++j)
    for (int i = 1; i < g.Ns; ++i) {
      const NodeTag t = g.tag(i, j);
      if (t == NodeTag::Interior || t == NodeTag::SymmetryAxis) f(i, j);
    }
}

struct Derivs {
  double prr, pr, ptt;
};

Derivs derivs(const DomainGrid& g, const std::vector<double>& p, int i, int j) {
  const RadialStencil st = radial_stencil(g, i, j);
  const double pp = p[g.index(i + 1, j)], pm = p[g.index(i - 1, j)], pc = p[g.index(i, j)];
  std::vector<Entry> th;
  double d = 0.0;
  theta_stencil(g, i, j, th, d);
  double ptt = d * pc;
  for (const auto& e : th) ptt += e.w * p[e.col];
  return {st.d2[0] * pm + st.d2[1] * pc + st.d2[2] * pp, st.d1[0] * pm + st.d1[1] * pc + st.d1[2] * pp,
          ptt};
}

}  // namespace

std::vector<double> nonlinear_residual(const DomainGrid& g, const std::vector<double>& p,
                                       double eps) {
  std::vector<double> res(g.size(), 0.0);
  const double cut = std::max(eps, 1e-300);
  for_interior(g, [&](int i, int j) {
    const double r = g.radius(i, j);
    const double w = p[g.index(i, j)];
    const Derivs d = derivs(g, p, i, j);
    res[g.index(i, j)] = (zeta(w - r * r, cut) + eps) * d.prr + (w + eps) / (r * r) * d.ptt +
                         (w + eps) / r * d.pr + (r * d.pr) * (r * d.pr) / w - 2 * r * d.pr;
  });
  return res;
}

std::vector<double> linear_operator_apply(const DomainGrid& g, const std::vector<double>& om,
                                          const std::vector<double>& p, double eps) {
  std::vector<double> res(g.size(), 0.0);
  const double cut = std::max(eps, 1e-300);
  for_interior(g, [&](int i, int j) {
    const Coeffs k = coefficients(g, om, i, j, eps, cut);
    const Derivs d = derivs(g, p, i, j);
    res[g.index(i, j)] = k.A * d.prr + k.B * d.ptt + k.C * d.pr;
  });
  return res;
}

}  // namespace pgs
