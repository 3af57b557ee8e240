#include "pgs/solver_driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

namespace pgs {

std::vector<double> geometric_schedule(double from, double to, double ratio) {
  std::vector<double> out;
  if (!(from > 0) || !(to > 0) || !(ratio > 0 && ratio < 1)) return out;
  for (double e = from; e >= to * (1.0 - 1e-9); e *= ratio) out.push_back(e);
  if (!out.empty() && std::abs(out.back() - to) <= 1e-9 * to) out.back() = to;
  else out.push_back(to);
  return out;
}

void SolverConfig::validate() const {
  if (Ns < 4) throw ConfigError("Ns >= 4 required");
  if (Ntheta < 8 || Ntheta % 4 != 0) throw ConfigError("Ntheta must be a multiple of 4 and >= 8");
  if (eps_schedule.empty()) throw ConfigError("eps_schedule must not be empty");
  for (std::size_t k = 0; k < eps_schedule.size(); ++k) {
    if (!(eps_schedule[k] > 0)) throw ConfigError("eps_schedule entries must be positive");
    if (k && !(eps_schedule[k] < eps_schedule[k - 1]))
      throw ConfigError("eps_schedule must be strictly decreasing");
  }
  if (!(shock_damping > 0 && shock_damping <= 1)) throw ConfigError("lambda in (0, 1] required");
  if (!(picard_damping > 0 && picard_damping <= 1))
    throw ConfigError("picard_damping in (0, 1] required");
  if (!(outer_tol > 0) || !(picard_tol > 0) || !(linear_tol > 0))
    throw ConfigError("tolerances must be positive");
  if (!(radial_stretch >= 0 && radial_stretch <= 6)) throw ConfigError("radial_stretch in [0, 6] required");
  if (!(ellipticity_probe_distance > 0 && ellipticity_probe_distance < 1))
    throw ConfigError("ellipticity_probe_distance in (0, 1) required");
  if (outer_max < 1 || picard_max < 1 || linear_max_iter < 1 || phat_max < 1)
    throw ConfigError("iteration limits must be positive");
}

namespace {

void log(const SolverConfig& cfg, const char* fmt, auto... args) {
  if (!cfg.verbose) return;
  std::fprintf(stderr, fmt, args...);
  std::fputc('\n', stderr);
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace

FixedBoundaryResult solve_fixed_boundary(const DomainGrid& g, const WaveFan& fan, double p_hat,
                                         double eps, const SolverConfig& cfg,
                                         const std::vector<double>& init) {
  return solve_fixed_boundary(g, fan, p_hat, eps, cfg, init, cfg.picard_tol);
}

FixedBoundaryResult solve_fixed_boundary(const DomainGrid& g, const WaveFan& fan, double p_hat,
                                         double eps, const SolverConfig& cfg,
                                         const std::vector<double>& init, double tol,
                                         LinearSolverCache* cache) {
  const double p1 = fan.cfg.p1, p2 = fan.cfg.p2;
  std::vector<double> p = init;
  const ShockBC freeze = make_shock_bc(g, p, p2, p_hat);
  double damp = cfg.picard_damping;
  double prev = std::numeric_limits<double>::infinity();
  int growing = 0;
  FixedBoundaryResult res;
  for (int it = 1; it <= cfg.picard_max; ++it) {
    const ShockBC bc = make_shock_bc(g, p, p2, p_hat, &freeze);
    OperatorSpec spec;
    spec.epsilon = eps;
    spec.cutoff_eps = eps;
    spec.omega = &p;
    BoundaryData bd;
    bd.sonic_value = p1;
    bd.shock = &bc;
    const LinearSystem sys = assemble_linear(g, spec, bd);
    LinearSolveInfo info;
    std::vector<double> pn = solve_linear(sys, cfg.linear_tol, cfg.linear_max_iter, &p, &info, cache);
    res.linear_residual = info.relative_residual;
    const double change = max_abs_diff(pn, p);
    res.picard_iterations = it;
    res.last_change = change;
    if (!std::isfinite(change)) throw SolverError("Picard iteration produced non-finite values");
    if (change <= tol) {
      p = std::move(pn);
      break;
    }
    if (change > prev) {
      if (++growing >= 5) throw SolverError("Picard iteration diverged");
      damp = std::max(0.5 * damp, 0.05);
    } else {
      growing = 0;
    }
    prev = change;
    // keep the coefficient field positive
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double v = (1.0 - damp) * p[k] + damp * pn[k];
      p[k] = std::max(v, 0.5 * p[k]);
    }
    if (it == cfg.picard_max)
      throw SolverError("Picard iteration did not converge within picard_max");
  }
  // p2 < p <= p1: the shock rows carry p2 as their data, the sonic arc p1
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!(p[k] > p2) || p[k] > p1 + 1e-8) {
      char msg[160];
      std::snprintf(msg, sizeof msg, "maximum principle violated: p = %.12g at unknown %zu", p[k], k);
      throw SolverError(msg);
    }
  }
  res.field.values = std::move(p);
  return res;
}

FreeBoundaryState initial_state(const WaveFan& fan, const SolverConfig& cfg) {
  FreeBoundaryState st;
  DomainGrid probe = build_grid(fan, initial_shock(fan, {fan.theta3, kTheta2, fan.theta1}),
                                cfg.Ns, cfg.Ntheta, cfg.symmetry_mode, cfg.radial_stretch);
  st.shock = initial_shock(fan, shock_thetas(probe));
  st.grid = build_grid(fan, st.shock, cfg.Ns, cfg.Ntheta, cfg.symmetry_mode, cfg.radial_stretch);
  st.p_hat = fan.cfg.p1;
  st.field.values.assign(st.grid.size(), fan.cfg.p1);
  st.defect = fan.cfg.alpha1;
  return st;
}

std::vector<double> resample_field(const DomainGrid& from, const std::vector<double>& p,
                                   const DomainGrid& to) {
  if (from.nth() != to.nth() || from.Ns != to.Ns)
    throw std::invalid_argument("resample_field: grids differ in resolution");
  std::vector<double> out(to.size());
  out[0] = p[0];
  const int Ns = to.Ns;
  for (int j = 0; j < to.nth(); ++j) {
    for (int i = 1; i <= Ns; ++i) {
      const double sq = std::min(to.radius(i, j) / from.Rb[j], 1.0);
      int k = static_cast<int>(std::upper_bound(from.s.begin(), from.s.end(), sq) - from.s.begin()) - 1;
      k = std::clamp(k, 0, Ns - 1);
      const double a = (sq - from.s[k]) / from.hs(k + 1);
      out[to.index(i, j)] = (1.0 - a) * p[from.index(k, j)] + a * p[from.index(k + 1, j)];
    }
  }
  return out;
}

namespace {

void record(ConvergenceTrace* trace, int stage, double eps, const FreeBoundaryState& st,
            const FixedBoundaryResult& fb, double p2) {
  if (!trace) return;
  TraceRecord t;
  t.stage = stage;
  t.epsilon = eps;
  t.outer = st.outer_iterations;
  t.p_hat = st.p_hat;
  t.shock_change = st.last_change;
  t.picard_iterations = fb.picard_iterations;
  t.linear_residual = fb.linear_residual;
  t.branch_mismatch = st.branch_mismatch;
  t.defect = st.defect;
  t.frozen = st.frozen;
  const auto& v = st.field.values;
  t.p_min = *std::min_element(v.begin(), v.end());
  t.p_max = *std::max_element(v.begin(), v.end());
  const DomainGrid& g = st.grid;
  t.shock_gap_min = std::numeric_limits<double>::infinity();
  t.ellipticity_min = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.nth(); ++j) {
    if (g.tag(g.Ns, j) == NodeTag::Shock)
      t.shock_gap_min = std::min(t.shock_gap_min, v[g.index(g.Ns, j)] - p2);
    for (int i = 1; i < g.Ns; ++i) {
      const double r = g.radius(i, j);
      t.ellipticity_min = std::min(t.ellipticity_min, v[g.index(i, j)] - r * r);
    }
  }
  trace->records.push_back(t);
}

}  // namespace

FreeBoundaryState iterate_shape(const WaveFan& fan, double eps, const SolverConfig& cfg,
                                FreeBoundaryState st, ConvergenceTrace* trace, int stage,
                                double tol) {
  const double lam = cfg.shock_damping;
  for (int it = 1; it <= cfg.outer_max; ++it) {
    // inexact inner solve: no tighter than the current shape change
    const double ptol = std::clamp(st.last_change, cfg.picard_tol, 1e-4);
    const FixedBoundaryResult fb =
        solve_fixed_boundary(st.grid, fan, st.p_hat, eps, cfg, st.field.values, ptol, &st.cache);
    st.field = fb.field;
    const std::vector<double> tr = shock_trace(st.grid, st.field.values);
    const MapJResult J = map_J(st.shock, tr, fan, cfg.symmetry_mode);
    ShockCurve next = st.shock;
    double change = 0.0;
    for (std::size_t k = 0; k < next.size(); ++k) {
      const double rn = (1.0 - lam) * st.shock.r[k] + lam * J.curve.r[k];
      change = std::max(change, std::abs(rn - st.shock.r[k]));
      next.r[k] = rn;
      next.rprime[k] = (1.0 - lam) * st.shock.rprime[k] + lam * J.curve.rprime[k];
    }
    next.frozen_mask = J.curve.frozen_mask;
    DomainGrid ng = build_grid(fan, next, cfg.Ns, cfg.Ntheta, cfg.symmetry_mode, cfg.radial_stretch);
    st.field.values = resample_field(st.grid, st.field.values, ng);
    st.grid = std::move(ng);
    st.shock = std::move(next);
    st.defect = J.defect;
    st.tangent = J.tangent;
    st.frozen = J.frozen_count;
    st.branch_mismatch = J.branch_mismatch;
    st.last_change = change;
    ++st.outer_iterations;
    record(trace, stage, eps, st, fb, fan.cfg.p2);
    log(cfg, "  outer %d phat %.10f change %.3e defect %+.6e picard %d frozen %d", it, st.p_hat,
        change, st.defect, fb.picard_iterations, st.frozen);
    if (change <= tol) return st;
  }
  throw SolverError("shock iteration did not converge within outer_max");
}

FreeBoundaryState iterate_shape(const WaveFan& fan, double eps, const SolverConfig& cfg,
                                FreeBoundaryState st, ConvergenceTrace* trace, int stage) {
  return iterate_shape(fan, eps, cfg, std::move(st), trace, stage, cfg.outer_tol);
}

}  // namespace pgs

namespace pgs {

namespace {

FreeBoundaryState run_at(const WaveFan& fan, double eps, const SolverConfig& cfg,
                         FreeBoundaryState from, double p_hat, ConvergenceTrace* trace, int stage) {
  from.p_hat = p_hat;
  from.last_change = 1.0;
  return iterate_shape(fan, eps, cfg, std::move(from), trace, stage);
}

}  // namespace

FreeBoundaryState solve_free_boundary(const WaveFan& fan, double eps, const SolverConfig& cfg,
                                      FreeBoundaryState init, ConvergenceTrace* trace, int stage) {
  const double p1 = fan.cfg.p1, p2 = fan.cfg.p2;
  const double span = p1 - p2;
  int runs = 0;
  auto attempt = [&](const FreeBoundaryState& from, double ph) {
    if (++runs > cfg.phat_max) throw SolverError("P2 value search exceeded phat_max");
    log(cfg, " stage %d eps %.3e try phat %.10f", stage, eps, ph);
    return run_at(fan, eps, cfg, from, ph, trace, stage);
  };

  // hi: reaches tangency (arc or tangent at P2); lo: corner at P2
  std::optional<FreeBoundaryState> hi, lo, prev_lo;
  {
    FreeBoundaryState a = attempt(init, std::clamp(init.p_hat, p2 + 1e-9 * span, p1));
    (a.tangent ? hi : lo) = std::move(a);
  }
  double step = init.p_hat_step > 0 ? init.p_hat_step : 0.02 * span;
  while (!lo || !hi) {
    const FreeBoundaryState& from = hi ? *hi : *lo;
    double ph = hi ? from.p_hat - step : from.p_hat + step;
    ph = std::clamp(ph, p2 + 0.5 * (from.p_hat - p2) * (hi ? 1.0 : 0.0), p1);
    if (lo && from.p_hat >= p1) throw SolverError("no tangent shock up to p_hat = p1");
    try {
      FreeBoundaryState b = attempt(from, ph);
      if (b.tangent) hi = std::move(b);
      else lo = std::move(b);
      step = std::min(2.0 * step, 0.1 * span);
    } catch (const SolverError&) {
      step *= 0.25;
      if (step < cfg.phat_tol) throw;
    }
  }

  bool secant_ok = false;
  while (hi->p_hat - lo->p_hat > cfg.phat_tol) {
    const double a = lo->p_hat, b = hi->p_hat, w = b - a;
    double x = 0.5 * (a + b);
    if (secant_ok && prev_lo && lo->defect < 0 && prev_lo->defect < lo->defect) {
      // the corner defect vanishes like sqrt(edge - p_hat): secant on its square
      const double ya = lo->defect * lo->defect, yp = prev_lo->defect * prev_lo->defect;
      x = std::clamp(a + (a - prev_lo->p_hat) * ya / (yp - ya), a + 0.02 * w, b - 0.02 * w);
    }
    const FreeBoundaryState& from = (x - a < b - x) ? *lo : *hi;
    FreeBoundaryState s;
    try {
      s = attempt(from, x);
    } catch (const SolverError&) {
      // one more try from the other end of the bracket
      s = attempt((&from == &*lo) ? *hi : *lo, x);
    }
    if (s.tangent) {
      hi = std::move(s);
      secant_ok = false;
    } else {
      prev_lo = std::move(lo);
      lo = std::move(s);
      secant_ok = true;
    }
  }
  log(cfg, " stage %d eps %.3e phat %.10f defect %+.3e runs %d", stage, eps, hi->p_hat, hi->defect,
      runs);
  return std::move(*hi);
}

double ellipticity_margin(const DomainGrid& g, const std::vector<double>& p, double d) {
  double m = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.nth(); ++j)
    for (int i = 1; i < g.Ns; ++i) {
      const double r = g.radius(i, j);
      if (g.r1 - r >= d * g.r1) m = std::min(m, p[g.index(i, j)] - r * r);
    }
  return m;
}

Solution continuation_solve(const WaveFan& fan, const SolverConfig& cfg) {
  cfg.validate();
  Solution sol;
  sol.fan = fan;
  sol.cfg = cfg;
  FreeBoundaryState st = initial_state(fan, cfg);
  int outer_before = 0;
  for (std::size_t k = 0; k < cfg.eps_schedule.size(); ++k) {
    const double eps = cfg.eps_schedule[k];
    try {
      st = solve_free_boundary(fan, eps, cfg, std::move(st), &sol.trace, static_cast<int>(k));
    } catch (const SolverError& e) {
      throw SolverError(std::string(e.what()) + " (stage eps = " + std::to_string(eps) + ")",
                        sol.trace);
    }
    st.p_hat_step = sol.trace.stages.empty()
                        ? 1e-3 * (fan.cfg.p1 - fan.cfg.p2)
                        : std::abs(st.p_hat - sol.trace.stages.back().p_hat);
    st.p_hat_step = std::max(4.0 * st.p_hat_step, 10.0 * cfg.phat_tol);
    StageSummary sum;
    sum.epsilon = eps;
    sum.p_hat = st.p_hat;
    sum.outer_iterations = st.outer_iterations - outer_before;
    outer_before = st.outer_iterations;
    sum.ellipticity_margin =
        ellipticity_margin(st.grid, st.field.values, cfg.ellipticity_probe_distance);
    sum.change_from_previous = std::numeric_limits<double>::quiet_NaN();
    if (!sol.trace.stages.empty()) {
      const auto& prev = sol.trace.stages.back().shock_r;
      sum.change_from_previous = 0.0;
      for (std::size_t q = 0; q < prev.size() && q < st.shock.r.size(); ++q)
        sum.change_from_previous = std::max(sum.change_from_previous, std::abs(st.shock.r[q] - prev[q]));
    }
    sum.final_change = st.last_change;
    sum.defect = st.defect;
    sum.frozen = st.frozen;
    sum.shock_r = st.shock.r;
    sol.trace.stages.push_back(std::move(sum));
  }
  sol.state = std::move(st);
  return sol;
}

}  // namespace pgs
