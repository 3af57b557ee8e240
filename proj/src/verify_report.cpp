#include "pgs/verify_report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "pgs/shock_front.hpp"

namespace pgs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double nearest_ray(const RayField& f, double theta, const WaveFan& fan, int* out) {
  const double t = unwrap_angle(fan, theta);
  int best = 0;
  double bd = kInf;
  for (int k = 0; k < f.rays(); ++k) {
    const double d = std::abs(f.theta[k] - t);
    if (d < bd) {
      bd = d;
      best = k;
    }
  }
  *out = best;
  return bd;
}

// phi = p1 - p against x = r1 - r on sonic ray k, nearest the boundary first
void ray_profile(const CompositeSolution& sol, int k, std::vector<double>& x,
                 std::vector<double>& phi) {
  const RayField& f = sol.field;
  const double r1 = sol.fan.r1, p1 = sol.fan.cfg.p1;
  x.clear();
  phi.clear();
  for (int i = f.Ns - 1; i >= 1; --i) {
    x.push_back(r1 - f.radius(k, i));
    phi.push_back(p1 - f.p[f.at(k, i)]);
  }
}

// shock angle at radius r on one branch (r monotone there)
double shock_angle_at(const ShockCurve& c, double r, bool right_branch) {
  double a = right_branch ? kTheta2 : c.theta3();
  double b = right_branch ? c.theta1() : kTheta2;
  auto rad = [&](double t) { return interp_shock(c, t).first; };
  // r increases with theta on the right branch and decreases on the left
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    const bool above = rad(m) > r;
    if (above == right_branch) b = m;
    else a = m;
  }
  return 0.5 * (a + b);
}

}  // namespace

double Check::value(const std::string& key) const {
  for (const auto& [k, v] : values)
    if (k == key) return v;
  throw std::out_of_range("check " + name + " has no value " + key);
}

bool PropertyReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check& c) { return c.pass || c.inconclusive; });
}

const Check* PropertyReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

double extrapolate_slope(const std::vector<double>& x, const std::vector<double>& phi, int n) {
  n = std::min<int>(n, static_cast<int>(x.size()));
  double s2 = 0, s3 = 0, s4 = 0, b1 = 0, b2 = 0;
  for (int m = 0; m < n; ++m) {
    const double xx = x[m];
    s2 += xx * xx;
    s3 += xx * xx * xx;
    s4 += xx * xx * xx * xx;
    b1 += xx * phi[m];
    b2 += xx * xx * phi[m];
  }
  const double det = s2 * s4 - s3 * s3;
  if (n < 2 || det == 0.0) return n >= 1 && s2 > 0 ? b1 / s2 : std::nan("");
  return (b1 * s4 - b2 * s3) / det;
}

double distance_to_sonic(const WaveFan& fan, double r, double theta) {
  const double t = unwrap_angle(fan, theta);
  if (t >= fan.theta1 && t <= fan.theta3 + kTwoPi) return std::abs(fan.r1 - r);
  const Vec2 X{r * std::cos(t), r * std::sin(t)};
  const Anchors a = sonic_anchors(fan);
  return std::min(std::hypot(X.x - a.P1.x, X.y - a.P1.y), std::hypot(X.x - a.P3.x, X.y - a.P3.y));
}

Check check_bounds(const CompositeSolution& sol, const VerifyOptions& o) {
  const auto& p = sol.field.p;
  const double lo = *std::min_element(p.begin(), p.end());
  const double hi = *std::max_element(p.begin(), p.end());
  Check c;
  c.name = "pressure_bounds";
  c.values = {{"p_min", lo}, {"p_max", hi}, {"p1", sol.fan.cfg.p1}, {"p2", sol.fan.cfg.p2}};
  c.criterion = "p2 < p_min and p_max <= p1 + tol";
  c.tolerance = o.bound_slack;
  c.pass = lo > sol.fan.cfg.p2 && hi <= sol.fan.cfg.p1 + o.bound_slack;
  return c;
}

Check check_shock_gap(const CompositeSolution& sol, const VerifyOptions&) {
  const RayField& f = sol.field;
  double gap_p = kInf;
  for (int k = 0; k < f.rays(); ++k)
    if (f.on_shock[k]) gap_p = std::min(gap_p, f.p[f.at(k, f.Ns)] - sol.fan.cfg.p2);
  double gap_r = kInf;
  for (double r : sol.shock.r) gap_r = std::min(gap_r, r - sol.fan.r2);
  Check c;
  c.name = "shock_gap";
  c.values = {{"delta_meas", gap_p}, {"sonic_gap", gap_r}};
  c.criterion = "min over shock of (p - p2) > 0 and min of (r - r2) > 0";
  c.pass = gap_p > 0 && gap_r > 0;
  return c;
}

Check check_convexity(const CompositeSolution& sol, const VerifyOptions& o) {
  const ShockCurve& s = sol.shock;
  const std::size_t n = s.size();
  std::vector<double> xi(n), eta(n);
  for (std::size_t k = 0; k < n; ++k) {
    xi[k] = s.r[k] * std::cos(s.thetas[k]);
    eta[k] = s.r[k] * std::sin(s.thetas[k]);
  }
  Check c;
  c.name = "convexity";
  c.tolerance = o.convexity_slack * sol.fan.r1;
  c.criterion = "eta'' >= -tol everywhere and min over interior probes > 0";
  for (std::size_t k = 1; k < n; ++k) {
    if (!(xi[k] > xi[k - 1])) {
      c.note = "shock is not a graph over xi";
      c.values = {{"convexity_min", std::nan("")}};
      return c;
    }
  }
  const double x0 = xi.front(), x1 = xi.back();
  const double margin = 0.5 * (1.0 - o.interior_fraction) * (x1 - x0);
  double all_min = kInf, int_min = kInf, slope_err = 0.0;
  const RayField& f = sol.field;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double hl = xi[k] - xi[k - 1], hr = xi[k + 1] - xi[k];
    const double dl = (eta[k] - eta[k - 1]) / hl, dr = (eta[k + 1] - eta[k]) / hr;
    const double second = 2.0 * (dr - dl) / (hl + hr);
    all_min = std::min(all_min, second);
    if (xi[k] > x0 + margin && xi[k] < x1 - margin) int_min = std::min(int_min, second);
    // analytic slope with the solved pbar, branch closest to the curve
    const double fd = (hl * dr + hr * dl) / (hl + hr);
    const double p = interpolate_rays(f, f.p, s.r[k], s.thetas[k]);
    const double pb = 0.5 * (p + sol.fan.cfg.p2);
    const double X = xi[k], Y = eta[k];
    const double w = std::max(X * X + Y * Y - pb, 0.0);
    const double den = X * X - pb;
    if (std::abs(den) > 1e-3) {
      const double a = (X * Y + std::sqrt(pb * w)) / den, b = (X * Y - std::sqrt(pb * w)) / den;
      slope_err = std::max(slope_err, std::min(std::abs(a - fd), std::abs(b - fd)));
    }
  }
  c.values = {{"convexity_min", all_min}, {"convexity_interior_min", int_min},
              {"slope_formula_mismatch", slope_err}};
  c.pass = all_min >= -c.tolerance && int_min > 0;
  return c;
}

std::pair<Check, Check> check_sonic_regularity(const CompositeSolution& sol,
                                               const VerifyOptions& o) {
  const RayField& f = sol.field;
  const double r1 = sol.fan.r1;
  const double xmax = o.sonic_band * r1;
  double phi_min = kInf, excess = -kInf, kfit = kInf;
  std::vector<double> x, phi;
  for (int k = 0; k < f.rays(); ++k) {
    if (f.on_shock[k]) continue;
    ray_profile(sol, k, x, phi);
    for (std::size_t m = 0; m < x.size() && x[m] <= xmax; ++m) {
      phi_min = std::min(phi_min, phi[m]);
      excess = std::max(excess, phi[m] - 2.0 * r1 * x[m]);
      kfit = std::min(kfit, (2.0 * r1 * x[m] - phi[m]) / x[m]);
    }
  }
  Check b;
  b.name = "sonic_phi_bounds";
  b.values = {{"phi_min", phi_min}, {"phi_minus_2r1x_max", excess}, {"lipschitz_k", kfit},
              {"x_probe", xmax}};
  b.criterion = "0 <= phi <= 2 r1 x for x in (0, x_probe] on sonic rays, slack tol";
  b.tolerance = o.phi_slack;
  b.pass = phi_min >= -o.phi_slack && excess <= o.phi_slack;

  Check s;
  s.name = "sonic_phi_x";
  int k = 0;
  const double mid = 0.5 * (sol.fan.theta1 + sol.fan.theta3 + kTwoPi);
  nearest_ray(f, mid, sol.fan, &k);
  ray_profile(sol, k, x, phi);
  const double slope = extrapolate_slope(x, phi, o.fit_points);
  // one-sided slopes across the sonic circle: 0 outside, phi_x inside
  const double inner = x.empty() ? std::nan("") : phi[0] / x[0];
  s.values = {{"phi_x_sonic", slope}, {"r1", r1}, {"theta_station", f.theta[k]},
              {"slope_outside", 0.0}, {"slope_first_cell", inner}};
  s.criterion = "|phi_x(0) - r1| <= tol * r1 at the mid-arc station";
  s.tolerance = o.phi_x_band;
  s.pass = std::abs(slope - r1) <= o.phi_x_band * r1;
  return {b, s};
}

Check check_corner_disparity(const CompositeSolution& sol, const VerifyOptions& o) {
  const RayField& f = sol.field;
  const WaveFan& fan = sol.fan;
  const double r1 = fan.r1, h = r1 * (f.s[f.Ns] - f.s[f.Ns - 1]);  // boundary cell
  Check c;
  c.name = "corner_disparity";
  c.tolerance = o.corner_min * r1;
  c.criterion = "|phi_x(sonic family) - phi_x(shock family)| >= tol at P1 and P3";
  bool ok = true, inconclusive = false;
  std::vector<double> x, phi;
  for (int corner = 0; corner < 2; ++corner) {
    const bool P1 = corner == 0;
    const std::string tag = P1 ? "P1" : "P3";
    // family (i): sonic ray two steps into the arc from the corner
    int kc = 0;
    nearest_ray(f, P1 ? fan.theta1 : fan.theta3 + kTwoPi, fan, &kc);
    const int step = P1 ? 1 : -1;
    int ks = kc;
    for (int m = 0, moved = 0; m < f.rays() && moved < 2; ++m) {
      ks = (ks + step + f.rays()) % f.rays();
      if (!f.on_shock[ks]) ++moved;
    }
    ray_profile(sol, ks, x, phi);
    const double fam_i = extrapolate_slope(x, phi, o.fit_points);

    // family (ii): inset from the shock by half the corner slope, as in g = f + omega x / 2
    const double rp_end = std::abs(P1 ? sol.shock.rprime.back() : sol.shock.rprime.front());
    double rp = rp_end;
    if (!(rp > 1e-12)) rp = std::abs(interp_shock(sol.shock, P1 ? fan.theta1 - 1e-3 : fan.theta3 + 1e-3).second);
    const double omega = 1.0 / rp;
    std::vector<double> xs, ds;
    for (int m = 2; m < 2 + 2 * o.fit_points; ++m) {
      const double xx = m * h, r = r1 - xx;
      const double ts = shock_angle_at(sol.shock, r, P1);
      const double tg = ts + (P1 ? 1.0 : -1.0) * 0.5 * omega * xx;
      const double d = 0.5 * h;
      const double rs = interp_shock(sol.shock, std::clamp(tg, fan.theta3, fan.theta1)).first;
      if (tg > fan.theta3 && tg < fan.theta1 && r + d >= rs) continue;
      const double pp = interpolate_rays(f, f.p, r + d, tg), pm = interpolate_rays(f, f.p, r - d, tg);
      xs.push_back(xx);
      ds.push_back((pp - pm) / (2.0 * d));  // phi_x = p_r
    }
    double fam_ii = std::nan("");
    if (xs.size() >= 2) {
      // least-squares line through (x, phi_x), value at x = 0
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      const double n = static_cast<double>(xs.size());
      for (std::size_t q = 0; q < xs.size(); ++q) {
        sx += xs[q];
        sy += ds[q];
        sxx += xs[q] * xs[q];
        sxy += xs[q] * ds[q];
      }
      const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      fam_ii = (sy - slope * sx) / n;
    } else {
      inconclusive = true;
    }
    const double disp = std::abs(fam_i - fam_ii);
    c.values.push_back({tag + "_sonic_family", fam_i});
    c.values.push_back({tag + "_shock_family", fam_ii});
    c.values.push_back({tag + "_disparity", disp});
    ok = ok && disp >= c.tolerance;
  }
  c.inconclusive = inconclusive;
  if (inconclusive) c.note = "too few resolvable probes near a corner";
  c.pass = ok && !inconclusive;
  return c;
}

Check check_ellipticity(const CompositeSolution& sol, const VerifyOptions&) {
  const RayField& f = sol.field;
  double lam = kInf, margin = kInf;
  for (int k = 0; k < f.rays(); ++k) {
    for (int i = 1; i < f.Ns; ++i) {
      const double r = f.radius(k, i);
      const double e = f.p[f.at(k, i)] - r * r;
      margin = std::min(margin, e);
      const double d = distance_to_sonic(sol.fan, r, f.theta[k]);
      if (d > 0) lam = std::min(lam, e / d);
    }
  }
  Check c;
  c.name = "ellipticity";
  c.values = {{"lambda_meas", lam}, {"min_p_minus_r2", margin}};
  c.criterion = "largest lambda with p - r^2 >= lambda * dist(., sonic arc) is > 0";
  c.pass = lam > 0;
  return c;
}

PropertyReport verify_solution(const CompositeSolution& sol, const VerifyOptions& o) {
  PropertyReport rep;
  rep.checks.push_back(check_bounds(sol, o));
  rep.checks.push_back(check_shock_gap(sol, o));
  rep.checks.push_back(check_convexity(sol, o));
  auto [b, s] = check_sonic_regularity(sol, o);
  rep.checks.push_back(b);
  rep.checks.push_back(s);
  rep.checks.push_back(check_corner_disparity(sol, o));
  rep.checks.push_back(check_ellipticity(sol, o));
  return rep;
}

std::string report_json(const PropertyReport& rep, int indent) {
  nlohmann::ordered_json j;
  j["schema"] = "pgs-report/1";
  j["all_pass"] = rep.all_pass();
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : rep.checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["pass"] = c.pass;
    e["inconclusive"] = c.inconclusive;
    e["criterion"] = c.criterion;
    e["tolerance"] = c.tolerance;
    nlohmann::ordered_json v = nlohmann::ordered_json::object();
    for (const auto& [k, x] : c.values) v[k] = x;
    e["values"] = v;
    e["note"] = c.note;
    j["checks"].push_back(e);
  }
  return j.dump(indent);
}

PropertyReport report_from_json(const std::string& text) {
  const auto j = nlohmann::ordered_json::parse(text);
  PropertyReport rep;
  for (const auto& e : j.at("checks")) {
    Check c;
    c.name = e.at("name").get<std::string>();
    c.pass = e.at("pass").get<bool>();
    c.inconclusive = e.at("inconclusive").get<bool>();
    c.criterion = e.at("criterion").get<std::string>();
    c.tolerance = e.at("tolerance").get<double>();
    c.note = e.at("note").get<std::string>();
    for (const auto& [k, x] : e.at("values").items())
      c.values.push_back({k, x.is_null() ? std::nan("") : x.get<double>()});
    rep.checks.push_back(std::move(c));
  }
  return rep;
}

}  // namespace pgs
