// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "mms.hpp"
#include "pgs/cli_io.hpp"
#include "pgs/elliptic_core.hpp"
#include "pgs/shock_front.hpp"

using namespace pgs;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void line(const char* name, bool pass, const std::string& detail) {
  std::printf("%s %s %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

std::string fmt(const char* f, auto... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void frozen_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = 1000;
  const double a = 5.0 * kPi / 3.0;
  std::vector<double> nodes;
  for (int k = 0; k <= n; ++k) nodes.push_back(a + (kTheta2 - a) * k / n);
  const BranchResult b =
      integrate_branch([](double) { return 2.0; }, 1.0, Branch::Right, std::sqrt(2.0), nodes);
  const double secs = seconds_since(t0);
  const double end_err = std::abs(b.r.back() - std::sqrt(1.5));
  double curve_err = 0.0;
  for (std::size_t k = 0; k < b.r.size(); ++k)
    curve_err = std::max(curve_err,
                         std::abs(b.r[k] - std::sqrt(1.5) / std::cos(b.thetas[k] - kTheta2)));
  line("frozen_shock_oracle", end_err <= 1e-8 && curve_err <= 1e-6 && secs < 1.0,
       fmt("end_err=%.3e (<=1e-8) curve_err=%.3e (<=1e-6) seconds=%.3f (<1)", end_err, curve_err,
           secs));
}

void mms_convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  const double e64 = testing::mms_error(64).max_error;
  const double e128 = testing::mms_error(128).max_error;
  const double e256 = testing::mms_error(256).max_error;
  const double secs = seconds_since(t0);
  const double o1 = std::log2(e64 / e128), o2 = std::log2(e128 / e256);
  line("mms_convergence", o1 >= 1.8 && o2 >= 1.8 && secs < 120.0,
       fmt("err=%.3e,%.3e,%.3e orders=%.3f,%.3f (>=1.8) seconds=%.1f (<120)", e64, e128, e256, o1,
           o2, secs));
}

void algebraic_identities() {
  double rh = 0.0;
  for (double p1 : {1.5, 2.0, 3.0, 5.0})
    for (double a1 : {0.1, 0.5, 0.7853981633974483, 1.2})
      for (double a2 : {0.1, 0.7853981633974483, 1.4}) {
        RiemannConfig c;
        c.p1 = p1;
        c.alpha1 = a1;
        c.alpha2 = a2;
        const WaveFan f = build_wave_fan(c);
        rh = std::max({rh, rh_residual(f.state(1), f.state(2)), rh_residual(f.state(1), f.state(4))});
      }
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> P(1.0001, 4.0), R(0.5, 2.0), D(-3.0, 3.0);
  double beta = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const double p = P(rng), r = R(rng), rp = D(rng);
    const ObliqueCoeffs c = oblique_coeffs(p, r, rp, 1.0);
    beta = std::max(beta, std::abs(c.beta1 - rp * c.beta2 - c.mu));
  }
  double zlo = 1e300, zhi = -1e300;
  for (double eps : {1e-1, 1e-3, 1e-6})
    for (int k = 0; k <= 10000; ++k) {
      const double s = -2.0 * eps + 3.0 * eps * k / 10000.0;
      const double z = zeta_prime(s, eps);
      zlo = std::min(zlo, z);
      zhi = std::max(zhi, z);
    }
  line("algebraic_identities", rh < 1e-12 && beta < 1e-12 && zlo >= 0.0 && zhi <= 1.0,
       fmt("rh_max=%.3e (<1e-12) beta_identity_max=%.3e (<1e-12) zeta_slope=[%.3g,%.3g] (in [0,1])",
           rh, beta, zlo, zhi));
}

void default_run(const fs::path& dir) {
  RunConfig cfg;
  try {
    cfg = load_config(PGS_SOURCE_DIR "/config/default.json");
  } catch (const std::exception& e) {
    line("default_run", false, std::string("config: ") + e.what());
    return;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const SolveOutcome o = solve_to_dir(cfg, dir.string());
  const double secs = seconds_since(t0);
  const bool solved = o.exit_code == kExitOk || o.exit_code == kExitVerifyFailed;
  line("default_run_converges", solved && secs <= 900.0,
       fmt("exit=%d seconds=%.1f (<=900) p_hat=%.10g %s", o.exit_code, secs, o.manifest.p_hat,
           o.message.c_str()));
  if (!solved) return;
  for (const char* name : {"pressure_bounds", "shock_gap", "convexity", "sonic_phi_bounds",
                           "sonic_phi_x", "corner_disparity", "ellipticity"}) {
    const Check* c = o.report.find(name);
    if (!c) {
      line(name, false, "missing from report");
      continue;
    }
    std::string d;
    for (const auto& [k, v] : c->values) d += fmt("%s=%.6g ", k.c_str(), v);
    d += "rule: " + c->criterion;
    line(name, c->pass, d);
  }
  const double tail = o.manifest.eps_tail_change;
  const double tol = 10.0 * cfg.solver.outer_tol;
  line("eps_tail", std::isfinite(tail) && tail < tol,
       fmt("last_stage_change=%.3e (<%.1e)", tail, tol));
}

double near_critical_distance(double alpha1, double& secs) {
  RiemannConfig rc;
  rc.alpha1 = alpha1;
  const WaveFan fan = build_wave_fan(rc);
  SolverConfig sc;
  sc.Ns = 64;
  sc.Ntheta = 128;
  sc.radial_stretch = 3.0;
  const auto t0 = std::chrono::steady_clock::now();
  const Solution sol = continuation_solve(fan, sc);
  secs = seconds_since(t0);
  const double eta0 = -std::sqrt(fan.pbar0);
  double d = 0.0;
  const ShockCurve& s = sol.state.shock;
  for (std::size_t k = 0; k < s.size(); ++k) d = std::max(d, std::abs(s.point(k).y - eta0));
  return d / fan.r1;
}

void near_critical() {
  try {
    double t1 = 0, t2 = 0;
    const double d1 = near_critical_distance(0.05, t1);
    const double d2 = near_critical_distance(0.025, t2);
    line("near_critical", d1 < 0.05 && d2 < d1,
         fmt("dist/r1 alpha1=0.05: %.4e (<0.05) alpha1=0.025: %.4e (decreasing) seconds=%.1f,%.1f",
             d1, d2, t1, t2));
  } catch (const std::exception& e) {
    line("near_critical", false, e.what());
  }
}

void determinism(const fs::path& root) {
  const RunConfig cfg = parse_config(R"({
    "grid": {"Ns": 16, "Ntheta": 64, "radial_stretch": 2.0},
    "continuation": {"eps_schedule": [0.1, 0.01]}})");
  const fs::path a = root / "det_a", b = root / "det_b";
  solve_to_dir(cfg, a.string());
  solve_to_dir(cfg, b.string());
  bool same = true;
  int n = 0;
  for (const char* f : {"field.csv", "rays.csv", "shock.csv", "trace.csv", "stages.csv",
                        "report.json"}) {
    same = same && fs::exists(a / f) && sha256_hex(slurp(a / f)) == sha256_hex(slurp(b / f));
    ++n;
  }
  line("determinism", same, fmt("%d artifacts compared by SHA-256", n));
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "pgs_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  frozen_oracle();
  algebraic_identities();
  mms_convergence();
  determinism(root);
  near_critical();
  default_run(root / "default");
  std::printf("%s: %d failing\n", failures ? "ACCEPTANCE FAILED" : "ACCEPTANCE PASSED", failures);
  return failures ? 1 : 0;
}
