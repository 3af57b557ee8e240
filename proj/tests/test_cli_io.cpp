#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "coarse_run.hpp"
#include "pgs/cli_io.hpp"

using namespace pgs;
namespace fs = std::filesystem;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("pgs_test_" + name);
  fs::remove_all(d);
  return d;
}

const char* kTiny = R"({
  "grid": {"Ns": 8, "Ntheta": 32, "radial_stretch": 1.0},
  "continuation": {"eps_schedule": [0.1, 0.03]}
})";

}  // namespace

TEST_CASE("shortest round-trip doubles") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int k = 0; k < 10000; ++k) {
    const std::uint64_t b = bits(rng);
    double v;
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v)) continue;
    const double w = parse_double(format_double(v));
    CHECK(std::memcmp(&v, &w, sizeof v) == 0);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  CHECK(std::isnan(parse_double(format_double(std::numeric_limits<double>::quiet_NaN()))));
  CHECK(parse_double(format_double(-INFINITY)) == -INFINITY);
  CHECK_THROWS(parse_double("1.5x"));
}

TEST_CASE("config errors name the key") {
  CHECK(config_error(R"({"riemann": {"p1": 1.0, "p2": 1.5}})").find("p1 > p2 required") !=
        std::string::npos);
  CHECK(config_error(R"({"grid": {"Nx": 4}})").find("grid.Nx") != std::string::npos);
  CHECK(config_error(R"({"grid": {"Ns": "big"}})").find("grid.Ns") != std::string::npos);
  CHECK(config_error(R"({"solver": {"picard_tol": true}})").find("solver.picard_tol") !=
        std::string::npos);
  CHECK(config_error(R"({"oops": 1})").find("oops") != std::string::npos);
  CHECK(config_error(R"({"grid": {"symmetry": "quarter"}})").find("grid.symmetry") !=
        std::string::npos);
  CHECK(!config_error("{").empty());
  CHECK(config_error("{}").empty());
}

TEST_CASE("alpha1 = 0 routes to the critical path") {
  const RunConfig c = parse_config(R"({"riemann": {"alpha1": 0}})");
  CHECK(c.critical);
  CHECK(!parse_config("{}").critical);
}

TEST_CASE("config document round trip") {
  const RunConfig a = parse_config(kTiny);
  const RunConfig b = parse_config(config_json(a));
  CHECK(config_json(a) == config_json(b));
  CHECK(b.solver.Ns == 8);
  CHECK(b.solver.eps_schedule == std::vector<double>{0.1, 0.03});
}

TEST_CASE("default config file parses") {
  const RunConfig c = load_config(PGS_SOURCE_DIR "/config/default.json");
  CHECK(c.solver.Ns == 128);
  CHECK(c.solver.Ntheta == 256);
  CHECK(c.solver.eps_schedule.front() == 1e-1);
  CHECK(c.solver.eps_schedule.back() == 1e-6);
}

TEST_CASE("SHA-256 known answers") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("CSV tables round trip bitwise") {
  const auto& run = testing::coarse_run();
  const std::string shock = shock_csv(run.comp.shock);
  CHECK(shock.rfind("theta,r,rprime,xi,eta\n", 0) == 0);
  CHECK(shock_csv(parse_shock_csv(shock)) == shock);
  const std::string field = field_csv(run.comp), rays = rays_csv(run.comp.field);
  CHECK(field.rfind("xi,eta,r,theta,p,u,v,sector\n", 0) == 0);
  const auto& cfg = testing::coarse_config();
  const RayField back = parse_field_csv(field, rays, cfg.Ns, cfg.radial_stretch);
  CHECK(back.p == run.comp.field.p);
  CHECK(back.theta == run.comp.field.theta);
  CHECK(back.R == run.comp.field.R);
  CHECK(field_csv(make_composite(run.comp.fan, run.comp.shock, back)) == field);
}

TEST_CASE("solve, verify and sample through the command layer") {
  const fs::path dir = scratch("tiny");
  const RunConfig cfg = parse_config(kTiny);
  const SolveOutcome o = solve_to_dir(cfg, dir.string());
  REQUIRE((o.exit_code == kExitOk || o.exit_code == kExitVerifyFailed));
  for (const char* f : {"field.csv", "rays.csv", "shock.csv", "trace.csv", "stages.csv",
                        "report.json", "manifest.json"})
    CHECK(fs::exists(dir / f));
  const RunManifest m = parse_manifest(slurp(dir / "manifest.json"));
  CHECK(m.mode == "elliptic");
  for (const auto& a : m.artifacts) CHECK(sha256_hex(slurp(dir / a.path)) == a.sha256);

  std::ostringstream out, err;
  const int code = cmd_verify(dir.string(), out, err);
  CHECK(code == o.exit_code);
  CHECK(report_json(verify_run(load_run(dir.string()))) == slurp(dir / "report.json"));

  std::ostringstream s;
  CHECK(cmd_sample(dir.string(), 0.0, 5.0, s, err) == kExitOk);
  CHECK(s.str().size() > 2);
  CHECK(s.str().substr(s.str().size() - 3) == " 1\n");

  // tampering is detected
  { std::ofstream(dir / "shock.csv", std::ios::app) << "0,0,0,0,0\n"; }
  std::ostringstream out2, err2;
  CHECK(cmd_verify(dir.string(), out2, err2) == kExitMissingInput);
  fs::remove_all(dir);
}

TEST_CASE("identical solves give identical checksums") {
  const RunConfig cfg = parse_config(kTiny);
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  solve_to_dir(cfg, a.string());
  solve_to_dir(cfg, b.string());
  for (const char* f : {"field.csv", "rays.csv", "shock.csv", "trace.csv", "stages.csv",
                        "report.json"})
    CHECK(sha256_hex(slurp(a / f)) == sha256_hex(slurp(b / f)));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("critical configuration runs the analytic path") {
  const fs::path dir = scratch("crit");
  const RunConfig cfg = parse_config(R"({"riemann": {"alpha1": 0},
    "grid": {"Ns": 8, "Ntheta": 32}})");
  const SolveOutcome o = solve_to_dir(cfg, dir.string());
  CHECK(o.exit_code == kExitOk);
  CHECK(o.manifest.mode == "critical");
  const Check* rh = o.report.find("critical_rh");
  REQUIRE(rh);
  CHECK(rh->pass);
  fs::remove_all(dir);
}

TEST_CASE("missing inputs and bad configs map to exit codes") {
  std::ostringstream out, err;
  CHECK(cmd_verify("/nonexistent/run", out, err) == kExitMissingInput);
  const fs::path dir = scratch("badcfg");
  fs::create_directories(dir);
  { std::ofstream(dir / "c.json") << R"({"riemann": {"p1": 1, "p2": 2}})"; }
  CHECK(cmd_solve((dir / "c.json").string(), (dir / "out").string(), false, out, err) ==
        kExitConfigError);
  CHECK(err.str().find("p1 > p2 required") != std::string::npos);
  fs::remove_all(dir);
}
