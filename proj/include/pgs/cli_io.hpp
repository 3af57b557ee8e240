#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pgs/field_recovery.hpp"
#include "pgs/solver_driver.hpp"
#include "pgs/verify_report.hpp"

namespace pgs {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 2;
inline constexpr int kExitSolverFailure = 3;
inline constexpr int kExitConfigError = 64;
inline constexpr int kExitMissingInput = 66;

const char* version_string();

struct RunConfig {
  RiemannConfig riemann;
  SolverConfig solver;
  bool critical = false;  // alpha1 == 0: analytic piecewise-constant path
};

// Structured config document (schemas/config.schema.json). Missing keys keep
// their defaults; unknown keys and type errors name the offending key.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::string& path);
std::string config_json(const RunConfig& cfg);

// shortest decimal that parses back to the same double
std::string format_double(double v);
double parse_double(std::string_view s);

std::string field_csv(const CompositeSolution& sol);
std::string rays_csv(const RayField& f);
std::string shock_csv(const ShockCurve& shock);
std::string trace_csv(const ConvergenceTrace& trace);
std::string stages_csv(const ConvergenceTrace& trace);

ShockCurve parse_shock_csv(std::string_view text);
// field and ray tables back into a RayField on the radial nodes of (Ns, stretch)
RayField parse_field_csv(std::string_view field, std::string_view rays, int Ns, double stretch);

std::string sha256_hex(std::string_view bytes);

struct ArtifactEntry {
  std::string path;
  std::string sha256;
  std::size_t bytes = 0;
};

struct RunManifest {
  std::string version;
  std::string mode;  // "elliptic" or "critical"
  std::string created_utc;
  RunConfig config;
  std::vector<ArtifactEntry> artifacts;
  double runtime_seconds = 0.0;
  double p_hat = 0.0;
  double eps_tail_change = 0.0;
};

std::string manifest_json(const RunManifest& m);
RunManifest parse_manifest(std::string_view text);

struct RunError : std::runtime_error {
  int code;
  RunError(int c, const std::string& m) : std::runtime_error(m), code(c) {}
};

struct LoadedRun {
  RunManifest manifest;
  WaveFan fan;
  CompositeSolution solution;  // empty field for critical runs
  std::optional<CriticalSolution> critical;
};

// reads the artifacts of a run directory; checksum mismatch or a missing file
// throws RunError(kExitMissingInput), a version mismatch only warns on `warn`
LoadedRun load_run(const std::string& dir, std::ostream* warn = nullptr);

PropertyReport verify_run(const LoadedRun& run);
PropertyReport critical_report(const CriticalSolution& c);

struct SolveOutcome {
  int exit_code = kExitOk;
  RunManifest manifest;
  PropertyReport report;
  std::string message;
};

// solve, export, reload and verify; writes into out_dir
SolveOutcome solve_to_dir(const RunConfig& cfg, const std::string& out_dir);

int cmd_solve(const std::string& config_path, const std::string& out_dir, bool verbose,
              std::ostream& out, std::ostream& err);
int cmd_verify(const std::string& run_dir, std::ostream& out, std::ostream& err);
int cmd_sample(const std::string& run_dir, double xi, double eta, std::ostream& out,
               std::ostream& err);
// one solve per value in out_dir/<param>=<value>, run on a worker pool
int cmd_sweep(const std::string& config_path, const std::string& param,
              const std::vector<double>& values, const std::string& out_dir, int threads,
              std::ostream& out, std::ostream& err);

}  // namespace pgs
