#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <thread>

#include "pgs/cli_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Pressure gradient system Riemann solver"};
  app.set_version_flag("--version", pgs::version_string());
  app.require_subcommand(1);

  std::string config, out_dir, run_dir, param;
  bool verbose = false;
  double xi = 0.0, eta = 0.0;
  std::vector<double> values;
  int threads = 0;

  auto* solve = app.add_subcommand("solve", "continuation solve, export artifacts and verify");
  solve->add_option("--config", config, "config file (JSON)")->required();
  solve->add_option("--out", out_dir, "output directory")->required();
  solve->add_flag("-v,--verbose", verbose, "progress on stderr");

  auto* verify = app.add_subcommand("verify", "re-run the property checks on a run directory");
  verify->add_option("--run", run_dir, "run directory")->required();

  auto* sample = app.add_subcommand("sample", "print p u v region at a point");
  sample->add_option("--run", run_dir, "run directory")->required();
  sample->add_option("--xi", xi, "xi")->required();
  sample->add_option("--eta", eta, "eta")->required();

  auto* sweep = app.add_subcommand("sweep", "independent solves over one Riemann parameter");
  sweep->add_option("--config", config, "base config file (JSON)")->required();
  sweep->add_option("--param", param, "alpha1, alpha2, p1, p2, u1 or v1")->required();
  sweep->add_option("--values", values, "parameter values")->required();
  sweep->add_option("--out", out_dir, "output directory")->default_val("sweep");
  sweep->add_option("--threads", threads, "worker count (default PGS_THREADS or all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : pgs::kExitConfigError;
  }

  if (*solve) return pgs::cmd_solve(config, out_dir, verbose, std::cout, std::cerr);
  if (*verify) return pgs::cmd_verify(run_dir, std::cout, std::cerr);
  if (*sample) return pgs::cmd_sample(run_dir, xi, eta, std::cout, std::cerr);
  if (threads <= 0) {
    const char* env = std::getenv("PGS_THREADS");
    threads = env ? std::atoi(env) : 0;
    if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  return pgs::cmd_sweep(config, param, values, out_dir, threads, std::cout, std::cerr);
}
