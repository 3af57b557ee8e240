#include "pgs/cli_io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <mutex>
#include <json.hpp>
#include <sstream>
#include <thread>

#ifndef PGS_VERSION
#define PGS_VERSION "0.0.0"
#endif

namespace pgs {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

const char* version_string() { return PGS_VERSION; }

// ---------------------------------------------------------------- numbers

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

double parse_double(std::string_view s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  return v;
}

// ---------------------------------------------------------------- config

namespace {

const char* kConfigSchema = "pgs-config/1";

struct Reader {
  const ojson& obj;
  std::string prefix;

  void check_keys(std::initializer_list<const char*> allowed) const {
    for (const auto& [k, v] : obj.items()) {
      if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }) ==
          allowed.end())
        throw ConfigError("unknown key '" + prefix + k + "'");
    }
  }
  bool has(const char* key) const { return obj.contains(key); }
  void num(const char* key, double& out) const {
    if (!has(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError("key '" + prefix + key + "': expected a number");
    out = v.get<double>();
  }
  void integer(const char* key, int& out) const {
    if (!has(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError("key '" + prefix + key + "': expected an integer");
    const auto x = v.get<long long>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
      throw ConfigError("key '" + prefix + key + "': integer out of range");
    out = static_cast<int>(x);
  }
  void boolean(const char* key, bool& out) const {
    if (!has(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_boolean()) throw ConfigError("key '" + prefix + key + "': expected true or false");
    out = v.get<bool>();
  }
  Reader sub(const char* key) const {
    const auto& v = obj.at(key);
    if (!v.is_object()) throw ConfigError("key '" + prefix + key + "': expected an object");
    return {v, prefix + key + "."};
  }
};

}  // namespace

RunConfig parse_config(std::string_view text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");
  RunConfig c;
  Reader root{j, ""};
  root.check_keys({"schema", "riemann", "grid", "continuation", "solver"});
  if (root.has("schema")) {
    const auto& s = j.at("schema");
    if (!s.is_string() || s.get<std::string>() != kConfigSchema)
      throw ConfigError(std::string("key 'schema': expected \"") + kConfigSchema + "\"");
  }
  if (root.has("riemann")) {
    const Reader r = root.sub("riemann");
    r.check_keys({"p1", "p2", "u1", "v1", "alpha1", "alpha2"});
    r.num("p1", c.riemann.p1);
    r.num("p2", c.riemann.p2);
    r.num("u1", c.riemann.u1);
    r.num("v1", c.riemann.v1);
    r.num("alpha1", c.riemann.alpha1);
    r.num("alpha2", c.riemann.alpha2);
  }
  SolverConfig& s = c.solver;
  if (root.has("grid")) {
    const Reader g = root.sub("grid");
    g.check_keys({"Ns", "Ntheta", "radial_stretch", "symmetry"});
    g.integer("Ns", s.Ns);
    g.integer("Ntheta", s.Ntheta);
    g.num("radial_stretch", s.radial_stretch);
    if (g.has("symmetry")) {
      const auto& v = g.obj.at("symmetry");
      const std::string m = v.is_string() ? v.get<std::string>() : "";
      if (m == "half") s.symmetry_mode = SymmetryMode::Half;
      else if (m == "full") s.symmetry_mode = SymmetryMode::Full;
      else throw ConfigError("key 'grid.symmetry': expected \"half\" or \"full\"");
    }
  }
  if (root.has("continuation")) {
    const Reader k = root.sub("continuation");
    k.check_keys({"eps_start", "eps_end", "eps_ratio", "eps_schedule"});
    if (k.has("eps_schedule")) {
      if (k.has("eps_start") || k.has("eps_end") || k.has("eps_ratio"))
        throw ConfigError("key 'continuation.eps_schedule' excludes eps_start/eps_end/eps_ratio");
      const auto& v = k.obj.at("eps_schedule");
      if (!v.is_array()) throw ConfigError("key 'continuation.eps_schedule': expected an array");
      s.eps_schedule.clear();
      for (const auto& e : v) {
        if (!e.is_number())
          throw ConfigError("key 'continuation.eps_schedule': expected numbers");
        s.eps_schedule.push_back(e.get<double>());
      }
    } else {
      double a = 1e-1, b = 1e-6, q = 0.31622776601683794;
      k.num("eps_start", a);
      k.num("eps_end", b);
      k.num("eps_ratio", q);
      if (!(a > 0 && b > 0 && b <= a)) throw ConfigError("0 < eps_end <= eps_start required");
      if (!(q > 0 && q < 1)) throw ConfigError("eps_ratio in (0, 1) required");
      s.eps_schedule = geometric_schedule(a, b, q);
    }
  }
  if (root.has("solver")) {
    const Reader v = root.sub("solver");
    v.check_keys({"picard_tol", "picard_max", "picard_damping", "shock_damping", "outer_tol",
                  "outer_max", "linear_tol", "linear_max_iter", "phat_tol", "phat_max",
                  "ellipticity_probe_distance", "verbose"});
    v.num("picard_tol", s.picard_tol);
    v.integer("picard_max", s.picard_max);
    v.num("picard_damping", s.picard_damping);
    v.num("shock_damping", s.shock_damping);
    v.num("outer_tol", s.outer_tol);
    v.integer("outer_max", s.outer_max);
    v.num("linear_tol", s.linear_tol);
    v.integer("linear_max_iter", s.linear_max_iter);
    v.num("phat_tol", s.phat_tol);
    v.integer("phat_max", s.phat_max);
    v.num("ellipticity_probe_distance", s.ellipticity_probe_distance);
    v.boolean("verbose", s.verbose);
  }
  c.critical = c.riemann.alpha1 == 0.0;
  validate(c.riemann, c.critical);
  s.validate();
  return c;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RunError(kExitMissingInput, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out << bytes;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

ojson config_object(const RunConfig& c) {
  const SolverConfig& s = c.solver;
  ojson j;
  j["schema"] = kConfigSchema;
  j["riemann"] = {{"p1", c.riemann.p1},         {"p2", c.riemann.p2},
                  {"u1", c.riemann.u1},         {"v1", c.riemann.v1},
                  {"alpha1", c.riemann.alpha1}, {"alpha2", c.riemann.alpha2}};
  j["grid"] = {{"Ns", s.Ns},
               {"Ntheta", s.Ntheta},
               {"radial_stretch", s.radial_stretch},
               {"symmetry", s.symmetry_mode == SymmetryMode::Half ? "half" : "full"}};
  j["continuation"] = {{"eps_schedule", s.eps_schedule}};
  j["solver"] = {{"picard_tol", s.picard_tol},
                 {"picard_max", s.picard_max},
                 {"picard_damping", s.picard_damping},
                 {"shock_damping", s.shock_damping},
                 {"outer_tol", s.outer_tol},
                 {"outer_max", s.outer_max},
                 {"linear_tol", s.linear_tol},
                 {"linear_max_iter", s.linear_max_iter},
                 {"phat_tol", s.phat_tol},
                 {"phat_max", s.phat_max},
                 {"ellipticity_probe_distance", s.ellipticity_probe_distance},
                 {"verbose", s.verbose}};
  return j;
}

}  // namespace

std::string config_json(const RunConfig& c) { return config_object(c).dump(2); }

// ---------------------------------------------------------------- CSV

namespace {

void row(std::string& out, std::initializer_list<double> vals) {
  bool first = true;
  for (double v : vals) {
    if (!first) out += ',';
    out += format_double(v);
    first = false;
  }
  out += '\n';
}

std::vector<std::vector<std::string_view>> parse_csv(std::string_view text,
                                                     std::string_view header) {
  std::vector<std::vector<std::string_view>> rows;
  std::size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (first) {
      if (line != header) throw std::runtime_error("unexpected CSV header: " + std::string(line));
      first = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    std::size_t a = 0;
    while (true) {
      const std::size_t b = line.find(',', a);
      cells.push_back(line.substr(a, b == std::string_view::npos ? line.size() - a : b - a));
      if (b == std::string_view::npos) break;
      a = b + 1;
    }
    rows.push_back(std::move(cells));
  }
  if (first) throw std::runtime_error("empty CSV");
  return rows;
}

constexpr std::string_view kFieldHeader = "xi,eta,r,theta,p,u,v,sector";
constexpr std::string_view kRaysHeader = "theta,R,dR,on_shock";
constexpr std::string_view kShockHeader = "theta,r,rprime,xi,eta";

}  // namespace

std::string field_csv(const CompositeSolution& sol) {
  const RayField& f = sol.field;
  std::string out(kFieldHeader);
  out += '\n';
  for (int k = 0; k < f.rays(); ++k) {
    const double th = f.theta[k], c = std::cos(th), s = std::sin(th);
    const double sector = sol.velocity.sector.empty() ? 1.0 : sol.velocity.sector[k];
    for (int i = 0; i <= f.Ns; ++i) {
      const int q = f.at(k, i);
      const double r = f.radius(k, i);
      const double u = sol.velocity.u.empty() ? std::nan("") : sol.velocity.u[q];
      const double v = sol.velocity.v.empty() ? std::nan("") : sol.velocity.v[q];
      row(out, {r * c, r * s, r, th, f.p[q], u, v, sector});
    }
  }
  return out;
}

std::string rays_csv(const RayField& f) {
  std::string out(kRaysHeader);
  out += '\n';
  for (int k = 0; k < f.rays(); ++k)
    row(out, {f.theta[k], f.R[k], f.dR[k], static_cast<double>(f.on_shock[k])});
  return out;
}

std::string shock_csv(const ShockCurve& shock) {
  std::string out(kShockHeader);
  out += '\n';
  for (std::size_t k = 0; k < shock.size(); ++k) {
    const Vec2 P = shock.point(k);
    row(out, {shock.thetas[k], shock.r[k], shock.rprime[k], P.x, P.y});
  }
  return out;
}

std::string trace_csv(const ConvergenceTrace& trace) {
  std::string out =
      "stage,epsilon,outer,p_hat,shock_change,picard_iterations,linear_residual,"
      "branch_mismatch,defect,frozen,p_min,p_max,shock_gap_min,ellipticity_min\n";
  for (const auto& t : trace.records)
    row(out, {double(t.stage), t.epsilon, double(t.outer), t.p_hat, t.shock_change,
              double(t.picard_iterations), t.linear_residual, t.branch_mismatch, t.defect,
              double(t.frozen), t.p_min, t.p_max, t.shock_gap_min, t.ellipticity_min});
  return out;
}

std::string stages_csv(const ConvergenceTrace& trace) {
  std::string out =
      "stage,epsilon,p_hat,outer_iterations,final_change,defect,frozen,ellipticity_margin,"
      "change_from_previous\n";
  for (std::size_t k = 0; k < trace.stages.size(); ++k) {
    const auto& s = trace.stages[k];
    row(out, {double(k), s.epsilon, s.p_hat, double(s.outer_iterations), s.final_change, s.defect,
              double(s.frozen), s.ellipticity_margin, s.change_from_previous});
  }
  return out;
}

ShockCurve parse_shock_csv(std::string_view text) {
  ShockCurve c;
  for (const auto& r : parse_csv(text, kShockHeader)) {
    if (r.size() != 5) throw std::runtime_error("shock CSV: expected 5 columns");
    c.thetas.push_back(parse_double(r[0]));
    c.r.push_back(parse_double(r[1]));
    c.rprime.push_back(parse_double(r[2]));
  }
  c.frozen_mask.assign(c.size(), 0);
  return c;
}

RayField parse_field_csv(std::string_view field, std::string_view rays, int Ns, double stretch) {
  RayField f;
  f.Ns = Ns;
  f.s = radial_nodes(Ns, stretch);
  for (const auto& r : parse_csv(rays, kRaysHeader)) {
    if (r.size() != 4) throw std::runtime_error("rays CSV: expected 4 columns");
    f.theta.push_back(parse_double(r[0]));
    f.R.push_back(parse_double(r[1]));
    f.dR.push_back(parse_double(r[2]));
    f.on_shock.push_back(static_cast<std::uint8_t>(parse_double(r[3]) != 0.0));
  }
  const auto rows = parse_csv(field, kFieldHeader);
  if (rows.size() != static_cast<std::size_t>(f.rays()) * (Ns + 1))
    throw std::runtime_error("field CSV: row count does not match the ray table");
  for (std::size_t q = 0; q < rows.size(); ++q) {
    if (rows[q].size() != 8) throw std::runtime_error("field CSV: expected 8 columns");
    const int k = static_cast<int>(q / (Ns + 1));
    if (parse_double(rows[q][3]) != f.theta[k])
      throw std::runtime_error("field CSV: ray angle does not match the ray table");
    f.p.push_back(parse_double(rows[q][4]));
  }
  return f;
}

// ---------------------------------------------------------------- checksums

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  std::ostringstream os;
  for (unsigned int k = 0; k < len; ++k)
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[k]);
  return os.str();
}

// ---------------------------------------------------------------- manifest

std::string manifest_json(const RunManifest& m) {
  ojson j;
  j["schema"] = "pgs-manifest/1";
  j["version"] = m.version;
  j["mode"] = m.mode;
  j["created_utc"] = m.created_utc;
  j["deterministic"] = true;
  j["seed"] = nullptr;
  j["config"] = config_object(m.config);
  j["artifacts"] = ojson::array();
  for (const auto& a : m.artifacts)
    j["artifacts"].push_back({{"path", a.path}, {"sha256", a.sha256}, {"bytes", a.bytes}});
  j["summary"] = {{"p_hat", m.p_hat},
                  {"eps_tail_change", m.eps_tail_change},
                  {"runtime_seconds", m.runtime_seconds}};
  return j.dump(2);
}

RunManifest parse_manifest(std::string_view text) {
  const ojson j = ojson::parse(text);
  if (j.value("schema", "") != "pgs-manifest/1")
    throw RunError(kExitMissingInput, "manifest schema is not pgs-manifest/1");
  RunManifest m;
  m.version = j.at("version").get<std::string>();
  m.mode = j.at("mode").get<std::string>();
  m.created_utc = j.at("created_utc").get<std::string>();
  m.config = parse_config(j.at("config").dump());
  for (const auto& a : j.at("artifacts"))
    m.artifacts.push_back({a.at("path").get<std::string>(), a.at("sha256").get<std::string>(),
                           a.at("bytes").get<std::size_t>()});
  const auto& s = j.at("summary");
  auto num = [](const ojson& v) { return v.is_null() ? std::nan("") : v.get<double>(); };
  m.p_hat = num(s.at("p_hat"));
  m.eps_tail_change = num(s.at("eps_tail_change"));
  m.runtime_seconds = num(s.at("runtime_seconds"));
  return m;
}

// ---------------------------------------------------------------- runs

PropertyReport critical_report(const CriticalSolution& c) {
  PropertyReport rep;
  Check rh;
  rh.name = "critical_rh";
  const double res = rh_residual(c.upper, c.lower);
  rh.values = {{"rh_residual", res}, {"line_eta", c.line_eta}};
  rh.criterion = "RH residual across eta = -sqrt(pbar0) below tol";
  rh.tolerance = 1e-12;
  rh.pass = res < rh.tolerance;
  rep.checks.push_back(rh);
  Check tan;
  tan.name = "critical_tangency";
  // the line meets C1 at P1, P3 and stays outside C2
  const double d = std::abs(c.line_eta);
  tan.values = {{"line_distance", d}, {"r1", std::sqrt(c.p1)}, {"r2", std::sqrt(c.p2)}};
  tan.criterion = "r2 <= |line_eta| < r1";
  tan.tolerance = 0.0;
  tan.pass = d < std::sqrt(c.p1) && d >= std::sqrt(c.p2);
  rep.checks.push_back(tan);
  return rep;
}

namespace {

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// piecewise-constant artifacts of the alpha1 = 0 case on a uniform polar grid of C1
void critical_artifacts(const RunConfig& cfg, std::string& field, std::string& rays,
                        std::string& shock) {
  const CriticalSolution c = critical_case(cfg.riemann);
  const int Ns = cfg.solver.Ns, Nt = cfg.solver.Ntheta;
  const double r1 = std::sqrt(c.p1);
  RayField f;
  f.Ns = Ns;
  f.s = radial_nodes(Ns, 0.0);
  CompositeSolution sol;
  for (int k = 0; k < Nt; ++k) {
    f.theta.push_back(kTwoPi * k / Nt);
    f.R.push_back(r1);
    f.dR.push_back(0.0);
    f.on_shock.push_back(0);
  }
  sol.velocity.sector.assign(Nt, 1);
  for (int k = 0; k < Nt; ++k)
    for (int i = 0; i <= Ns; ++i) {
      const double r = f.s[i] * r1;
      const State st = c.sample(r * std::cos(f.theta[k]), r * std::sin(f.theta[k]));
      f.p.push_back(st.p);
      sol.velocity.u.push_back(st.u);
      sol.velocity.v.push_back(st.v);
    }
  sol.field = f;
  field = field_csv(sol);
  rays = rays_csv(f);
  ShockCurve line;
  const int n = Nt / 2 + 1;
  for (int k = 0; k < n; ++k) {
    const double th = c.theta3 + (c.theta1 - c.theta3) * k / (n - 1);
    const double r = -c.line_eta / std::cos(th - kTheta2);
    line.thetas.push_back(th);
    line.r.push_back(r);
    line.rprime.push_back(r * std::tan(th - kTheta2));
  }
  shock = shock_csv(line);
}

}  // namespace

LoadedRun load_run(const std::string& dir, std::ostream* warn) {
  const fs::path d(dir);
  if (!fs::is_directory(d)) throw RunError(kExitMissingInput, "no run directory " + dir);
  LoadedRun run;
  run.manifest = parse_manifest(read_file((d / "manifest.json").string()));
  if (warn && run.manifest.version != version_string())
    *warn << "warning: run written by version " << run.manifest.version << ", this binary is "
          << version_string() << "\n";
  auto artifact = [&](const std::string& name) {
    const auto it = std::find_if(run.manifest.artifacts.begin(), run.manifest.artifacts.end(),
                                 [&](const ArtifactEntry& a) { return a.path == name; });
    if (it == run.manifest.artifacts.end())
      throw RunError(kExitMissingInput, "manifest does not list " + name);
    std::string bytes = read_file((d / name).string());
    if (sha256_hex(bytes) != it->sha256)
      throw RunError(kExitMissingInput, "checksum mismatch for " + name);
    return bytes;
  };
  const RunConfig& cfg = run.manifest.config;
  if (run.manifest.mode == "critical") {
    run.critical = critical_case(cfg.riemann);
    return run;
  }
  run.fan = build_wave_fan(cfg.riemann);
  const ShockCurve shock = parse_shock_csv(artifact("shock.csv"));
  RayField f = parse_field_csv(artifact("field.csv"), artifact("rays.csv"), cfg.solver.Ns,
                               cfg.solver.radial_stretch);
  run.solution = make_composite(run.fan, shock, std::move(f));
  return run;
}

PropertyReport verify_run(const LoadedRun& run) {
  if (run.critical) return critical_report(*run.critical);
  return verify_solution(run.solution);
}

SolveOutcome solve_to_dir(const RunConfig& cfg, const std::string& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path d(out_dir);
  fs::create_directories(d);
  SolveOutcome res;
  RunManifest& m = res.manifest;
  m.version = version_string();
  m.created_utc = utc_now();
  m.config = cfg;
  std::vector<std::pair<std::string, std::string>> files;
  if (cfg.critical) {
    m.mode = "critical";
    std::string field, rays, shock;
    critical_artifacts(cfg, field, rays, shock);
    files = {{"field.csv", field}, {"rays.csv", rays}, {"shock.csv", shock},
             {"trace.csv", trace_csv({})}, {"stages.csv", stages_csv({})}};
    m.p_hat = cfg.riemann.p2;
    m.eps_tail_change = 0.0;
  } else {
    m.mode = "elliptic";
    const WaveFan fan = build_wave_fan(cfg.riemann);
    Solution sol;
    try {
      sol = continuation_solve(fan, cfg.solver);
    } catch (const SolverError& e) {
      write_file(d / "trace.csv", trace_csv(e.trace));
      write_file(d / "stages.csv", stages_csv(e.trace));
      res.exit_code = kExitSolverFailure;
      res.message = e.what();
      return res;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      res.exit_code = kExitSolverFailure;
      res.message = e.what();
      return res;
    }
    const CompositeSolution comp = make_composite(
        fan, sol.state.shock, full_rays(sol.state.grid, sol.state.field.values, fan));
    files = {{"field.csv", field_csv(comp)},
             {"rays.csv", rays_csv(comp.field)},
             {"shock.csv", shock_csv(sol.state.shock)},
             {"trace.csv", trace_csv(sol.trace)},
             {"stages.csv", stages_csv(sol.trace)}};
    m.p_hat = sol.state.p_hat;
    m.eps_tail_change =
        sol.trace.stages.empty() ? std::nan("") : sol.trace.stages.back().change_from_previous;
  }
  for (const auto& [name, bytes] : files) {
    write_file(d / name, bytes);
    m.artifacts.push_back({name, sha256_hex(bytes), bytes.size()});
  }
  m.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_file(d / "manifest.json", manifest_json(m));

  // verify what was written, so `verify --run` reproduces the same report
  const LoadedRun run = load_run(out_dir);
  res.report = verify_run(run);
  const std::string rep = report_json(res.report);
  write_file(d / "report.json", rep);
  m.artifacts.push_back({"report.json", sha256_hex(rep), rep.size()});
  write_file(d / "manifest.json", manifest_json(m));
  res.exit_code = res.report.all_pass() ? kExitOk : kExitVerifyFailed;
  return res;
}

// ---------------------------------------------------------------- commands

namespace {

void print_checks(const PropertyReport& rep, std::ostream& out) {
  for (const auto& c : rep.checks) {
    out << (c.pass ? "PASS " : (c.inconclusive ? "INCONCLUSIVE " : "FAIL ")) << c.name;
    for (const auto& [k, v] : c.values) out << " " << k << "=" << format_double(v);
    out << "\n";
  }
}

}  // namespace

int cmd_solve(const std::string& config_path, const std::string& out_dir, bool verbose,
              std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  if (verbose) cfg.solver.verbose = true;
  try {
    const SolveOutcome r = solve_to_dir(cfg, out_dir);
    if (r.exit_code == kExitSolverFailure) {
      err << "solver failure: " << r.message << "\n";
      return r.exit_code;
    }
    out << "mode " << r.manifest.mode << " p_hat " << format_double(r.manifest.p_hat)
        << " runtime_s " << format_double(r.manifest.runtime_seconds) << "\n";
    print_checks(r.report, out);
    return r.exit_code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const RunError& e) {
    err << e.what() << "\n";
    return e.code;
  } catch (const std::exception& e) {
    err << "solver failure: " << e.what() << "\n";
    return kExitSolverFailure;
  }
}

int cmd_verify(const std::string& run_dir, std::ostream& out, std::ostream& err) {
  try {
    const LoadedRun run = load_run(run_dir, &err);
    const PropertyReport rep = verify_run(run);
    write_file(fs::path(run_dir) / "report.json", report_json(rep));
    print_checks(rep, out);
    return rep.all_pass() ? kExitOk : kExitVerifyFailed;
  } catch (const RunError& e) {
    err << e.what() << "\n";
    return e.code;
  } catch (const std::exception& e) {
    err << "cannot load run: " << e.what() << "\n";
    return kExitMissingInput;
  }
}

int cmd_sample(const std::string& run_dir, double xi, double eta, std::ostream& out,
               std::ostream& err) {
  try {
    const LoadedRun run = load_run(run_dir, &err);
    if (run.critical) {
      const State s = run.critical->sample(xi, eta);
      out << format_double(s.p) << " " << format_double(s.u) << " " << format_double(s.v) << " "
          << (eta > run.critical->line_eta ? "1" : "2") << "\n";
      return kExitOk;
    }
    const SampleResult s = sample_solution(run.solution, xi, eta);
    out << format_double(s.p) << " " << format_double(s.u) << " " << format_double(s.v) << " "
        << to_string(s.region) << "\n";
    return kExitOk;
  } catch (const RunError& e) {
    err << e.what() << "\n";
    return e.code;
  } catch (const std::exception& e) {
    err << "cannot load run: " << e.what() << "\n";
    return kExitMissingInput;
  }
}

int cmd_sweep(const std::string& config_path, const std::string& param,
              const std::vector<double>& values, const std::string& out_dir, int threads,
              std::ostream& out, std::ostream& err) {
  RunConfig base;
  try {
    base = load_config(config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  double RiemannConfig::*field = nullptr;
  if (param == "alpha1") field = &RiemannConfig::alpha1;
  else if (param == "alpha2") field = &RiemannConfig::alpha2;
  else if (param == "p1") field = &RiemannConfig::p1;
  else if (param == "p2") field = &RiemannConfig::p2;
  else if (param == "u1") field = &RiemannConfig::u1;
  else if (param == "v1") field = &RiemannConfig::v1;
  else {
    err << "config error: unknown sweep parameter '" << param << "'\n";
    return kExitConfigError;
  }
  std::vector<RunConfig> cfgs;
  for (double v : values) {
    RunConfig c = base;
    c.riemann.*field = v;
    c.critical = c.riemann.alpha1 == 0.0;
    try {
      validate(c.riemann, c.critical);
    } catch (const ConfigError& e) {
      err << "config error: " << param << "=" << format_double(v) << ": " << e.what() << "\n";
      return kExitConfigError;
    }
    cfgs.push_back(c);
  }
  std::vector<int> codes(cfgs.size(), kExitOk);
  std::vector<double> phat(cfgs.size(), std::nan("")), rP2(cfgs.size(), std::nan(""));
  std::atomic<std::size_t> next{0};
  std::mutex log_mu;
  auto worker = [&] {
    for (std::size_t k; (k = next++) < cfgs.size();) {
      const std::string sub = (fs::path(out_dir) / (param + "=" + format_double(values[k]))).string();
      try {
        const SolveOutcome r = solve_to_dir(cfgs[k], sub);
        codes[k] = r.exit_code;
        phat[k] = r.manifest.p_hat;
        if (r.exit_code != kExitSolverFailure) {
          const ShockCurve s = parse_shock_csv(read_file((fs::path(sub) / "shock.csv").string()));
          rP2[k] = interp_shock(s, kTheta2).first;
        }
        const std::lock_guard<std::mutex> lk(log_mu);
        out << param << "=" << format_double(values[k]) << " exit " << codes[k] << "\n";
      } catch (const std::exception& e) {
        codes[k] = kExitSolverFailure;
        const std::lock_guard<std::mutex> lk(log_mu);
        err << param << "=" << format_double(values[k]) << ": " << e.what() << "\n";
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(cfgs.size())));
  std::vector<std::thread> pool;
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::string table = param + ",exit_code,p_hat,r_P2\n";
  for (std::size_t k = 0; k < cfgs.size(); ++k)
    row(table, {values[k], double(codes[k]), phat[k], rP2[k]});
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "sweep.csv", table);
  return *std::max_element(codes.begin(), codes.end());
}

}  // namespace pgs
