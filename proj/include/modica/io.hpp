#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "modica/extend_verify.hpp"
#include "modica/sweep.hpp"
#include "modica/version.hpp"

namespace modica {

// Shortest round-trip decimal form: 17 significant digits reproduce the
// exact binary double on read-back, so write -> read -> write is stable.
inline std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

inline std::string manifest_path_for(const std::string& stem) {
  return stem + ".manifest.json";
}
inline std::string report_path_for(const std::string& stem) {
  return stem + ".report.json";
}
inline std::string csv_path_for(const std::string& stem) { return stem + ".csv"; }

// Strips a trailing ".csv" so both the stem and the data file name address
// the same run.
inline std::string stem_of(const std::string& path) {
  const std::string ext = ".csv";
  if (path.size() > ext.size() &&
      path.compare(path.size() - ext.size(), ext.size(), ext) == 0)
    return path.substr(0, path.size() - ext.size());
  return path;
}

// --- full-period solution tables -----------------------------------------

inline void write_solution_csv(const std::string& path, const FullPeriodSolution& s,
                               const PotentialParams& p) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << "x,u1,u2,du1,du2,W,defect\n";
  const DefectField d = defect(s, p);
  for (int k = 0; k < s.size(); ++k) {
    out << fmt17(s.xs[k]) << ',' << fmt17(s.u1[k]) << ',' << fmt17(s.u2[k]) << ','
        << fmt17(s.du1[k]) << ',' << fmt17(s.du2[k]) << ','
        << fmt17(eval_W(s.u1[k], s.u2[k], p)) << ',' << fmt17(d.values[k]) << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

struct SolutionCsv {
  std::vector<double> x, u1, u2, du1, du2, W, defect;
};

inline SolutionCsv read_solution_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw io_error("empty file: " + path);
  if (line == "x,u1,u2,du1,du2,W,defect\r") line.pop_back();
  if (line != "x,u1,u2,du1,du2,W,defect")
    throw io_error(path + ": unexpected header '" + line + "'");

  SolutionCsv t;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double vals[7];
    const char* s = line.c_str();
    char* end = nullptr;
    for (int c = 0; c < 7; ++c) {
      vals[c] = std::strtod(s, &end);
      if (end == s)
        throw io_error(path + ":" + std::to_string(lineno) + ": bad number in column " +
                       std::to_string(c + 1));
      s = end;
      if (c < 6) {
        if (*s != ',')
          throw io_error(path + ":" + std::to_string(lineno) +
                         ": expected 7 comma-separated columns");
        ++s;
      }
    }
    if (*s != '\0')
      throw io_error(path + ":" + std::to_string(lineno) + ": trailing characters");
    t.x.push_back(vals[0]);
    t.u1.push_back(vals[1]);
    t.u2.push_back(vals[2]);
    t.du1.push_back(vals[3]);
    t.du2.push_back(vals[4]);
    t.W.push_back(vals[5]);
    t.defect.push_back(vals[6]);
  }
  if (t.x.size() < 8 || t.x.size() % 4 != 0)
    throw io_error(path + ": row count must be a positive multiple of 4, got " +
                   std::to_string(t.x.size()));
  return t;
}

// --- verification report ---------------------------------------------------

inline nlohmann::json report_to_json(const VerificationReport& r) {
  return nlohmann::json{{"theta", r.theta},
                        {"epsilon", r.epsilon},
                        {"quarter_nodes", r.quarter_nodes},
                        {"energy_quarter", r.energy_quarter},
                        {"defect_min", r.defect_min},
                        {"defect_max", r.defect_max},
                        {"hamiltonian_spread", r.hamiltonian_spread},
                        {"ode_residual_inf", r.ode_residual_inf},
                        {"max_modulus_sq", r.max_modulus_sq},
                        {"sym_exchange_residual", r.sym_exchange_residual},
                        {"sym_parity_residual", r.sym_parity_residual},
                        {"c1_distance_to_orbit", r.c1_distance_to_orbit},
                        {"trivial_energy", r.trivial_energy},
                        {"residual_tol", r.residual_tol},
                        {"nontrivial_margin", r.nontrivial_margin},
                        {"nontrivial", r.nontrivial},
                        {"unit_ball_ok", r.unit_ball_ok},
                        {"counterexample_certified", r.counterexample_certified}};
}

inline VerificationReport report_from_json(const nlohmann::json& j) {
  VerificationReport r;
  r.theta = j.at("theta").get<double>();
  r.epsilon = j.at("epsilon").get<double>();
  r.quarter_nodes = j.at("quarter_nodes").get<int>();
  r.energy_quarter = j.at("energy_quarter").get<double>();
  r.defect_min = j.at("defect_min").get<double>();
  r.defect_max = j.at("defect_max").get<double>();
  r.hamiltonian_spread = j.at("hamiltonian_spread").get<double>();
  r.ode_residual_inf = j.at("ode_residual_inf").get<double>();
  r.max_modulus_sq = j.at("max_modulus_sq").get<double>();
  r.sym_exchange_residual = j.at("sym_exchange_residual").get<double>();
  r.sym_parity_residual = j.at("sym_parity_residual").get<double>();
  r.c1_distance_to_orbit = j.at("c1_distance_to_orbit").get<double>();
  r.trivial_energy = j.at("trivial_energy").get<double>();
  r.residual_tol = j.at("residual_tol").get<double>();
  r.nontrivial_margin = j.at("nontrivial_margin").get<double>();
  r.nontrivial = j.at("nontrivial").get<bool>();
  r.unit_ball_ok = j.at("unit_ball_ok").get<bool>();
  r.counterexample_certified = j.at("counterexample_certified").get<bool>();
  return r;
}

inline void write_report_json(const std::string& path, const VerificationReport& r) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << report_to_json(r).dump(2) << '\n';
  if (!out) throw io_error("write failed: " + path);
}

inline nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw io_error(path + ": " + e.what());
  }
}

inline VerificationReport read_report_json(const std::string& path) {
  try {
    return report_from_json(load_json(path));
  } catch (const nlohmann::json::exception& e) {
    throw io_error(path + ": " + e.what());
  }
}

// --- run manifest ------------------------------------------------------------

// Sidecar recording what produced a data file: the command line, the full
// solver configuration, tool version, timestamp, platform.
struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::string tool_version = kVersion;
  std::string timestamp;
  std::string platform;
};

inline std::string platform_string() {
  std::string s;
#if defined(__linux__)
  s = "linux";
#elif defined(__APPLE__)
  s = "darwin";
#elif defined(_WIN32)
  s = "windows";
#else
  s = "unknown";
#endif
#if defined(__x86_64__) || defined(_M_X64)
  s += "-x86_64";
#elif defined(__aarch64__)
  s += "-aarch64";
#endif
#if defined(__clang_major__)
  s += "-clang" + std::to_string(__clang_major__);
#elif defined(__GNUC__)
  s += "-gcc" + std::to_string(__GNUC__);
#endif
  return s;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

inline nlohmann::json config_to_json(const SolverConfig& cfg) {
  const char* mode = cfg.init_mode == InitMode::gl_profile       ? "gl"
                     : cfg.init_mode == InitMode::random_perturbed ? "random"
                                                                   : "custom";
  return nlohmann::json{{"theta", cfg.theta},
                        {"epsilon", cfg.epsilon},
                        {"n", cfg.n},
                        {"descent_tol", cfg.descent_tol},
                        {"newton_tol", cfg.newton_tol},
                        {"max_descent_iters", cfg.max_descent_iters},
                        {"max_newton_iters", cfg.max_newton_iters},
                        {"seed", cfg.seed},
                        {"init_mode", mode}};
}

inline RunManifest make_manifest(const std::string& command, nlohmann::json config) {
  RunManifest m;
  m.command = command;
  m.config = std::move(config);
  m.timestamp = utc_timestamp();
  m.platform = platform_string();
  return m;
}

inline void write_manifest_json(const std::string& path, const RunManifest& m) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << nlohmann::json{{"command", m.command},
                        {"config", m.config},
                        {"tool_version", m.tool_version},
                        {"timestamp", m.timestamp},
                        {"platform", m.platform}}
             .dump(2)
      << '\n';
  if (!out) throw io_error("write failed: " + path);
}

inline RunManifest read_manifest_json(const std::string& path) {
  const nlohmann::json j = load_json(path);
  RunManifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.config = j.at("config");
    m.tool_version = j.at("tool_version").get<std::string>();
    m.timestamp = j.at("timestamp").get<std::string>();
    m.platform = j.at("platform").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw io_error(path + ": " + e.what());
  }
  return m;
}

// --- sweep plans ------------------------------------------------------------

// Flat key = value text format; '#' starts a comment, lists are comma
// separated. Recognized keys: study, theta, eps, theta_list, eps_list, n,
// base_seed, threads, out.
struct PlanFile {
  std::string study;
  double theta = std::numeric_limits<double>::quiet_NaN();
  double eps = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> theta_list;
  std::vector<double> eps_list;
  int n = 1025;
  std::uint64_t base_seed = 0;
  int threads = 0;  // 0 = default cap
  std::string out;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw io_error(where + ": bad number '" + s + "'");
  return x;
}

inline std::vector<double> parse_list(const std::string& s, const std::string& where) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(parse_double(trim(item), where));
  if (out.empty()) throw io_error(where + ": empty list");
  return out;
}

}  // namespace detail

inline PlanFile parse_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path);
  PlanFile plan;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = path + ":" + std::to_string(lineno);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw io_error(where + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (val.empty()) throw io_error(where + ": empty value for '" + key + "'");

    if (key == "study") {
      plan.study = val;
    } else if (key == "theta") {
      plan.theta = detail::parse_double(val, where);
    } else if (key == "eps") {
      plan.eps = detail::parse_double(val, where);
    } else if (key == "theta_list") {
      plan.theta_list = detail::parse_list(val, where);
    } else if (key == "eps_list") {
      plan.eps_list = detail::parse_list(val, where);
    } else if (key == "n") {
      plan.n = static_cast<int>(detail::parse_double(val, where));
    } else if (key == "base_seed") {
      plan.base_seed = static_cast<std::uint64_t>(
          std::strtoull(val.c_str(), nullptr, 10));
    } else if (key == "threads") {
      plan.threads = static_cast<int>(detail::parse_double(val, where));
    } else if (key == "out") {
      plan.out = val;
    } else {
      throw io_error(where + ": unknown key '" + key + "'");
    }
  }
  if (plan.study.empty()) throw io_error(path + ": missing 'study'");
  if (plan.study != "eps_convergence" && plan.study != "theta_scan" &&
      plan.study != "defect_map")
    throw io_error(path + ": unknown study '" + plan.study + "'");
  if (plan.out.empty()) throw io_error(path + ": missing 'out'");
  return plan;
}

// --- sweep result tables ------------------------------------------------------

inline void write_eps_study_csv(const std::string& path, const EpsStudyTable& t) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << "epsilon,c1_distance,defect_min,energy,hamiltonian_spread,converged,certified\n";
  for (const auto& r : t.rows)
    out << fmt17(r.epsilon) << ',' << fmt17(r.c1_distance) << ','
        << fmt17(r.defect_min) << ',' << fmt17(r.energy) << ','
        << fmt17(r.hamiltonian_spread) << ',' << (r.converged ? 1 : 0) << ','
        << (r.certified ? 1 : 0) << '\n';
  if (!out) throw io_error("write failed: " + path);
}

inline void write_theta_scan_csv(const std::string& path, const ThetaScanTable& t) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << "theta,best_energy,trivial_energy,nontrivial,converged_runs,total_runs\n";
  for (const auto& r : t.rows)
    out << fmt17(r.theta) << ',' << fmt17(r.best_energy) << ','
        << fmt17(r.trivial_energy) << ',' << (r.nontrivial ? 1 : 0) << ','
        << r.converged_runs << ',' << r.total_runs << '\n';
  if (!out) throw io_error("write failed: " + path);
}

inline void write_defect_map_csv(const std::string& path, const DefectMapTable& t) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << "theta,epsilon,defect_min,exact_family,converged,certified\n";
  for (const auto& c : t.cells)
    out << fmt17(c.theta) << ',' << fmt17(c.epsilon) << ',' << fmt17(c.defect_min)
        << ',' << (c.exact_family ? 1 : 0) << ',' << (c.converged ? 1 : 0) << ','
        << (c.certified ? 1 : 0) << '\n';
  if (!out) throw io_error("write failed: " + path);
}

}  // namespace modica
