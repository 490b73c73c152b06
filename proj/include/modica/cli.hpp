#pragma once

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "modica/extend_verify.hpp"
#include "modica/io.hpp"
#include "modica/minimize.hpp"
#include "modica/sweep.hpp"
#include "modica/version.hpp"

namespace modica {

// Exit codes: 0 solved-and-certified / report reproduced / sweep completed;
// 2 ran but left uncertified, unconverged, or mismatched; 1 usage, input, or
// file errors.
inline constexpr int kExitOk = 0;
inline constexpr int kExitBadInput = 1;
inline constexpr int kExitUncertified = 2;

namespace detail {

inline void print_report(std::ostream& os, const VerificationReport& r) {
  os << "theta = " << fmt17(r.theta) << ", eps = " << fmt17(r.epsilon)
     << ", quarter nodes = " << r.quarter_nodes << '\n'
     << "  energy_quarter       = " << fmt17(r.energy_quarter) << '\n'
     << "  trivial_energy       = " << fmt17(r.trivial_energy) << '\n'
     << "  defect_min           = " << fmt17(r.defect_min) << '\n'
     << "  defect_max           = " << fmt17(r.defect_max) << '\n'
     << "  hamiltonian_spread   = " << fmt17(r.hamiltonian_spread) << '\n'
     << "  ode_residual_inf     = " << fmt17(r.ode_residual_inf)
     << "  (tol " << fmt17(r.residual_tol) << ")\n"
     << "  max_modulus_sq       = " << fmt17(r.max_modulus_sq) << '\n'
     << "  c1_distance_to_orbit = " << fmt17(r.c1_distance_to_orbit) << '\n'
     << "  nontrivial           = " << (r.nontrivial ? "yes" : "no") << '\n'
     << "  certified            = " << (r.counterexample_certified ? "yes" : "no")
     << '\n';
}

inline bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

}  // namespace detail

inline int run_solve(const SolverConfig& cfg, const std::string& out_stem,
                     const std::string& command) {
  validate(cfg);
  const MinimizeOutcome out = solve(cfg);
  if (!out.newton_converged)
    std::cerr << "solve did not converge: "
              << (out.diagnostic.empty() ? "unknown" : out.diagnostic) << '\n';

  const Grid g = build_grid(cfg.theta, cfg.n);
  const PotentialParams p{cfg.epsilon};
  const FullPeriodSolution s = extend(out.field, g, p);
  const VerificationReport rep = verify(s, p);

  std::cout << "descent iterations = " << out.descent_iterations
            << ", newton iterations = " << out.newton_iterations
            << ", grad_inf_norm = " << fmt17(out.grad_inf_norm) << '\n';
  detail::print_report(std::cout, rep);

  if (!out_stem.empty()) {
    write_solution_csv(csv_path_for(out_stem), s, p);
    write_report_json(report_path_for(out_stem), rep);
    write_manifest_json(manifest_path_for(out_stem),
                        make_manifest(command, config_to_json(cfg)));
    std::cout << "wrote " << csv_path_for(out_stem) << ", "
              << report_path_for(out_stem) << ", " << manifest_path_for(out_stem)
              << '\n';
  }
  return (out.newton_converged && rep.counterexample_certified) ? kExitOk
                                                                : kExitUncertified;
}

// Recomputes the certificate of a stored run from its x, u1, u2 columns
// alone and checks it against the stored report and derived columns. The
// sidecar manifest supplies theta, eps, and n.
inline int run_verify(const std::string& csv_arg) {
  const std::string stem = stem_of(csv_arg);
  const SolutionCsv t = read_solution_csv(csv_path_for(stem));
  const RunManifest man = read_manifest_json(manifest_path_for(stem));
  const VerificationReport stored = read_report_json(report_path_for(stem));

  double theta = 0.0, eps = 0.0;
  int n = 0;
  try {
    theta = man.config.at("theta").get<double>();
    eps = man.config.at("epsilon").get<double>();
    n = man.config.at("n").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw io_error(manifest_path_for(stem) + ": " + e.what());
  }

  const int N = static_cast<int>(t.x.size());
  if (N != 4 * (n - 1))
    throw io_error(csv_path_for(stem) + ": row count " + std::to_string(N) +
                   " does not match manifest n = " + std::to_string(n));
  const Grid g = build_grid(theta, n);
  const PotentialParams p{eps};

  int mismatches = 0;
  const auto complain = [&](const std::string& what) {
    std::cerr << "mismatch: " << what << '\n';
    ++mismatches;
  };

  FullPeriodSolution s;
  s.theta = theta;
  s.epsilon = eps;
  s.h = g.h;
  s.quarter_nodes = n;
  s.xs.resize(N);
  s.u1 = t.u1;
  s.u2 = t.u2;
  const int seg = n - 1;
  for (int k = 0; k < N; ++k) {
    s.xs[k] = static_cast<double>(k - seg) * g.h;
    if (!detail::close_rel(t.x[k], s.xs[k], 1e-12))
      complain("x at row " + std::to_string(k) + " is off the uniform grid");
  }
  s.du1.resize(N);
  s.du2.resize(N);
  const double i2h = 1.0 / (2.0 * g.h);
  for (int k = 0; k < N; ++k) {
    s.du1[k] = (s.u1_at(k + 1) - s.u1_at(k - 1)) * i2h;
    s.du2[k] = (s.u2_at(k + 1) - s.u2_at(k - 1)) * i2h;
  }

  // Stored derived columns must agree with recomputation from u1, u2.
  const DefectField d = defect(s, p);
  for (int k = 0; k < N; ++k) {
    if (!detail::close_rel(t.du1[k], s.du1[k], 1e-12) ||
        !detail::close_rel(t.du2[k], s.du2[k], 1e-12)) {
      complain("derivative columns at row " + std::to_string(k));
      break;
    }
  }
  for (int k = 0; k < N; ++k) {
    if (!detail::close_rel(t.W[k], eval_W(s.u1[k], s.u2[k], p), 1e-12) ||
        !detail::close_rel(t.defect[k], d.values[k], 1e-12)) {
      complain("W or defect column at row " + std::to_string(k));
      break;
    }
  }

  const VerificationReport fresh = verify(s, p);
  detail::print_report(std::cout, fresh);

  if (!detail::close_rel(fresh.energy_quarter, stored.energy_quarter, 1e-12))
    complain("energy_quarter: recomputed " + fmt17(fresh.energy_quarter) +
             " vs stored " + fmt17(stored.energy_quarter));
  if (!detail::close_rel(fresh.defect_min, stored.defect_min, 1e-12))
    complain("defect_min: recomputed " + fmt17(fresh.defect_min) + " vs stored " +
             fmt17(stored.defect_min));
  if (fresh.counterexample_certified != stored.counterexample_certified)
    complain("certification flag differs from stored report");

  if (mismatches == 0) {
    std::cout << "report reproduced\n";
    return kExitOk;
  }
  std::cerr << mismatches << " mismatch(es)\n";
  return kExitUncertified;
}

inline int run_sweep(const std::string& plan_path) {
  const PlanFile plan = parse_plan(plan_path);
  const std::string command = "modica sweep " + plan_path;

  nlohmann::json plan_json{{"study", plan.study}, {"n", plan.n},
                           {"base_seed", plan.base_seed}, {"out", plan.out}};

  if (plan.study == "eps_convergence") {
    if (std::isnan(plan.theta))
      throw io_error(plan_path + ": eps_convergence requires 'theta'");
    if (plan.eps_list.empty())
      throw io_error(plan_path + ": eps_convergence requires 'eps_list'");
    plan_json["theta"] = plan.theta;
    plan_json["eps_list"] = plan.eps_list;
    EpsStudyTable table;
    try {
      table = eps_convergence_study(plan.theta, plan.eps_list, plan.n);
    } catch (const study_aborted& e) {
      const std::string partial = plan.out + ".partial.csv";
      write_eps_study_csv(partial, e.partial);
      std::cerr << e.what() << "\nwrote partial results to " << partial << '\n';
      return kExitUncertified;
    }
    write_eps_study_csv(csv_path_for(plan.out), table);
    write_manifest_json(manifest_path_for(plan.out), make_manifest(command, plan_json));
    std::cout << "eps study: " << table.rows.size() << " rows, c1 distances "
              << (table.c1_strictly_decreasing ? "strictly decreasing"
                                               : "NOT monotone")
              << "\nwrote " << csv_path_for(plan.out) << '\n';
    return kExitOk;
  }

  if (plan.study == "theta_scan") {
    if (plan.theta_list.empty())
      throw io_error(plan_path + ": theta_scan requires 'theta_list'");
    if (std::isnan(plan.eps))
      throw io_error(plan_path + ": theta_scan requires 'eps'");
    plan_json["theta_list"] = plan.theta_list;
    plan_json["eps"] = plan.eps;
    const ThetaScanTable table =
        theta_threshold_scan(plan.theta_list, plan.eps, plan.n, plan.base_seed,
                             plan.threads);
    write_theta_scan_csv(csv_path_for(plan.out), table);
    write_manifest_json(manifest_path_for(plan.out), make_manifest(command, plan_json));
    std::cout << "theta scan: " << table.rows.size() << " rows, empirical threshold "
              << fmt17(table.empirical_threshold) << "\nwrote "
              << csv_path_for(plan.out) << '\n';
    return kExitOk;
  }

  // parse_plan guarantees the study name; the remaining case is defect_map.
  if (plan.theta_list.empty())
    throw io_error(plan_path + ": defect_map requires 'theta_list'");
  if (plan.eps_list.empty())
    throw io_error(plan_path + ": defect_map requires 'eps_list'");
  plan_json["theta_list"] = plan.theta_list;
  plan_json["eps_list"] = plan.eps_list;
  const DefectMapTable table = defect_sign_map(plan.theta_list, plan.eps_list,
                                               plan.n, plan.base_seed, plan.threads);
  int unconverged = 0;
  for (const auto& c : table.cells)
    if (!c.converged) ++unconverged;
  write_defect_map_csv(csv_path_for(plan.out), table);
  write_manifest_json(manifest_path_for(plan.out), make_manifest(command, plan_json));
  std::cout << "defect map: " << table.cells.size() << " cells, " << unconverged
            << " unconverged\nwrote " << csv_path_for(plan.out) << '\n';
  return kExitOk;
}

inline int run_cli(std::vector<std::string> args) {
  CLI::App app{"periodic minimizers of a two-component transition layer system "
               "and pointwise certificates against the gradient bound "
               "1/2 |u'|^2 <= W(u)",
               "modica"};
  app.set_version_flag("--version", std::string(kVersion));

  double theta = 0.0, eps = 0.0;
  int grid_n = 0;
  std::uint64_t seed = 0;
  std::string init_mode = "gl";
  std::string out_stem;
  auto* cmd_solve = app.add_subcommand(
      "solve", "minimize at one (theta, eps), refine, extend, certify");
  cmd_solve->add_option("--theta", theta, "frequency parameter in (0, 1)")
      ->required();
  cmd_solve->add_option("--eps", eps, "potential coupling, >= 0")->required();
  cmd_solve->add_option("--grid", grid_n, "quarter-period node count, odd")
      ->required();
  cmd_solve->add_option("--seed", seed, "seed for random init");
  cmd_solve->add_option("--init", init_mode, "initial guess: gl | random")
      ->check(CLI::IsMember({"gl", "random"}));
  cmd_solve->add_option("--out", out_stem,
                        "output stem; writes <out>.csv, <out>.report.json, "
                        "<out>.manifest.json");

  std::string verify_path;
  auto* cmd_verify = app.add_subcommand(
      "verify", "recompute a stored run's certificate and compare");
  cmd_verify->add_option("csv", verify_path, "solution CSV written by solve")
      ->required();

  std::string plan_path;
  auto* cmd_sweep =
      app.add_subcommand("sweep", "run a parameter study from a plan file");
  cmd_sweep->add_option("plan", plan_path, "plan file (key = value lines)")
      ->required();

  app.require_subcommand(1);

  std::string command = "modica";
  for (const auto& a : args) command += " " + a;

  // CLI11's vector overload consumes arguments back to front.
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    std::cout << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n' << app.help();
    return kExitBadInput;
  }

  try {
    if (cmd_solve->parsed()) {
      SolverConfig cfg;
      cfg.theta = theta;
      cfg.epsilon = eps;
      cfg.n = grid_n;
      cfg.seed = seed;
      cfg.init_mode =
          init_mode == "random" ? InitMode::random_perturbed : InitMode::gl_profile;
      return run_solve(cfg, out_stem, command);
    }
    if (cmd_verify->parsed()) return run_verify(verify_path);
    return run_sweep(plan_path);
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUncertified;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
}

}  // namespace modica
