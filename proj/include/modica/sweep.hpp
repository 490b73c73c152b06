#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "modica/exact.hpp"
#include "modica/extend_verify.hpp"
#include "modica/grid.hpp"
#include "modica/minimize.hpp"

namespace modica {

struct SweepPlan {
  std::vector<double> theta_list;
  std::vector<double> eps_list;
  int n = 1025;
  std::uint64_t base_seed = 0;
  std::string outputs;  // path prefix for result tables
};

inline void validate(const SweepPlan& plan) {
  if (plan.theta_list.empty()) throw std::invalid_argument("theta list is empty");
  if (plan.eps_list.empty()) throw std::invalid_argument("eps list is empty");
  for (double t : plan.theta_list)
    if (!(t > 0.0 && t < 1.0))
      throw std::invalid_argument("theta out of range (0, 1)");
  for (double e : plan.eps_list)
    if (!(e >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  if (plan.n < 3 || plan.n % 2 == 0)
    throw std::invalid_argument("grid node count must be odd and >= 3");
}

namespace detail {

// Thread cap: MODICA_THREADS when set to a positive integer, otherwise the
// logical processor count.
inline int default_thread_cap() {
  if (const char* env = std::getenv("MODICA_THREADS")) {
    const int k = std::atoi(env);
    if (k >= 1) return k;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

// Runs fn(job) for job = 0 .. jobs-1 on up to `threads` workers. Each job
// writes only its preassigned output slot, so the merged result is
// byte-for-byte independent of the scheduling.
inline void parallel_for(int jobs, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = default_thread_cap();
  threads = std::min(threads, jobs);
  if (threads <= 1) {
    for (int j = 0; j < jobs; ++j) fn(j);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&]() {
      for (int j = next.fetch_add(1); j < jobs; j = next.fetch_add(1)) fn(j);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

struct EpsStudyRow {
  double epsilon = 0.0;
  double c1_distance = std::numeric_limits<double>::quiet_NaN();
  double defect_min = std::numeric_limits<double>::quiet_NaN();
  double energy = std::numeric_limits<double>::quiet_NaN();
  double hamiltonian_spread = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  bool certified = false;
};

struct EpsStudyTable {
  double theta = 0.0;
  int n = 0;
  std::vector<EpsStudyRow> rows;
  bool c1_strictly_decreasing = true;
};

// Thrown when a study solve fails to converge; carries the rows finished so
// far so callers can dump partial results.
class study_aborted : public std::runtime_error {
 public:
  EpsStudyTable partial;
  study_aborted(const std::string& msg, EpsStudyTable table)
      : std::runtime_error(msg), partial(std::move(table)) {}
};

// Tracks the minimizer branch along a strictly decreasing eps chain by warm
// starting each solve from the previous solution (the closed-form orbit
// seeds the first). The chain is inherently sequential. eps = 0 is allowed
// only as the final entry, closing the continuation at the exact family.
inline EpsStudyTable eps_convergence_study(double theta,
                                           const std::vector<double>& eps_list,
                                           int n) {
  if (eps_list.empty()) throw std::invalid_argument("eps list is empty");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
      throw std::invalid_argument("eps list must be strictly decreasing");
    if (eps_list[i] == 0.0 && i + 1 != eps_list.size())
      throw std::invalid_argument("eps = 0 may only close the list");
  }

  EpsStudyTable table;
  table.theta = theta;
  table.n = n;

  SolverConfig cfg;
  cfg.theta = theta;
  cfg.n = n;
  const Grid g = build_grid(theta, n);
  HalfCellField start = gl_profile_field(g);

  for (double eps : eps_list) {
    cfg.epsilon = eps;
    const MinimizeOutcome out = solve_from(start, cfg);
    if (!out.newton_converged)
      throw study_aborted(
          "eps study aborted: solve did not converge at epsilon = " + std::to_string(eps) +
              (out.diagnostic.empty() ? "" : " (" + out.diagnostic + ")"),
          table);
    const PotentialParams p{eps};
    const VerificationReport rep = verify(extend(out.field, g, p), p);
    table.rows.push_back({eps, rep.c1_distance_to_orbit, rep.defect_min,
                          rep.energy_quarter, rep.hamiltonian_spread, true,
                          rep.counterexample_certified});
    start = out.field;
  }

  for (std::size_t i = 1; i < table.rows.size(); ++i)
    if (!(table.rows[i].c1_distance < table.rows[i - 1].c1_distance))
      table.c1_strictly_decreasing = false;
  return table;
}

struct ThetaScanRow {
  double theta = 0.0;
  double best_energy = std::numeric_limits<double>::quiet_NaN();
  double trivial_energy = std::numeric_limits<double>::quiet_NaN();
  bool nontrivial = false;
  int converged_runs = 0;
  int total_runs = 0;
};

struct ThetaScanTable {
  double epsilon = 0.0;
  int n = 0;
  std::vector<ThetaScanRow> rows;
  // Largest scanned theta whose best minimizer beats the constant state;
  // NaN when none does.
  double empirical_threshold = std::numeric_limits<double>::quiet_NaN();
};

// Probes, per theta, whether minimization finds anything below the constant
// state pi/(8 theta). Rows are independent and run in parallel; each row
// takes `runs_per_theta` seeded random starts.
inline ThetaScanTable theta_threshold_scan(const std::vector<double>& theta_list,
                                           double eps, int n,
                                           std::uint64_t base_seed,
                                           int threads = 0,
                                           int runs_per_theta = 5) {
  if (theta_list.empty()) throw std::invalid_argument("theta list is empty");
  for (std::size_t i = 0; i < theta_list.size(); ++i) {
    if (!(theta_list[i] > 0.0 && theta_list[i] < 1.0))
      throw std::invalid_argument("theta out of range (0, 1)");
    if (i > 0 && !(theta_list[i] > theta_list[i - 1]))
      throw std::invalid_argument("theta list must be strictly increasing");
  }
  if (!(eps >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  if (runs_per_theta < 1) throw std::invalid_argument("runs per theta must be positive");

  ThetaScanTable table;
  table.epsilon = eps;
  table.n = n;
  table.rows.resize(theta_list.size());

  detail::parallel_for(
      static_cast<int>(theta_list.size()), threads, [&](int j) {
        ThetaScanRow row;
        row.theta = theta_list[static_cast<std::size_t>(j)];
        row.trivial_energy = std::numbers::pi / (8.0 * row.theta);
        row.total_runs = runs_per_theta;
        SolverConfig cfg;
        cfg.theta = row.theta;
        cfg.epsilon = eps;
        cfg.n = n;
        cfg.init_mode = InitMode::random_perturbed;
        const Grid g = build_grid(row.theta, n);
        double best = std::numeric_limits<double>::infinity();
        for (int r = 0; r < runs_per_theta; ++r) {
          cfg.seed = base_seed + static_cast<std::uint64_t>(j) * 1000u +
                     static_cast<std::uint64_t>(r);
          const MinimizeOutcome out =
              solve_from(random_perturbed_field(g, cfg.seed), cfg);
          if (out.newton_converged) {
            ++row.converged_runs;
            best = std::min(best, out.energy);
          }
        }
        if (row.converged_runs > 0) row.best_energy = best;
        row.nontrivial =
            row.converged_runs > 0 && row.best_energy < row.trivial_energy - 1e-6;
        table.rows[static_cast<std::size_t>(j)] = row;
      });

  for (const auto& row : table.rows)
    if (row.nontrivial) table.empirical_threshold = row.theta;
  return table;
}

struct DefectMapCell {
  double theta = 0.0;
  double epsilon = 0.0;
  double defect_min = std::numeric_limits<double>::quiet_NaN();
  bool exact_family = false;  // eps = 0 cells use the closed-form constant
  bool converged = false;
  bool certified = false;
};

struct DefectMapTable {
  int n = 0;
  std::vector<DefectMapCell> cells;  // theta-major, eps order as given
};

// Sign map of the defect minimum over a (theta, eps) rectangle. Rows (fixed
// theta) are independent and run in parallel; within a row, solves warm
// start from the previous converged cell. eps = 0 cells take the exact
// first-integral constant instead of a solve. Per-cell failures are
// recorded, never thrown.
inline DefectMapTable defect_sign_map(const std::vector<double>& theta_list,
                                      const std::vector<double>& eps_list,
                                      int n, std::uint64_t base_seed,
                                      int threads = 0) {
  SweepPlan plan;
  plan.theta_list = theta_list;
  plan.eps_list = eps_list;
  plan.n = n;
  plan.base_seed = base_seed;
  validate(plan);

  DefectMapTable table;
  table.n = n;
  const std::size_t cols = eps_list.size();
  table.cells.resize(theta_list.size() * cols);

  detail::parallel_for(
      static_cast<int>(theta_list.size()), threads, [&](int j) {
        const double theta = theta_list[static_cast<std::size_t>(j)];
        const Grid g = build_grid(theta, n);
        SolverConfig cfg;
        cfg.theta = theta;
        cfg.n = n;
        HalfCellField warm = gl_profile_field(g);
        for (std::size_t c = 0; c < cols; ++c) {
          DefectMapCell cell;
          cell.theta = theta;
          cell.epsilon = eps_list[c];
          if (cell.epsilon == 0.0) {
            cell.exact_family = true;
            cell.converged = true;
            cell.defect_min = defect_constant(ThetaFamily{theta});
            cell.certified = cell.defect_min > 0.0;
          } else {
            cfg.epsilon = cell.epsilon;
            const MinimizeOutcome out = solve_from(warm, cfg);
            if (out.newton_converged) {
              cell.converged = true;
              const PotentialParams p{cell.epsilon};
              const VerificationReport rep = verify(extend(out.field, g, p), p);
              cell.defect_min = rep.defect_min;
              cell.certified = rep.counterexample_certified;
              warm = out.field;
            }
          }
          table.cells[static_cast<std::size_t>(j) * cols + c] = cell;
        }
      });
  return table;
}

}  // namespace modica
