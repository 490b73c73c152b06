#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "modica/exact.hpp"
#include "modica/grid.hpp"
#include "modica/potential.hpp"

namespace modica {

enum class InitMode { gl_profile, random_perturbed, custom };

struct SolverConfig {
  double theta = 0.1;
  double epsilon = 0.0;
  int n = 1025;
  double descent_tol = 1e-6;   // gradient inf norm target for descent
  double newton_tol = 1e-10;   // gradient inf norm target for refinement
  int max_descent_iters = 200000;
  int max_newton_iters = 50;
  std::uint64_t seed = 0;
  InitMode init_mode = InitMode::gl_profile;
};

inline void validate(const SolverConfig& cfg) {
  if (!(cfg.theta > 0.0 && cfg.theta < 1.0))
    throw std::invalid_argument("theta out of range (0, 1)");
  if (!(cfg.epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  if (cfg.n < 3 || cfg.n % 2 == 0)
    throw std::invalid_argument("grid node count must be odd and >= 3");
  if (!(cfg.descent_tol > 0.0) || !(cfg.newton_tol > 0.0))
    throw std::invalid_argument("tolerances must be positive");
  if (!(cfg.newton_tol <= cfg.descent_tol))
    throw std::invalid_argument("newton_tol must not exceed descent_tol");
  if (cfg.max_descent_iters < 1 || cfg.max_newton_iters < 1)
    throw std::invalid_argument("iteration caps must be positive");
}

struct MinimizeOutcome {
  HalfCellField field;
  double energy = std::numeric_limits<double>::quiet_NaN();
  double grad_inf_norm = std::numeric_limits<double>::quiet_NaN();
  bool descent_converged = false;
  bool newton_converged = false;
  int descent_iterations = 0;
  int newton_iterations = 0;
  bool polished = false;
  bool interior_positive = false;
  std::string diagnostic;                 // empty unless something was flagged
  std::vector<double> descent_energies;   // accepted-step energies, monotone
  std::vector<double> newton_grad_norms;  // gradient inf norm per iteration
};

namespace detail {

inline double inf_norm(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Uniform double in [0, 1) built from the raw 64-bit stream. Distribution
// classes are implementation defined; this mapping pins the byte-for-byte
// reproducibility of seeded runs across standard libraries.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline void append_diag(std::string& diag, const std::string& msg) {
  if (msg.empty()) return;
  if (!diag.empty()) diag += "; ";
  diag += msg;
}

}  // namespace detail

// Discrete energy of an arbitrary nodal pair on the quarter grid,
//   sum_cells h [ (du1/h)^2 + (du2/h)^2 ] / 2 + trapezoid of W(u1, u2).
// The kinetic term is the exact Dirichlet energy of the piecewise linear
// interpolant; both terms are second order consistent.
inline double energy(const std::vector<double>& u1, const std::vector<double>& u2,
                     const Grid& g, const PotentialParams& p) {
  if (static_cast<int>(u1.size()) != g.n || static_cast<int>(u2.size()) != g.n)
    throw std::invalid_argument("component length does not match grid");
  double kin = 0.0;
  for (int i = 0; i + 1 < g.n; ++i) {
    const double s1 = u1[i + 1] - u1[i];
    const double s2 = u2[i + 1] - u2[i];
    kin += s1 * s1 + s2 * s2;
  }
  kin *= 0.5 / g.h;
  double pot = 0.5 * (eval_W(u1[0], u2[0], p) + eval_W(u1[g.n - 1], u2[g.n - 1], p));
  for (int i = 1; i + 1 < g.n; ++i) pot += eval_W(u1[i], u2[i], p);
  pot *= g.h;
  return kin + pot;
}

// energy() of the pair encoded by v, evaluated directly on v. The two
// components have identical cell-slope multisets, so this equals the full
// form up to summation order.
inline double reduced_energy(const HalfCellField& f, const Grid& g,
                             const PotentialParams& p) {
  check_dirichlet(f, g);
  const auto& v = f.v;
  double kin = 0.0;
  for (int i = 0; i + 1 < g.n; ++i) {
    const double s = v[i + 1] - v[i];
    kin += s * s;
  }
  kin /= g.h;
  double pot = 0.5 * (eval_W(v[0], v[g.n - 1], p) + eval_W(v[g.n - 1], v[0], p));
  for (int i = 1; i + 1 < g.n; ++i) pot += eval_W(v[i], v[g.n - 1 - i], p);
  pot *= g.h;
  return kin + pot;
}

// Exact gradient of reduced_energy in the nodal values v_0 .. v_{n-2}; the
// Dirichlet entry is 0 by convention. With m = n-1-i and trapezoid weights
// w_i this is
//   g_i = w_i [ -2 v''_i + d1 W(v_i, v_m) + d2 W(v_m, v_i) ],
// where v'' is the ghost-node second derivative. Zero gradient therefore
// means both components satisfy the three-point discrete equation
// u'' = grad W(u) at every free node, Neumann ends included.
inline std::vector<double> reduced_gradient(const HalfCellField& f, const Grid& g,
                                            const PotentialParams& p) {
  check_dirichlet(f, g);
  const auto& v = f.v;
  const auto d2 = second_derivative(f, g);
  std::vector<double> grad(g.n, 0.0);
  for (int i = 0; i + 1 < g.n; ++i) {
    const int m = g.n - 1 - i;
    const auto ga = grad_W(v[i], v[m], p);
    const auto gb = grad_W(v[m], v[i], p);
    grad[i] = node_weight(i, g) * (-2.0 * d2[i] + ga[0] + gb[1]);
  }
  return grad;
}

// Sampled closed-form orbit, the canonical initial guess. The endpoint value
// a cos(pi/2) is round-off, not zero; pin it so the encoding is exact.
inline HalfCellField gl_profile_field(const Grid& g) {
  const double a = std::sqrt(1.0 - g.theta * g.theta);
  HalfCellField f;
  f.v.resize(g.n);
  for (int i = 0; i < g.n; ++i) f.v[i] = a * std::cos(g.theta * g.x[i]);
  f.v.back() = 0.0;
  return f;
}

inline HalfCellField random_perturbed_field(const Grid& g, std::uint64_t seed) {
  HalfCellField f = gl_profile_field(g);
  std::mt19937_64 rng(seed);
  for (int i = 0; i + 1 < g.n; ++i)
    f.v[i] += 0.1 * (2.0 * detail::uniform01(rng) - 1.0);
  return f;
}

inline HalfCellField initial_field(const SolverConfig& cfg) {
  validate(cfg);
  const Grid g = build_grid(cfg.theta, cfg.n);
  switch (cfg.init_mode) {
    case InitMode::gl_profile:
      return gl_profile_field(g);
    case InitMode::random_perturbed:
      return random_perturbed_field(g, cfg.seed);
    case InitMode::custom:
      throw std::invalid_argument("custom init mode requires an explicit start field");
  }
  throw std::logic_error("unhandled init mode");
}

// Barzilai-Borwein descent with Armijo backtracking. Accepted steps never
// increase the energy; a NaN energy is a hard error, every other failure is
// reported through the outcome flags.
inline MinimizeOutcome descend(const HalfCellField& start, const SolverConfig& cfg) {
  validate(cfg);
  const Grid g = build_grid(cfg.theta, cfg.n);
  check_dirichlet(start, g);
  const PotentialParams p{cfg.epsilon};

  const double step_lo = 1e-8 * g.h * g.h;
  const double step_hi = 1e4 * g.h * g.h;
  const double armijo_c = 1e-4;

  MinimizeOutcome out;
  out.field = start;
  auto& v = out.field.v;

  double E = reduced_energy(out.field, g, p);
  if (std::isnan(E)) throw std::runtime_error("descent: energy is NaN");
  std::vector<double> grad = reduced_gradient(out.field, g, p);
  double gnorm = detail::inf_norm(grad);
  out.descent_energies.push_back(E);

  std::vector<double> v_prev, g_prev;
  HalfCellField trial;
  trial.v.resize(g.n);
  double alpha = g.h * g.h;

  int it = 0;
  for (; it < cfg.max_descent_iters && gnorm > cfg.descent_tol; ++it) {
    if (!v_prev.empty()) {
      double ss = 0.0, sy = 0.0;
      for (int i = 0; i < g.n; ++i) {
        const double s = v[i] - v_prev[i];
        const double y = grad[i] - g_prev[i];
        ss += s * s;
        sy += s * y;
      }
      alpha = sy > 0.0 ? ss / sy : step_hi;
    }
    alpha = std::clamp(alpha, step_lo, step_hi);

    const double gg = detail::dot(grad, grad);
    v_prev = v;
    g_prev = grad;

    double a = alpha;
    double E_new = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (int i = 0; i < g.n; ++i) trial.v[i] = v[i] - a * grad[i];
      E_new = reduced_energy(trial, g, p);
      if (std::isnan(E_new)) throw std::runtime_error("descent: energy is NaN");
      if (E_new <= E - armijo_c * a * gg) {
        accepted = true;
        break;
      }
      a *= 0.5;
    }
    if (!accepted) {
      out.diagnostic = "descent: line search stalled";
      break;
    }
    v.swap(trial.v);
    E = E_new;
    grad = reduced_gradient(out.field, g, p);
    gnorm = detail::inf_norm(grad);
    out.descent_energies.push_back(E);
  }

  out.descent_iterations = it;
  out.energy = E;
  out.grad_inf_norm = gnorm;
  out.descent_converged = gnorm <= cfg.descent_tol;
  if (!out.descent_converged && out.diagnostic.empty())
    out.diagnostic = "descent: iteration cap reached";
  return out;
}

// Newton refinement of a near-stationary field. The Jacobian of the free
// gradient is the kinetic tridiagonal plus the W Hessian contributions on
// the diagonal and the antidiagonal (i, n-1-i); it is assembled exactly and
// solved sparsely. Failures (singular factorization, non-finite step,
// gradient growth by 10x) flag the outcome instead of throwing.
inline MinimizeOutcome newton_refine(const HalfCellField& start, const SolverConfig& cfg) {
  validate(cfg);
  const Grid g = build_grid(cfg.theta, cfg.n);
  check_dirichlet(start, g);
  const PotentialParams p{cfg.epsilon};
  const int m = g.n - 1;  // free nodes 0 .. n-2

  MinimizeOutcome out;
  out.field = start;
  auto& v = out.field.v;

  std::vector<double> grad = reduced_gradient(out.field, g, p);
  double gnorm = detail::inf_norm(grad);
  const double gnorm0 = gnorm;
  out.newton_grad_norms.push_back(gnorm);

  std::vector<Eigen::Triplet<double>> trips;
  Eigen::SparseMatrix<double> J(m, m);
  Eigen::VectorXd rhs(m);

  // One assemble-factorize-update cycle; returns false after flagging.
  auto step = [&]() -> bool {
    trips.clear();
    for (int i = 0; i < m; ++i) {
      if (i == 0) {
        trips.emplace_back(0, 0, 2.0 / g.h);
        trips.emplace_back(0, 1, -2.0 / g.h);
      } else {
        trips.emplace_back(i, i, 4.0 / g.h);
        trips.emplace_back(i, i - 1, -2.0 / g.h);
        if (i + 1 < m) trips.emplace_back(i, i + 1, -2.0 / g.h);
      }
      const int mi = g.n - 1 - i;
      const double w = node_weight(i, g);
      const auto ha = hess_W(v[i], v[mi], p);
      const auto hb = hess_W(v[mi], v[i], p);
      trips.emplace_back(i, i, w * (ha.w11 + hb.w22));
      if (mi < m) trips.emplace_back(i, mi, w * (ha.w12 + hb.w12));
    }
    J.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) {
      out.diagnostic = "newton: jacobian factorization failed (singular)";
      return false;
    }
    for (int i = 0; i < m; ++i) rhs[i] = -grad[i];
    Eigen::VectorXd delta = lu.solve(rhs);
    if (!delta.allFinite()) {
      out.diagnostic = "newton: non-finite step, log|det J| = " +
                       std::to_string(lu.logAbsDeterminant());
      return false;
    }
    for (int i = 0; i < m; ++i) v[i] += delta[i];
    grad = reduced_gradient(out.field, g, p);
    gnorm = detail::inf_norm(grad);
    return true;
  };

  int it = 0;
  bool failed = false;
  while (gnorm > cfg.newton_tol && it < cfg.max_newton_iters) {
    if (!step()) {
      failed = true;
      break;
    }
    ++it;
    out.newton_grad_norms.push_back(gnorm);
    if (gnorm > 10.0 * std::max(gnorm0, cfg.newton_tol)) {
      out.diagnostic = "newton: divergence, gradient norm grew past 10x the entry value";
      failed = true;
      break;
    }
  }

  if (!failed && gnorm <= cfg.newton_tol && it < cfg.max_newton_iters) {
    // One extra step past the tolerance lands near the round-off floor;
    // quadratic convergence makes it essentially free. Kept only if it helps.
    const std::vector<double> v_keep = v;
    const std::vector<double> g_keep = grad;
    const double n_keep = gnorm;
    const std::string d_keep = out.diagnostic;
    if (step() && gnorm < n_keep) {
      ++it;
      out.newton_grad_norms.push_back(gnorm);
    } else {
      v = v_keep;
      grad = g_keep;
      gnorm = n_keep;
      out.diagnostic = d_keep;
    }
  }

  out.newton_iterations = it;
  out.energy = reduced_energy(out.field, g, p);
  out.grad_inf_norm = gnorm;
  out.newton_converged = !failed && gnorm <= cfg.newton_tol;
  if (!out.newton_converged && out.diagnostic.empty())
    out.diagnostic = "newton: iteration cap reached";
  return out;
}

// Interior positivity of v on (0, L); by the mirror encoding this is exactly
// interior positivity of both components of the pair.
inline bool interior_positive(const HalfCellField& f, const Grid& g) {
  check_field(f, g);
  for (int i = 1; i + 1 < g.n; ++i)
    if (!(f.v[i] > 0.0)) return false;
  return true;
}

// Normalize a converged field to the positive representative. The energy is
// even under v -> -v and invariant under taking |v| of a sign-definite
// interior, so re-solving from |v| reproduces the same energy level.
inline MinimizeOutcome polish_positive(const HalfCellField& converged,
                                       const SolverConfig& cfg) {
  validate(cfg);
  const Grid g = build_grid(cfg.theta, cfg.n);
  check_dirichlet(converged, g);
  const PotentialParams p{cfg.epsilon};

  MinimizeOutcome out;
  if (interior_positive(converged, g)) {
    out.field = converged;
    out.energy = reduced_energy(converged, g, p);
    out.grad_inf_norm = detail::inf_norm(reduced_gradient(converged, g, p));
    out.newton_converged = out.grad_inf_norm <= cfg.newton_tol;
    out.descent_converged = out.grad_inf_norm <= cfg.descent_tol;
    out.polished = false;
    out.interior_positive = true;
    return out;
  }

  HalfCellField folded;
  folded.v.resize(g.n);
  for (int i = 0; i < g.n; ++i) folded.v[i] = std::abs(converged.v[i]);
  folded.v.back() = 0.0;

  MinimizeOutcome d = descend(folded, cfg);
  out = newton_refine(d.field, cfg);
  out.descent_converged = d.descent_converged;
  out.descent_iterations = d.descent_iterations;
  out.descent_energies = std::move(d.descent_energies);
  detail::append_diag(out.diagnostic, d.diagnostic);
  out.polished = true;
  out.interior_positive = interior_positive(out.field, g);
  if (!out.interior_positive)
    detail::append_diag(out.diagnostic, "polish: interior positivity failed");
  return out;
}

// Full pipeline from an explicit start: descent, Newton refinement, positive
// normalization. Bookkeeping of all phases is merged into one outcome.
inline MinimizeOutcome solve_from(const HalfCellField& start, const SolverConfig& cfg) {
  MinimizeOutcome d = descend(start, cfg);
  MinimizeOutcome nw = newton_refine(d.field, cfg);
  MinimizeOutcome out = polish_positive(nw.field, cfg);

  out.descent_iterations += d.descent_iterations;
  out.newton_iterations += nw.newton_iterations;
  out.descent_converged = out.descent_converged && d.descent_converged;
  out.newton_converged = out.newton_converged && nw.newton_converged;

  std::vector<double> energies = std::move(d.descent_energies);
  energies.insert(energies.end(), out.descent_energies.begin(), out.descent_energies.end());
  out.descent_energies = std::move(energies);
  std::vector<double> norms = std::move(nw.newton_grad_norms);
  norms.insert(norms.end(), out.newton_grad_norms.begin(), out.newton_grad_norms.end());
  out.newton_grad_norms = std::move(norms);

  std::string diag = d.diagnostic;
  detail::append_diag(diag, nw.diagnostic);
  detail::append_diag(diag, out.diagnostic);
  out.diagnostic = std::move(diag);
  return out;
}

inline MinimizeOutcome solve(const SolverConfig& cfg) {
  return solve_from(initial_field(cfg), cfg);
}

// Independent minimizations from perturbed starts; used to probe whether the
// energy landscape funnels to a single level.
inline std::vector<MinimizeOutcome> multistart(const SolverConfig& cfg, int k) {
  if (k < 2) throw std::invalid_argument("multistart needs at least 2 runs");
  validate(cfg);
  const Grid g = build_grid(cfg.theta, cfg.n);
  std::vector<MinimizeOutcome> runs;
  runs.reserve(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j)
    runs.push_back(solve_from(
        random_perturbed_field(g, cfg.seed + static_cast<std::uint64_t>(j)), cfg));
  return runs;
}

struct MultistartSummary {
  int total = 0;
  int converged = 0;
  double energy_min = std::numeric_limits<double>::quiet_NaN();
  double energy_max = std::numeric_limits<double>::quiet_NaN();
  double energy_spread_rel = std::numeric_limits<double>::quiet_NaN();
  double max_pairwise_dist = std::numeric_limits<double>::quiet_NaN();
};

inline MultistartSummary summarize(const std::vector<MinimizeOutcome>& runs) {
  MultistartSummary s;
  s.total = static_cast<int>(runs.size());
  std::vector<const MinimizeOutcome*> ok;
  for (const auto& r : runs)
    if (r.newton_converged) ok.push_back(&r);
  s.converged = static_cast<int>(ok.size());
  if (ok.empty()) return s;
  s.energy_min = s.energy_max = ok.front()->energy;
  for (const auto* r : ok) {
    s.energy_min = std::min(s.energy_min, r->energy);
    s.energy_max = std::max(s.energy_max, r->energy);
  }
  s.energy_spread_rel =
      (s.energy_max - s.energy_min) / std::max(1.0, std::abs(s.energy_min));
  s.max_pairwise_dist = 0.0;
  for (std::size_t a = 0; a < ok.size(); ++a)
    for (std::size_t b = a + 1; b < ok.size(); ++b) {
      double d = 0.0;
      for (std::size_t i = 0; i < ok[a]->field.v.size(); ++i)
        d = std::max(d, std::abs(ok[a]->field.v[i] - ok[b]->field.v[i]));
      s.max_pairwise_dist = std::max(s.max_pairwise_dist, d);
    }
  return s;
}

// Plateau competitor: u2 rises from 0 to 1 over [0, 1], the pair swaps roles
// smoothly across the midpoint, so the total energy is bounded independently
// of theta. Transitions are C^1 cubics, keeping the discretization error of
// its energy at O(h^2). Requires L >= 4 so the plateaus exist.
inline HalfCellField build_test_function(const Grid& g) {
  if (g.L < 4.0)
    throw std::invalid_argument("theta too large for plateau competitor");
  const auto smoothstep = [](double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
  };
  const double half = 0.5 * g.L;
  HalfCellField f;
  f.v.resize(g.n);
  for (int i = 0; i < g.n; ++i) {
    const double x = g.x[i];
    double val = 0.0;
    if (x <= half - 1.0)
      val = 0.0;
    else if (x < half + 1.0)
      val = smoothstep(0.5 * (x - (half - 1.0)));
    else if (x <= g.L - 1.0)
      val = 1.0;
    else
      val = smoothstep(g.L - x);
    f.v[i] = val;
  }
  f.v.back() = 0.0;
  return f;
}

}  // namespace modica
