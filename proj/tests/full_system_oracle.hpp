#pragma once

// Independent solver for the full two-component system on the quarter grid,
// used as a cross-check of the reduced (mirror-encoded) solver. It keeps
// both components as unknowns, pins u2(0) = u1(L) = 0, minimizes the same
// discrete functional written from scratch (its own potential formulas,
// energy, gradient, and Hessian assembly), and projects every iterate onto
// the symmetric subspace u2(x) = u1(L - x). Agreement between the two
// routes is a genuine dual-path test: only the linear-algebra backend is
// shared.

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace full_oracle {

struct Pair {
  std::vector<double> u1, u2;
};

struct Result {
  Pair u;
  double energy = 0.0;
  double grad_inf = 0.0;
  bool converged = false;
  int descent_iters = 0;
  int newton_iters = 0;
};

inline double W(double a, double b, double eps) {
  const double q = 1.0 - a * a - b * b;
  return q * q / 4.0 + eps * a * a * b * b / 2.0;
}

inline double W1(double a, double b, double eps) {
  return -(1.0 - a * a - b * b) * a + eps * a * b * b;
}

inline double W11(double a, double b, double eps) {
  return -(1.0 - a * a - b * b) + 2.0 * a * a + eps * b * b;
}

inline double W12(double a, double b, double eps) {
  return 2.0 * a * b * (1.0 + eps);
}

class Solver {
 public:
  Solver(double theta, double eps, int n, double L)
      : theta_(theta), eps_(eps), n_(n), h_(L / (n - 1)) {}

  double energy(const Pair& u) const {
    double kin = 0.0;
    for (int i = 0; i + 1 < n_; ++i) {
      const double d1 = u.u1[i + 1] - u.u1[i];
      const double d2 = u.u2[i + 1] - u.u2[i];
      kin += d1 * d1 + d2 * d2;
    }
    kin /= 2.0 * h_;
    double pot = 0.5 * (W(u.u1[0], u.u2[0], eps_) + W(u.u1[n_ - 1], u.u2[n_ - 1], eps_));
    for (int i = 1; i + 1 < n_; ++i) pot += W(u.u1[i], u.u2[i], eps_);
    return kin + pot * h_;
  }

  // Gradient in all nodal values; pinned entries (u2 at 0, u1 at n-1) are
  // forced to zero so steps never move them.
  Pair gradient(const Pair& u) const {
    Pair g;
    g.u1.assign(n_, 0.0);
    g.u2.assign(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
      const double w = (i == 0 || i == n_ - 1) ? h_ / 2.0 : h_;
      double k1, k2;
      if (i == 0) {
        k1 = (u.u1[0] - u.u1[1]) / h_;
        k2 = (u.u2[0] - u.u2[1]) / h_;
      } else if (i == n_ - 1) {
        k1 = (u.u1[n_ - 1] - u.u1[n_ - 2]) / h_;
        k2 = (u.u2[n_ - 1] - u.u2[n_ - 2]) / h_;
      } else {
        k1 = (2.0 * u.u1[i] - u.u1[i - 1] - u.u1[i + 1]) / h_;
        k2 = (2.0 * u.u2[i] - u.u2[i - 1] - u.u2[i + 1]) / h_;
      }
      g.u1[i] = k1 + w * W1(u.u1[i], u.u2[i], eps_);
      g.u2[i] = k2 + w * W1(u.u2[i], u.u1[i], eps_);
    }
    g.u1[n_ - 1] = 0.0;
    g.u2[0] = 0.0;
    return g;
  }

  // Orthogonal projection onto the symmetric subspace u2 = u1 reflected.
  void project(Pair& u) const {
    for (int i = 0; i < n_; ++i) {
      const int m = n_ - 1 - i;
      if (i > m) break;
      const double a = 0.5 * (u.u1[i] + u.u2[m]);
      const double b = 0.5 * (u.u1[m] + u.u2[i]);
      u.u1[i] = a;
      u.u2[m] = a;
      u.u1[m] = b;
      u.u2[i] = b;
    }
    u.u2[0] = 0.0;
    u.u1[n_ - 1] = 0.0;
  }

  double grad_inf(const Pair& g) const {
    double m = 0.0;
    for (int i = 0; i < n_; ++i) {
      m = std::max(m, std::abs(g.u1[i]));
      m = std::max(m, std::abs(g.u2[i]));
    }
    return m;
  }

  Result run(Pair start, double descent_tol, double newton_tol, int max_descent,
             int max_newton) const {
    project(start);
    Result res;
    res.u = std::move(start);

    Pair g = gradient(res.u);
    double gn = grad_inf(g);
    double E = energy(res.u);
    Pair u_prev, g_prev;
    double alpha = h_ * h_;

    for (; res.descent_iters < max_descent && gn > descent_tol; ++res.descent_iters) {
      if (!u_prev.u1.empty()) {
        double ss = 0.0, sy = 0.0;
        for (int i = 0; i < n_; ++i) {
          const double s1 = res.u.u1[i] - u_prev.u1[i];
          const double s2 = res.u.u2[i] - u_prev.u2[i];
          const double y1 = g.u1[i] - g_prev.u1[i];
          const double y2 = g.u2[i] - g_prev.u2[i];
          ss += s1 * s1 + s2 * s2;
          sy += s1 * y1 + s2 * y2;
        }
        alpha = sy > 0.0 ? ss / sy : 1e4 * h_ * h_;
      }
      alpha = std::min(std::max(alpha, 1e-8 * h_ * h_), 1e4 * h_ * h_);

      double gg = 0.0;
      for (int i = 0; i < n_; ++i)
        gg += g.u1[i] * g.u1[i] + g.u2[i] * g.u2[i];

      u_prev = res.u;
      g_prev = g;

      double a = alpha;
      bool accepted = false;
      Pair trial;
      for (int bt = 0; bt < 60; ++bt) {
        trial = u_prev;
        for (int i = 0; i < n_; ++i) {
          trial.u1[i] -= a * g.u1[i];
          trial.u2[i] -= a * g.u2[i];
        }
        project(trial);
        const double E_new = energy(trial);
        if (E_new <= E - 1e-4 * a * gg) {
          E = E_new;
          accepted = true;
          break;
        }
        a *= 0.5;
      }
      if (!accepted) break;
      res.u = std::move(trial);
      g = gradient(res.u);
      gn = grad_inf(g);
    }

    // Newton on the pinned full system, projecting each iterate.
    for (; res.newton_iters < max_newton && gn > newton_tol; ++res.newton_iters) {
      if (!newton_once(res.u)) break;
      g = gradient(res.u);
      gn = grad_inf(g);
    }
    // one extra step at the floor, mirroring the deep-polish convention
    if (gn <= newton_tol) {
      res.converged = true;
      Pair save = res.u;
      const double gn_save = gn;
      if (newton_once(res.u)) {
        g = gradient(res.u);
        const double gn2 = grad_inf(g);
        if (gn2 < gn) {
          gn = gn2;
        } else {
          res.u = std::move(save);
          gn = gn_save;
        }
      } else {
        res.u = std::move(save);
      }
    }
    res.energy = energy(res.u);
    res.grad_inf = gn;
    return res;
  }

 private:
  double gradientEntry1(const Pair& u, int i) const {
    const double w = (i == 0 || i == n_ - 1) ? h_ / 2.0 : h_;
    double k;
    if (i == 0)
      k = (u.u1[0] - u.u1[1]) / h_;
    else
      k = (2.0 * u.u1[i] - u.u1[i - 1] - u.u1[i + 1]) / h_;
    return k + w * W1(u.u1[i], u.u2[i], eps_);
  }

  double gradientEntry2(const Pair& u, int i) const {
    const double w = (i == 0 || i == n_ - 1) ? h_ / 2.0 : h_;
    double k;
    if (i == n_ - 1)
      k = (u.u2[n_ - 1] - u.u2[n_ - 2]) / h_;
    else
      k = (2.0 * u.u2[i] - u.u2[i - 1] - u.u2[i + 1]) / h_;
    return k + w * W1(u.u2[i], u.u1[i], eps_);
  }

  // Single Newton step used for the final polish; returns false if the
  // factorization fails.
  bool newton_once(Pair& u) const {
    const int m1 = n_ - 1;
    const int dim = 2 * (n_ - 1);
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd rhs(dim);
    for (int i = 0; i < n_; ++i) {
      const double w = (i == 0 || i == n_ - 1) ? h_ / 2.0 : h_;
      const double a11 = W11(u.u1[i], u.u2[i], eps_);
      const double a22 = W11(u.u2[i], u.u1[i], eps_);
      const double a12 = W12(u.u1[i], u.u2[i], eps_);
      if (i < n_ - 1) {
        const int r = i;
        trips.emplace_back(r, r, (i == 0 ? 1.0 : 2.0) / h_ + w * a11);
        if (i > 0) trips.emplace_back(r, i - 1, -1.0 / h_);
        if (i + 1 < n_ - 1) trips.emplace_back(r, i + 1, -1.0 / h_);
        if (i >= 1) trips.emplace_back(r, m1 + i - 1, w * a12);
        rhs[r] = -gradientEntry1(u, i);
      }
      if (i >= 1) {
        const int r = m1 + i - 1;
        trips.emplace_back(r, r, (i == n_ - 1 ? 1.0 : 2.0) / h_ + w * a22);
        if (i >= 2) trips.emplace_back(r, m1 + i - 2, -1.0 / h_);
        if (i + 1 < n_) trips.emplace_back(r, m1 + i, -1.0 / h_);
        if (i < n_ - 1) trips.emplace_back(r, i, w * a12);
        rhs[r] = -gradientEntry2(u, i);
      }
    }
    Eigen::SparseMatrix<double> J(dim, dim);
    J.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) return false;
    const Eigen::VectorXd delta = lu.solve(rhs);
    if (!delta.allFinite()) return false;
    for (int i = 0; i < n_ - 1; ++i) u.u1[i] += delta[i];
    for (int i = 1; i < n_; ++i) u.u2[i] += delta[m1 + i - 1];
    project(u);
    return true;
  }

  double theta_;
  double eps_;
  int n_;
  double h_;
};

}  // namespace full_oracle
