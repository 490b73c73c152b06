#pragma once

#include <numbers>
#include <stdexcept>
#include <vector>

namespace modica {

// Uniform mesh on the quarter period [0, L], L = pi/(2 theta). The node
// count n is required to be odd so the midpoint L/2, the fixed point of the
// reflection x -> L - x, is itself a node.
struct Grid {
  double theta = 0.0;
  int n = 0;              // node count, odd
  double L = 0.0;         // pi / (2 theta)
  double h = 0.0;         // L / (n - 1)
  std::vector<double> x;  // x[i] = i h, x.back() = L exactly
};

inline Grid build_grid(double theta, int n) {
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("theta out of range (0, 1)");
  if (n < 3) throw std::invalid_argument("grid needs at least 3 nodes");
  if (n % 2 == 0) throw std::invalid_argument("grid node count must be odd");
  Grid g;
  g.theta = theta;
  g.n = n;
  g.L = std::numbers::pi / (2.0 * theta);
  g.h = g.L / static_cast<double>(n - 1);
  g.x.resize(n);
  for (int i = 0; i < n; ++i) g.x[i] = static_cast<double>(i) * g.h;
  g.x.back() = g.L;
  return g;
}

// Node index of the reflected point L - x[i].
inline int mirror_index(int i, const Grid& g) {
  if (i < 0 || i >= g.n) throw std::out_of_range("node index out of range");
  return g.n - 1 - i;
}

// Scalar field v on the quarter grid encoding the symmetric pair
//   u1(x) = v(x),  u2(x) = v(L - x).
// The pinned value v[n-1] = 0 encodes both boundary conditions u1(L) = 0 and
// u2(0) = 0; v[0] is free (Neumann end for u1, matched by u2'(L) = 0).
struct HalfCellField {
  std::vector<double> v;
};

inline void check_field(const HalfCellField& f, const Grid& g) {
  if (static_cast<int>(f.v.size()) != g.n)
    throw std::invalid_argument("field length does not match grid");
}

inline void check_dirichlet(const HalfCellField& f, const Grid& g) {
  check_field(f, g);
  if (f.v.back() != 0.0)
    throw std::invalid_argument("Dirichlet constraint violated at x = L");
}

// Three-point second derivative. The Neumann end i = 0 uses the reflection
// ghost value v[-1] = v[1]; the Dirichlet node carries no stencil, entry 0.
inline std::vector<double> second_derivative(const HalfCellField& f, const Grid& g) {
  check_field(f, g);
  const auto& v = f.v;
  const double ih2 = 1.0 / (g.h * g.h);
  std::vector<double> d(g.n, 0.0);
  d[0] = (2.0 * v[1] - 2.0 * v[0]) * ih2;
  for (int i = 1; i + 1 < g.n; ++i)
    d[i] = (v[i - 1] - 2.0 * v[i] + v[i + 1]) * ih2;
  return d;
}

inline double node_weight(int i, const Grid& g) {
  return (i == 0 || i == g.n - 1) ? 0.5 * g.h : g.h;
}

// Composite trapezoid rule with weights (h/2, h, ..., h, h/2).
inline double trapezoid(const std::vector<double>& f, const Grid& g) {
  if (static_cast<int>(f.size()) != g.n)
    throw std::invalid_argument("integrand length does not match grid");
  double s = 0.5 * (f.front() + f.back());
  for (int i = 1; i + 1 < g.n; ++i) s += f[i];
  return g.h * s;
}

}  // namespace modica
