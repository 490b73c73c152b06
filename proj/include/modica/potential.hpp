#pragma once

#include <array>
#include <stdexcept>

namespace modica {

// Coupling strength of the two-component potential
//   W_eps(u1, u2) = 1/4 (1 - u1^2 - u2^2)^2 + eps/2 u1^2 u2^2.
// eps = 0 reduces to the radially symmetric quartic 1/4 (1 - |u|^2)^2; any
// eps > 0 breaks the rotation invariance and leaves the four minima
// (+-1, 0), (0, +-1).
struct PotentialParams {
  double epsilon = 0.0;  // >= 0
};

inline PotentialParams make_potential(double epsilon) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  return PotentialParams{epsilon};
}

inline double eval_W(double u1, double u2, const PotentialParams& p) {
  const double q = 1.0 - u1 * u1 - u2 * u2;
  return 0.25 * q * q + 0.5 * p.epsilon * u1 * u1 * u2 * u2;
}

// d W / d(u1, u2). W is symmetric under swapping u1 and u2, so
// grad_W(a, b)[1] == grad_W(b, a)[0]; tests rely on this identity.
inline std::array<double, 2> grad_W(double u1, double u2, const PotentialParams& p) {
  const double q = 1.0 - u1 * u1 - u2 * u2;
  return {-q * u1 + p.epsilon * u1 * u2 * u2,
          -q * u2 + p.epsilon * u2 * u1 * u1};
}

struct Hess2 {
  double w11 = 0.0;
  double w12 = 0.0;
  double w22 = 0.0;
};

inline Hess2 hess_W(double u1, double u2, const PotentialParams& p) {
  const double q = 1.0 - u1 * u1 - u2 * u2;
  return {-q + 2.0 * u1 * u1 + p.epsilon * u2 * u2,
          2.0 * u1 * u2 * (1.0 + p.epsilon),
          -q + 2.0 * u2 * u2 + p.epsilon * u1 * u1};
}

}  // namespace modica
