#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace modica {

// Closed-form periodic orbits of the uncoupled (eps = 0) system
//   u'' = grad W_0(u),  W_0(u) = 1/4 (1 - |u|^2)^2:
//   u_theta(x) = sqrt(1 - theta^2) (cos(theta x), sin(theta x)),
// with period 2 pi / theta. These serve as reference solutions: initial
// guesses, convergence anchors, and the exact branch the eps > 0 minimizers
// approach as eps -> 0.
struct ThetaFamily {
  double theta = 0.0;  // in (0, 1)

  double amplitude() const { return std::sqrt(1.0 - theta * theta); }
  double quarter_period() const { return std::numbers::pi / (2.0 * theta); }
  double period() const { return 2.0 * std::numbers::pi / theta; }
};

inline ThetaFamily make_theta_family(double theta) {
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("theta out of range (0, 1)");
  return ThetaFamily{theta};
}

inline std::array<double, 2> u_theta(double x, const ThetaFamily& f) {
  const double a = f.amplitude();
  return {a * std::cos(f.theta * x), a * std::sin(f.theta * x)};
}

inline std::array<double, 2> u_theta_prime(double x, const ThetaFamily& f) {
  const double a = f.amplitude();
  return {-a * f.theta * std::sin(f.theta * x),
          a * f.theta * std::cos(f.theta * x)};
}

// Value of the first integral 1/2 |u_theta'|^2 - W_0(u_theta), constant in x.
// Positive exactly for theta in (0, sqrt(2/3)): on that range the orbit
// violates the gradient bound 1/2 |u'|^2 <= W(u) everywhere.
inline double defect_constant(const ThetaFamily& f) {
  const double t2 = f.theta * f.theta;
  return 0.25 * t2 * (2.0 - 3.0 * t2);
}

// int_0^L [ 1/2 |u_theta'|^2 + W_0(u_theta) ] dx with L = pi/(2 theta).
// Both integrands are constant on the orbit: |u_theta'|^2 = theta^2 (1 -
// theta^2) and W_0(u_theta) = theta^4 / 4.
inline double gl_energy_on_quarter_period(const ThetaFamily& f) {
  const double t2 = f.theta * f.theta;
  return f.quarter_period() * (0.5 * t2 - 0.25 * t2 * t2);
}

}  // namespace modica
