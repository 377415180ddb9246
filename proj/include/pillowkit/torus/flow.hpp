#pragma once

#include <span>
#include <vector>

#include "pillowkit/torus/fourier.hpp"
#include "pillowkit/torus/shearing.hpp"
#include "pillowkit/torus/time_field.hpp"

namespace pillowkit::torus {

/// Classical fourth-order Runge-Kutta from t0 to t1 with a fixed step count.
/// Works on lifts; the result is not reduced mod 2pi.
Vec2 rk4_flow(const FieldFn& field, Vec2 p, double t0, double t1, int steps);

/// RK4 positions at each of the (sorted) times, starting from p at t = 0.
/// `max_step` bounds the integrator step.
std::vector<Vec2> rk4_trajectory(const FieldFn& field, Vec2 p, std::span<const double> times,
                                 double max_step);

/// max over the n x n grid of |field(t, .)|.
double grid_sup_norm(const FieldFn& field, double t, int n, bool half_shift = false);

/// Composition phi^s_{W_{m-1}} o ... o phi^s_{W_0} of exact shear flows.
Vec2 compose_shear_flows(std::span<const ShearingMap> terms, double s, Vec2 p);

/// Constant C with |phi^s_Z - phi^s_{W_{m-1}} o ... o phi^s_{W_0}| <= s^2/2 C e^{Ls}
/// for s in (0, s_max], Z = sum W_r.
///
/// The derivative of the composed flow differs from Z at the composed point by
///   E(s, p) = sum_r D(later flows) W_r - Z,
/// which for two terms is s [W_0, W_1] + R(s). C is the grid maximum of
/// |E(s, p)| / s over `s_samples` values of s, times 1.1. It is zero for a
/// single term.
double splitting_constant(std::span<const ShearingMap> terms, double s_max, int grid_n = 64,
                          int s_samples = 16);

/// t |X - Y|_inf e^{L t}
inline double gronwall_bound(double t, double sup_diff, double lipschitz) {
  return t * sup_diff * std::exp(lipschitz * t);
}
/// t^2 / 2 C e^{L t}
inline double splitting_bound(double t, double c, double lipschitz) {
  return 0.5 * t * t * c * std::exp(lipschitz * t);
}

}  // namespace pillowkit::torus
