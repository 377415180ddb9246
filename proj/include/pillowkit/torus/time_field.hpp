#pragma once

#include <functional>
#include <memory>

#include "pillowkit/torus/fourier.hpp"
#include "pillowkit/torus/geometry.hpp"

namespace pillowkit::torus {

using FieldFn = std::function<Vec2(double t, const Vec2& p)>;
/// An isotopy psi(t, p); the returned point may be any lift.
using Isotopy = std::function<Vec2(double t, const Vec2& p)>;

/// A time-dependent vector field X_t on T^2, t in [0, 1], together with the
/// grid on which its norms and Lipschitz constant are measured.
struct TimeField {
  FieldFn eval;
  int grid_n = 64;
  int time_samples = 21;
  bool equivariant = false;
  bool autonomous = false;

  Vec2 operator()(double t, const Vec2& p) const { return eval(t, p); }
  GridField slice(double t, int n) const;
};

TimeField autonomous_field(FourierField field, int grid_n = 64);
/// X_t = (1 - t) A + t B.
TimeField blend_field(FourierField a, FourierField b, int grid_n = 64, int time_samples = 21);

/// Central-difference Jacobian of p -> field(t, p).
Mat2 fd_jacobian(const FieldFn& field, double t, const Vec2& p, double h = 1e-5);

/// Max over grid points and time samples of the finite-difference Jacobian
/// operator norm, times 1.1.
double estimate_lipschitz(const TimeField& field);

/// Largest finite-difference divergence over the grid and time samples.
double max_divergence(const TimeField& field);

struct DeriveOptions {
  int grid_n = 32;
  int time_samples = 11;
  bool equivariant = false;
  int max_newton = 50;
  double newton_tol = 1e-12;
  double identity_tol = 1e-9;
};

/// Newton inverse of p -> psi(t, p) on the torus. Throws InverseFailed.
Vec2 invert_isotopy(const Isotopy& psi, double t, const Vec2& q, int max_iter = 50, double tol = 1e-12,
                    int fallback_grid = 32);

/// The field X_t(q) = d/dt psi(t, .) evaluated at psi_t^{-1}(q). Checks that
/// psi(0, .) is the identity and that every grid point is invertible at every
/// sampled time; throws std::invalid_argument / InverseFailed otherwise.
TimeField derive_time_field(Isotopy psi, const DeriveOptions& options = {});

}  // namespace pillowkit::torus
