#pragma once

#include <vector>

#include "pillowkit/torus/geometry.hpp"

namespace pillowkit::torus {

/// One harmonic c * sin(m s) or d * cos(m s).
struct Harmonic {
  long m = 1;
  double coeff = 0.0;
  friend bool operator==(const Harmonic&, const Harmonic&) = default;
};

/// A 2pi-periodic profile f(s) = sum c_m sin(m s) + sum d_m cos(m s).
///
/// Sine frequencies are positive, cosine frequencies nonnegative. A profile
/// with no cosine harmonics is odd, which is what makes a shearing commute
/// with the involution.
class ShearingProfile {
 public:
  ShearingProfile() = default;
  ShearingProfile(std::vector<Harmonic> sines, std::vector<Harmonic> cosines = {});

  static ShearingProfile sine(long m, double c) { return ShearingProfile({{m, c}}); }

  const std::vector<Harmonic>& sines() const { return sines_; }
  const std::vector<Harmonic>& cosines() const { return cosines_; }

  bool is_odd() const { return cosines_.empty(); }
  bool is_zero() const { return sines_.empty() && cosines_.empty(); }

  double operator()(double s) const;
  double derivative(double s) const;
  /// Upper bound on sup |f| (sum of |coefficients|, exact for a single harmonic
  /// pair of equal frequency).
  double sup_bound() const;

  ShearingProfile scaled(double factor) const;
  /// s -> f(-s).
  ShearingProfile reflected() const;

  friend bool operator==(const ShearingProfile&, const ShearingProfile&) = default;

 private:
  std::vector<Harmonic> sines_;
  std::vector<Harmonic> cosines_;
};

/// The map p -> p + f(<p, w>) v on T^2, with v, w integral and orthogonal.
class ShearingMap {
 public:
  ShearingMap() = default;
  /// Normal defaults to w = (-v.b, v.a).
  ShearingMap(Int2 direction, ShearingProfile profile);
  ShearingMap(Int2 direction, Int2 normal, ShearingProfile profile);

  const Int2& direction() const { return v_; }
  const Int2& normal() const { return w_; }
  const ShearingProfile& profile() const { return f_; }

  double linear_form(const Vec2& p) const {
    return static_cast<double>(w_.a) * p.x + static_cast<double>(w_.b) * p.y;
  }

  /// Shear of an unreduced lift; no canonicalization.
  Vec2 apply_lifted(const Vec2& p, double time = 1.0) const {
    const double s = time * f_(linear_form(p));
    return {p.x + s * static_cast<double>(v_.a), p.y + s * static_cast<double>(v_.b)};
  }
  TorusPoint apply(const TorusPoint& p, double time = 1.0) const {
    return TorusPoint(apply_lifted(p.vec(), time));
  }

  /// The vector field f(<p,w>) v whose time-t flow is apply(., t).
  Vec2 field(const Vec2& p) const {
    const double s = f_(linear_form(p));
    return {s * static_cast<double>(v_.a), s * static_cast<double>(v_.b)};
  }
  /// Jacobian of the vector field: f'(l) v w^T.
  Mat2 field_jacobian(const Vec2& p) const;
  /// Jacobian of apply(., time): I + time f'(l) v w^T. Determinant is 1.
  Mat2 jacobian(const Vec2& p, double time = 1.0) const;

  ShearingMap inverse() const { return ShearingMap(v_, w_, f_.scaled(-1.0)); }

 private:
  Int2 v_{1, 0};
  Int2 w_{0, 1};
  ShearingProfile f_;
};

/// Free-function form used by the CLI and tests.
inline TorusPoint apply_shearing(const ShearingMap& map, const TorusPoint& p) { return map.apply(p); }

long gcd(long a, long b);

}  // namespace pillowkit::torus
