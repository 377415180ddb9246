#pragma once

#include <array>
#include <cmath>

namespace pillowkit::knots {

/// Unit quaternion w + x i + y j + z k. The matrix diag(e^{ia}, e^{-ia})
/// is cos a + sin a i.
struct SU2 {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static SU2 identity() { return {}; }
  /// exp(a i): the maximal-torus element of angle a.
  static SU2 diag(double a) { return {std::cos(a), std::sin(a), 0.0, 0.0}; }
  /// exp of the imaginary vector (vx, vy, vz).
  static SU2 exp(double vx, double vy, double vz);

  SU2 inverse() const { return {w, -x, -y, -z}; }
  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
  SU2 normalized() const;
  /// Rotation angle a in [0, pi] with w = cos a.
  double angle() const;
  double trace() const { return 2.0 * w; }

  friend SU2 operator*(const SU2& a, const SU2& b) {
    return SU2{a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z, a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
               a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x, a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w}
        .normalized();
  }
  friend SU2 operator-(const SU2& a) { return {-a.w, -a.x, -a.y, -a.z}; }
  std::array<double, 4> coords() const { return {w, x, y, z}; }
};

/// Operator norm of the difference of the 2x2 matrices (equal to the
/// quaternion distance).
double distance(const SU2& a, const SU2& b);
/// |ab - ba|.
double commutator_distance(const SU2& a, const SU2& b);
/// c a c^{-1}.
inline SU2 conjugate(const SU2& c, const SU2& a) { return c * a * c.inverse(); }

}  // namespace pillowkit::knots
