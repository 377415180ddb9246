#include "pillowkit/knots/su2.hpp"

#include <algorithm>

namespace pillowkit::knots {

SU2 SU2::exp(double vx, double vy, double vz) {
  const double a = std::sqrt(vx * vx + vy * vy + vz * vz);
  // sin(a)/a with a series near 0.
  const double s = a < 1e-8 ? 1.0 - a * a / 6.0 : std::sin(a) / a;
  return SU2{std::cos(a), s * vx, s * vy, s * vz}.normalized();
}

SU2 SU2::normalized() const {
  const double n = norm();
  return {w / n, x / n, y / n, z / n};
}

double SU2::angle() const {
  const double im = std::sqrt(x * x + y * y + z * z);
  return std::atan2(im, w);
}

double distance(const SU2& a, const SU2& b) {
  const double dw = a.w - b.w, dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dw * dw + dx * dx + dy * dy + dz * dz);
}

double commutator_distance(const SU2& a, const SU2& b) { return distance(a * b, b * a); }

}  // namespace pillowkit::knots
