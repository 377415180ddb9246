#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace pillowkit::torus {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

struct Int2 {
  long a = 0;
  long b = 0;
  friend constexpr bool operator==(const Int2&, const Int2&) = default;
  friend constexpr auto operator<=>(const Int2&, const Int2&) = default;
};

inline long idot(const Int2& u, const Int2& v) { return u.a * v.a + u.b * v.b; }
inline Vec2 to_vec(const Int2& v) {
  return {static_cast<double>(v.a), static_cast<double>(v.b)};
}

/// Row-major 2x2 real matrix.
struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  double det() const { return a * d - b * c; }
  Vec2 operator*(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  Mat2 operator*(const Mat2& m) const {
    return {a * m.a + b * m.c, a * m.b + b * m.d, c * m.a + d * m.c, c * m.b + d * m.d};
  }
  /// Spectral norm.
  double op_norm() const;
};

/// Reduce an angle into [0, 2pi).
inline double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Signed representative of an angle difference in [-pi, pi).
inline double wrap_signed(double a) {
  double r = wrap_angle(a + kPi) - kPi;
  return r;
}

/// A point of T^2 = R^2 / 2pi Z^2, always stored in canonical form.
class TorusPoint {
 public:
  TorusPoint() = default;
  TorusPoint(double x, double y) : x_(wrap_angle(x)), y_(wrap_angle(y)) {}
  explicit TorusPoint(const Vec2& v) : TorusPoint(v.x, v.y) {}

  double x() const { return x_; }
  double y() const { return y_; }
  Vec2 vec() const { return {x_, y_}; }

  /// The hyperelliptic involution (x, y) -> (-x, -y).
  TorusPoint involution() const { return TorusPoint(-x_, -y_); }

  friend bool operator==(const TorusPoint&, const TorusPoint&) = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
};

/// Shortest lattice-shifted displacement from p to q.
inline Vec2 torus_delta(const Vec2& p, const Vec2& q) {
  return {wrap_signed(q.x - p.x), wrap_signed(q.y - p.y)};
}

/// Quotient Euclidean metric on T^2.
inline double torus_distance(const Vec2& p, const Vec2& q) { return norm(torus_delta(p, q)); }
inline double torus_distance(const TorusPoint& p, const TorusPoint& q) {
  return torus_distance(p.vec(), q.vec());
}

}  // namespace pillowkit::torus
