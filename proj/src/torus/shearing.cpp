#include "pillowkit/torus/shearing.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace pillowkit::torus {

double Mat2::op_norm() const {
  // sqrt of the largest eigenvalue of M^T M
  const double p = a * a + c * c;
  const double q = a * b + c * d;
  const double r = b * b + d * d;
  const double tr = p + r;
  const double disc = std::sqrt(std::max(0.0, (p - r) * (p - r) + 4.0 * q * q));
  return std::sqrt(std::max(0.0, 0.5 * (tr + disc)));
}

long gcd(long a, long b) {
  a = std::labs(a);
  b = std::labs(b);
  while (b != 0) {
    const long t = a % b;
    a = b;
    b = t;
  }
  return a;
}

namespace {

std::vector<Harmonic> normalize(std::vector<Harmonic> hs, bool allow_zero_freq) {
  std::sort(hs.begin(), hs.end(), [](const Harmonic& l, const Harmonic& r) { return l.m < r.m; });
  std::vector<Harmonic> out;
  for (const auto& h : hs) {
    if (h.m < 0 || (h.m == 0 && !allow_zero_freq)) {
      throw std::invalid_argument("shearing profile: invalid harmonic frequency");
    }
    if (h.coeff == 0.0) continue;
    if (!out.empty() && out.back().m == h.m) {
      out.back().coeff += h.coeff;
    } else {
      out.push_back(h);
    }
  }
  std::erase_if(out, [](const Harmonic& h) { return h.coeff == 0.0; });
  return out;
}

}  // namespace

ShearingProfile::ShearingProfile(std::vector<Harmonic> sines, std::vector<Harmonic> cosines)
    : sines_(normalize(std::move(sines), false)), cosines_(normalize(std::move(cosines), true)) {}

double ShearingProfile::operator()(double s) const {
  double acc = 0.0;
  for (const auto& h : sines_) acc += h.coeff * std::sin(static_cast<double>(h.m) * s);
  for (const auto& h : cosines_) acc += h.coeff * std::cos(static_cast<double>(h.m) * s);
  return acc;
}

double ShearingProfile::derivative(double s) const {
  double acc = 0.0;
  for (const auto& h : sines_) {
    const double m = static_cast<double>(h.m);
    acc += h.coeff * m * std::cos(m * s);
  }
  for (const auto& h : cosines_) {
    const double m = static_cast<double>(h.m);
    acc -= h.coeff * m * std::sin(m * s);
  }
  return acc;
}

double ShearingProfile::sup_bound() const {
  // sin and cos at the same frequency combine to an amplitude sqrt(c^2 + d^2)
  double acc = 0.0;
  std::size_t j = 0;
  for (const auto& h : sines_) {
    while (j < cosines_.size() && cosines_[j].m < h.m) acc += std::fabs(cosines_[j++].coeff);
    if (j < cosines_.size() && cosines_[j].m == h.m) {
      acc += std::hypot(h.coeff, cosines_[j++].coeff);
    } else {
      acc += std::fabs(h.coeff);
    }
  }
  while (j < cosines_.size()) acc += std::fabs(cosines_[j++].coeff);
  return acc;
}

ShearingProfile ShearingProfile::scaled(double factor) const {
  ShearingProfile out = *this;
  for (auto& h : out.sines_) h.coeff *= factor;
  for (auto& h : out.cosines_) h.coeff *= factor;
  if (factor == 0.0) {
    out.sines_.clear();
    out.cosines_.clear();
  }
  return out;
}

ShearingProfile ShearingProfile::reflected() const {
  ShearingProfile out = *this;
  for (auto& h : out.sines_) h.coeff = -h.coeff;
  return out;
}

ShearingMap::ShearingMap(Int2 direction, ShearingProfile profile)
    : ShearingMap(direction, Int2{-direction.b, direction.a}, std::move(profile)) {}

ShearingMap::ShearingMap(Int2 direction, Int2 normal, ShearingProfile profile)
    : v_(direction), w_(normal), f_(std::move(profile)) {
  if (v_.a == 0 && v_.b == 0) throw std::invalid_argument("shearing map: zero direction");
  if (idot(v_, w_) != 0) throw std::invalid_argument("shearing map: normal not orthogonal to direction");
  if (gcd(w_.a, w_.b) != 1) throw std::invalid_argument("shearing map: normal is not primitive");
}

Mat2 ShearingMap::field_jacobian(const Vec2& p) const {
  const double fp = f_.derivative(linear_form(p));
  const double va = static_cast<double>(v_.a), vb = static_cast<double>(v_.b);
  const double wa = static_cast<double>(w_.a), wb = static_cast<double>(w_.b);
  return {fp * va * wa, fp * va * wb, fp * vb * wa, fp * vb * wb};
}

Mat2 ShearingMap::jacobian(const Vec2& p, double time) const {
  Mat2 j = field_jacobian(p);
  j.a = 1.0 + time * j.a;
  j.b = time * j.b;
  j.c = time * j.c;
  j.d = 1.0 + time * j.d;
  return j;
}

}  // namespace pillowkit::torus
