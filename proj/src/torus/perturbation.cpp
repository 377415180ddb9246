#include "pillowkit/torus/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <tuple>

#include "pillowkit/errors.hpp"

namespace pillowkit::torus {

namespace {

// Returns g and sets x, y with a x + b y = g.
long ext_gcd(long a, long b, long& x, long& y) {
  long x0 = 1, y0 = 0, x1 = 0, y1 = 1;
  while (b != 0) {
    const long q = a / b;
    std::tie(a, b) = std::make_tuple(b, a - q * b);
    std::tie(x0, x1) = std::make_tuple(x1, x0 - q * x1);
    std::tie(y0, y1) = std::make_tuple(y1, y0 - q * y1);
  }
  if (a < 0) {
    a = -a;
    x0 = -x0;
    y0 = -y0;
  }
  x = x0;
  y = y0;
  return a;
}

}  // namespace

SL2Z complete_sl2(long a, long b) {
  long x = 0, y = 0;
  if (ext_gcd(a, b, x, y) != 1) {
    std::ostringstream msg;
    msg << "direction (" << a << ", " << b << ") is not primitive";
    throw NonPrimitiveDirection(msg.str());
  }
  // All solutions: c = -y + a t, d = x + b t.
  long centre = 0;
  if (a != 0) {
    centre = static_cast<long>(std::llround(static_cast<double>(y) / static_cast<double>(a)));
  } else {
    centre = static_cast<long>(std::llround(-static_cast<double>(x) / static_cast<double>(b)));
  }
  SL2Z best{};
  auto key = [](const SL2Z& m) { return std::make_tuple(std::labs(m.c), m.d < 0 ? 1 : 0, std::labs(m.d)); };
  bool have = false;
  for (long t = centre - 3; t <= centre + 3; ++t) {
    const SL2Z m{a, b, -y + a * t, x + b * t};
    if (!have || key(m) < key(best)) {
      best = m;
      have = true;
    }
  }
  return best;
}

ShearingProfile antiderivative(const ShearingProfile& f, double* linear) {
  std::vector<Harmonic> sines, cosines;
  double slope = 0.0;
  for (const auto& h : f.sines()) cosines.push_back({h.m, -h.coeff / static_cast<double>(h.m)});
  for (const auto& h : f.cosines()) {
    if (h.m == 0) {
      slope += h.coeff;
    } else {
      sines.push_back({h.m, h.coeff / static_cast<double>(h.m)});
    }
  }
  if (linear != nullptr) *linear = slope;
  return ShearingProfile(std::move(sines), std::move(cosines));
}

Vec2 PerturbationStep::apply(const Vec2& p, double fraction) const {
  const double l = -static_cast<double>(matrix.b) * p.x + static_cast<double>(matrix.a) * p.y;
  const double s = fraction * profile_f(l);
  return {p.x + s * static_cast<double>(matrix.a), p.y + s * static_cast<double>(matrix.b)};
}

std::vector<PerturbationStep> program_to_perturbation(const ShearingProgram& program) {
  std::vector<PerturbationStep> out;
  out.reserve(program.step_count());
  for (const auto& block : program.blocks()) {
    std::vector<PerturbationStep> cycle;
    for (const auto& map : block.maps) {
      const Int2 v = map.direction();
      PerturbationStep step;
      step.matrix = complete_sl2(v.a, v.b);
      // The coordinate formula uses l = <p, (-b, a)>; a map stored with the
      // opposite normal sees f(-s).
      const Int2 w = map.normal();
      ShearingProfile f = map.profile();
      if (w == Int2{v.b, -v.a}) {
        f = f.reflected();
      } else if (w != Int2{-v.b, v.a}) {
        throw NonPrimitiveDirection("normal is not a unit multiple of the rotated direction");
      }
      step.profile_f = f.scaled(block.speed * block.step_duration);
      step.profile_g = antiderivative(step.profile_f, &step.g_linear);
      cycle.push_back(std::move(step));
    }
    for (long r = 0; r < block.repeat; ++r) out.insert(out.end(), cycle.begin(), cycle.end());
  }
  return out;
}

Vec2 perturbation_to_map(const std::vector<PerturbationStep>& steps, double t, Vec2 p) {
  if (steps.empty()) return p;
  const double x = std::clamp(t, 0.0, 1.0) * static_cast<double>(steps.size());
  double whole = std::floor(x);
  if (std::fabs(x - std::round(x)) < 1e-9) whole = std::round(x);
  const auto k = static_cast<std::size_t>(whole);
  const double frac = std::max(0.0, x - whole);
  for (std::size_t i = 0; i < k && i < steps.size(); ++i) p = steps[i].apply(p);
  if (k < steps.size() && frac > 0.0) p = steps[k].apply(p, frac);
  return p;
}

}  // namespace pillowkit::torus
