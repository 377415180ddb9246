#include "pillowkit/torus/flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pillowkit::torus {

namespace {

Vec2 rk4_step(const FieldFn& f, double t, const Vec2& p, double h) {
  const Vec2 k1 = f(t, p);
  const Vec2 k2 = f(t + 0.5 * h, p + (0.5 * h) * k1);
  const Vec2 k3 = f(t + 0.5 * h, p + (0.5 * h) * k2);
  const Vec2 k4 = f(t + h, p + h * k3);
  return p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Vec2 rk4_flow(const FieldFn& field, Vec2 p, double t0, double t1, int steps) {
  if (steps <= 0) throw std::invalid_argument("rk4_flow: steps must be positive");
  const double h = (t1 - t0) / steps;
  for (int i = 0; i < steps; ++i) p = rk4_step(field, t0 + i * h, p, h);
  return p;
}

std::vector<Vec2> rk4_trajectory(const FieldFn& field, Vec2 p, std::span<const double> times, double max_step) {
  std::vector<Vec2> out;
  out.reserve(times.size());
  double t = 0.0;
  for (double target : times) {
    if (target < t) throw std::invalid_argument("rk4_trajectory: times must be sorted");
    const double span = target - t;
    if (span > 0.0) {
      const int steps = std::max(1, static_cast<int>(std::ceil(span / max_step)));
      p = rk4_flow(field, p, t, target, steps);
      t = target;
    }
    out.push_back(p);
  }
  return out;
}

double grid_sup_norm(const FieldFn& field, double t, int n, bool half_shift) {
  const double off = half_shift ? 0.5 : 0.0;
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2 p{kTwoPi * (i + off) / n, kTwoPi * (j + off) / n};
      best = std::max(best, norm(field(t, p)));
    }
  }
  return best;
}

Vec2 compose_shear_flows(std::span<const ShearingMap> terms, double s, Vec2 p) {
  for (const auto& w : terms) p = w.apply_lifted(p, s);
  return p;
}

double splitting_constant(std::span<const ShearingMap> terms, double s_max, int grid_n, int s_samples) {
  const std::size_t m = terms.size();
  if (m <= 1) return 0.0;
  std::vector<Vec2> q(m + 1);
  double best = 0.0;
  for (int si = 1; si <= s_samples; ++si) {
    const double s = s_max * static_cast<double>(si) / s_samples;
    for (int i = 0; i < grid_n; ++i) {
      for (int j = 0; j < grid_n; ++j) {
        q[0] = {kTwoPi * i / grid_n, kTwoPi * j / grid_n};
        for (std::size_t r = 0; r < m; ++r) q[r + 1] = terms[r].apply_lifted(q[r], s);
        // Accumulate D(phi_{W_{m-1}} o ... o phi_{W_{r+1}}) W_r(q_r) from the back.
        Mat2 acc;  // identity
        Vec2 e{};
        Vec2 z{};
        for (std::size_t rr = m; rr-- > 0;) {
          e += acc * terms[rr].field(q[rr]);
          acc = acc * terms[rr].jacobian(q[rr], s);
          z += terms[rr].field(q[m]);
        }
        best = std::max(best, norm(e - z) / s);
      }
    }
  }
  return 1.1 * best;
}

}  // namespace pillowkit::torus
