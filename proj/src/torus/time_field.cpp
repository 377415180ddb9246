#include "pillowkit/torus/time_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "pillowkit/errors.hpp"

namespace pillowkit::torus {

GridField TimeField::slice(double t, int n) const {
  return GridField::sample(n, [&](const Vec2& p) { return eval(t, p); });
}

TimeField autonomous_field(FourierField field, int grid_n) {
  TimeField tf;
  tf.equivariant = field.equivariant();
  tf.autonomous = true;
  tf.grid_n = grid_n;
  tf.time_samples = 1;
  auto shared = std::make_shared<const FourierField>(std::move(field));
  tf.eval = [shared](double, const Vec2& p) { return (*shared)(p); };
  return tf;
}

TimeField blend_field(FourierField a, FourierField b, int grid_n, int time_samples) {
  TimeField tf;
  tf.equivariant = a.equivariant() && b.equivariant();
  tf.grid_n = grid_n;
  tf.time_samples = time_samples;
  auto fa = std::make_shared<const FourierField>(std::move(a));
  auto fb = std::make_shared<const FourierField>(std::move(b));
  tf.eval = [fa, fb](double t, const Vec2& p) { return (1.0 - t) * (*fa)(p) + t * (*fb)(p); };
  return tf;
}

Mat2 fd_jacobian(const FieldFn& field, double t, const Vec2& p, double h) {
  const Vec2 dx = (field(t, {p.x + h, p.y}) - field(t, {p.x - h, p.y})) * (0.5 / h);
  const Vec2 dy = (field(t, {p.x, p.y + h}) - field(t, {p.x, p.y - h})) * (0.5 / h);
  return {dx.x, dy.x, dx.y, dy.y};
}

namespace {

std::vector<double> sample_times(const TimeField& f) {
  if (f.autonomous || f.time_samples <= 1) return {0.0};
  std::vector<double> ts(static_cast<std::size_t>(f.time_samples));
  for (int m = 0; m < f.time_samples; ++m) ts[static_cast<std::size_t>(m)] = static_cast<double>(m) / (f.time_samples - 1);
  return ts;
}

}  // namespace

double estimate_lipschitz(const TimeField& field) {
  double best = 0.0;
  const int n = field.grid_n;
  for (double t : sample_times(field)) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const Vec2 p{kTwoPi * i / n, kTwoPi * j / n};
        best = std::max(best, fd_jacobian(field.eval, t, p).op_norm());
      }
    }
  }
  return 1.1 * best;
}

double max_divergence(const TimeField& field) {
  double best = 0.0;
  const int n = field.grid_n;
  for (double t : sample_times(field)) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const Vec2 p{kTwoPi * i / n, kTwoPi * j / n};
        const Mat2 jac = fd_jacobian(field.eval, t, p);
        best = std::max(best, std::fabs(jac.a + jac.d));
      }
    }
  }
  return best;
}

namespace {

Mat2 isotopy_jacobian(const Isotopy& psi, double t, const Vec2& p, double h = 1e-6) {
  const Vec2 dx = torus_delta(psi(t, {p.x - h, p.y}), psi(t, {p.x + h, p.y})) * (0.5 / h);
  const Vec2 dy = torus_delta(psi(t, {p.x, p.y - h}), psi(t, {p.x, p.y + h})) * (0.5 / h);
  return {dx.x, dy.x, dx.y, dy.y};
}

bool newton_inverse(const Isotopy& psi, double t, const Vec2& q, Vec2& p, int max_iter, double tol) {
  Vec2 r = torus_delta(q, psi(t, p));
  double rn = norm(r);
  for (int it = 0; it < max_iter; ++it) {
    if (rn <= tol) return true;
    const Mat2 j = isotopy_jacobian(psi, t, p);
    const double det = j.det();
    if (!std::isfinite(det) || std::fabs(det) < 1e-14) return false;
    const Vec2 step{(j.d * r.x - j.b * r.y) / det, (-j.c * r.x + j.a * r.y) / det};
    double lambda = 1.0;
    bool improved = false;
    for (int half = 0; half < 30; ++half) {
      const Vec2 cand = p - lambda * step;
      const Vec2 rc = torus_delta(q, psi(t, cand));
      const double rcn = norm(rc);
      if (rcn < rn || rcn <= tol) {
        p = cand;
        r = rc;
        rn = rcn;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) return rn <= 1e3 * tol;
  }
  return rn <= tol;
}

}  // namespace

Vec2 invert_isotopy(const Isotopy& psi, double t, const Vec2& q, int max_iter, double tol, int fallback_grid) {
  // Initial guess q - (psi(t, q) - q) is exact to first order for small motions.
  Vec2 p = q - torus_delta(q, psi(t, q));
  if (newton_inverse(psi, t, q, p, max_iter, tol)) return TorusPoint(p).vec();

  // Fall back to the grid sample whose image is nearest to q.
  double best = std::numeric_limits<double>::infinity();
  Vec2 start = q;
  for (int i = 0; i < fallback_grid; ++i) {
    for (int j = 0; j < fallback_grid; ++j) {
      const Vec2 g{kTwoPi * i / fallback_grid, kTwoPi * j / fallback_grid};
      const double d = torus_distance(psi(t, g), q);
      if (d < best) {
        best = d;
        start = g;
      }
    }
  }
  p = start;
  if (newton_inverse(psi, t, q, p, max_iter, tol)) return TorusPoint(p).vec();
  std::ostringstream msg;
  msg << "Newton inverse failed at t=" << t << " q=(" << q.x << ", " << q.y << ")";
  throw InverseFailed(msg.str());
}

TimeField derive_time_field(Isotopy psi, const DeriveOptions& options) {
  const int n = options.grid_n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2 p{kTwoPi * i / n, kTwoPi * j / n};
      if (torus_distance(psi(0.0, p), p) > options.identity_tol) {
        throw std::invalid_argument("derive_time_field: psi(0, .) is not the identity");
      }
    }
  }
  for (int m = 0; m < options.time_samples; ++m) {
    const double t = options.time_samples > 1 ? static_cast<double>(m) / (options.time_samples - 1) : 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        invert_isotopy(psi, t, {kTwoPi * i / n, kTwoPi * j / n}, options.max_newton, options.newton_tol, n);
      }
    }
  }

  TimeField tf;
  tf.grid_n = n;
  tf.time_samples = options.time_samples;
  tf.equivariant = options.equivariant;
  const int max_newton = options.max_newton;
  const double tol = options.newton_tol;
  tf.eval = [psi = std::move(psi), max_newton, tol, n](double t, const Vec2& q) {
    const Vec2 p = invert_isotopy(psi, t, q, max_newton, tol, n);
    constexpr double h = 1e-5;
    if (t - h < 0.0) {
      const Vec2 a = psi(t, p);
      const Vec2 d1 = torus_delta(a, psi(t + h, p));
      const Vec2 d2 = torus_delta(a, psi(t + 2.0 * h, p));
      return (4.0 * d1 - d2) * (0.5 / h);
    }
    if (t + h > 1.0) {
      const Vec2 a = psi(t, p);
      const Vec2 d1 = torus_delta(a, psi(t - h, p));
      const Vec2 d2 = torus_delta(a, psi(t - 2.0 * h, p));
      return (4.0 * d1 - d2) * (-0.5 / h);
    }
    return torus_delta(psi(t - h, p), psi(t + h, p)) * (0.5 / h);
  };
  return tf;
}

}  // namespace pillowkit::torus
