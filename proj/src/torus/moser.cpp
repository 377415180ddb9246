#include "pillowkit/torus/moser.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "fft.hpp"
#include "pillowkit/errors.hpp"

namespace pillowkit::torus {

namespace {

constexpr int kStencil = 6;

// Periodic 6-point Lagrange interpolation of a row-major m x m grid.
struct Stencil {
  int base = 0;
  double w[kStencil] = {};

  Stencil(double coord, int m) {
    const double u = coord / (kTwoPi / m);
    const double fl = std::floor(u);
    const double frac = u - fl;
    base = static_cast<int>(fl) - 2;
    for (int k = 0; k < kStencil; ++k) {
      double num = 1.0, den = 1.0;
      for (int j = 0; j < kStencil; ++j) {
        if (j == k) continue;
        num *= frac - (j - 2);
        den *= static_cast<double>(k - j);
      }
      w[k] = num / den;
    }
  }
  int index(int k, int m) const { return ((base + k) % m + m) % m; }
};

double interpolate(const std::vector<double>& g, int m, const Stencil& sx, const Stencil& sy) {
  double acc = 0.0;
  for (int a = 0; a < kStencil; ++a) {
    const std::size_t row = static_cast<std::size_t>(sx.index(a, m)) * m;
    double inner = 0.0;
    for (int b = 0; b < kStencil; ++b) inner += sy.w[b] * g[row + static_cast<std::size_t>(sy.index(b, m))];
    acc += sx.w[a] * inner;
  }
  return acc;
}

}  // namespace

double isotopy_det(const Isotopy& psi, double t, const Vec2& p, double h) {
  const Vec2 dx = torus_delta(psi(t, {p.x - h, p.y}), psi(t, {p.x + h, p.y})) * (0.5 / h);
  const Vec2 dy = torus_delta(psi(t, {p.x, p.y - h}), psi(t, {p.x, p.y + h})) * (0.5 / h);
  return dx.x * dy.y - dy.x * dx.y;
}

Vec2 MoserSlice::field(double s, const Vec2& p) const {
  const Stencil sx(p.x, m), sy(p.y, m);
  const double f = interpolate(density, m, sx, sy);
  const double rho = s + (1.0 - s) * f;
  return {interpolate(b_tilde, m, sx, sy) / rho, -interpolate(a_tilde, m, sx, sy) / rho};
}

MoserIsotopy::MoserIsotopy(Isotopy phi, MoserOptions options) : phi_(std::move(phi)), options_(options) {
  if (options_.grid < 8 || options_.grid % 2 != 0) throw std::invalid_argument("moser grid must be even and >= 8");
  const int ts = std::max(options_.time_samples, 1);
  for (int q = 0; q < ts; ++q) times_.push_back(ts > 1 ? static_cast<double>(q) / (ts - 1) : 0.0);
  for (double t : times_) slice(t);
}

double MoserIsotopy::density_on_curve(double t, double x) const {
  const double h = options_.fd_step;
  const double f = isotopy_det(phi_, t, {x, kPi}, h);
  if (!options_.equivariant) return f;
  return 0.5 * (f + isotopy_det(phi_, t, {-x, kPi}, h));
}

Vec2 MoserIsotopy::dilation(double t, const Vec2& p) const {
  const double u = wrap_signed(p.y - kPi);
  const double w = options_.bump_width;
  const double bump = u * std::exp(-(u / w) * (u / w));
  if (bump == 0.0) return p;
  const double a = 1.0 / density_on_curve(t, p.x);
  return {p.x, p.y + (a - 1.0) * bump};
}

Vec2 MoserIsotopy::rescaled(double t, const Vec2& p) const { return phi_(t, dilation(t, p)); }

std::shared_ptr<const MoserSlice> MoserIsotopy::slice(double t) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(t); it != cache_.end()) return it->second;
  }
  auto built = build(t);
  std::lock_guard lock(mutex_);
  return cache_.try_emplace(t, std::move(built)).first->second;
}

std::shared_ptr<const MoserSlice> MoserIsotopy::build(double t) const {
  const int m = options_.grid;
  const std::size_t mm = static_cast<std::size_t>(m) * m;
  auto out = std::make_shared<MoserSlice>();
  out->t = t;
  out->m = m;

  const Isotopy chi = [this](double tt, const Vec2& p) { return rescaled(tt, p); };
  std::vector<double> f(mm);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) f[static_cast<std::size_t>(i) * m + j] = isotopy_det(chi, t, {kTwoPi * i / m, kTwoPi * j / m}, options_.fd_step);
  }
  if (options_.equivariant) {
    std::vector<double> sym(mm);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const std::size_t mirror = static_cast<std::size_t>((m - i) % m) * m + static_cast<std::size_t>((m - j) % m);
        sym[static_cast<std::size_t>(i) * m + j] = 0.5 * (f[static_cast<std::size_t>(i) * m + j] + f[mirror]);
      }
    }
    f = std::move(sym);
  }
  out->min_density = *std::min_element(f.begin(), f.end());
  if (!(out->min_density >= options_.form_floor)) {
    std::ostringstream msg;
    msg << "area density " << out->min_density << " below form floor " << options_.form_floor << " at t=" << t;
    throw DegenerateForm(msg.str());
  }

  // Delta gamma = F - 1 with zero mean; alpha = -gamma_y dx + gamma_x dy has
  // d alpha = F - 1 = -d omega_s / ds.
  std::vector<double> src(mm);
  double mean = 0.0;
  for (std::size_t i = 0; i < mm; ++i) mean += f[i] - 1.0;
  mean /= static_cast<double>(mm);
  for (std::size_t i = 0; i < mm; ++i) src[i] = f[i] - 1.0 - mean;

  detail::RealFft2d fft(m);
  std::vector<std::complex<double>> spec, gx, gy, lap;
  fft.forward(src, spec);
  const int h = fft.half();
  gx.assign(spec.size(), {});
  gy.assign(spec.size(), {});
  lap.assign(spec.size(), {});
  const double norm_factor = 1.0 / static_cast<double>(mm);
  for (int r = 0; r < m; ++r) {
    const int k1 = r <= m / 2 ? r : r - m;
    for (int c = 0; c < h; ++c) {
      const int k2 = c;
      const std::size_t idx = static_cast<std::size_t>(r) * h + c;
      const double kk = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
      if (kk == 0.0) continue;
      const std::complex<double> g = -spec[idx] / kk * norm_factor;
      const bool nyq1 = 2 * k1 == m || 2 * k1 == -m;
      const bool nyq2 = 2 * k2 == m;
      lap[idx] = -kk * g;
      if (!nyq1) gx[idx] = std::complex<double>(0.0, k1) * g;
      if (!nyq2) gy[idx] = std::complex<double>(0.0, k2) * g;
    }
  }
  std::vector<double> gamma_x, gamma_y, lap_gamma;
  fft.inverse(gx, gamma_x);
  fft.inverse(gy, gamma_y);
  fft.inverse(lap, lap_gamma);
  for (std::size_t i = 0; i < mm; ++i) out->poisson_residual = std::max(out->poisson_residual, std::fabs(lap_gamma[i] - src[i]));

  out->density = std::move(f);
  out->a_tilde.resize(mm);
  out->b_tilde.resize(mm);
  const int jc = m / 2;  // y = pi
  for (int i = 0; i < m; ++i) {
    const double on_curve = -gamma_y[static_cast<std::size_t>(i) * m + jc];
    for (int j = 0; j < m; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * m + j;
      out->a_tilde[idx] = -gamma_y[idx] - on_curve;
      out->b_tilde[idx] = gamma_x[idx];
    }
  }
  for (int i = 0; i < m; ++i) {
    out->curve_dx_residual = std::max(out->curve_dx_residual, std::fabs(out->a_tilde[static_cast<std::size_t>(i) * m + jc]));
  }
  return out;
}

namespace {

Vec2 rk4_in_s(const MoserSlice& sl, Vec2 p, double s0, double s1, int steps) {
  const double hs = (s1 - s0) / steps;
  for (int k = 0; k < steps; ++k) {
    const double s = s0 + k * hs;
    const Vec2 k1 = sl.field(s, p);
    const Vec2 k2 = sl.field(s + 0.5 * hs, p + (0.5 * hs) * k1);
    const Vec2 k3 = sl.field(s + 0.5 * hs, p + (0.5 * hs) * k2);
    const Vec2 k4 = sl.field(s + hs, p + hs * k3);
    p = p + (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return p;
}

}  // namespace

Vec2 MoserIsotopy::correction(double t, const Vec2& p) const {
  return rk4_in_s(*slice(t), p, 0.0, 1.0, options_.flow_steps);
}

Vec2 MoserIsotopy::inverse_correction(double t, const Vec2& q) const {
  return rk4_in_s(*slice(t), q, 1.0, 0.0, options_.flow_steps);
}

Vec2 MoserIsotopy::operator()(double t, const Vec2& p) const { return rescaled(t, inverse_correction(t, p)); }

std::shared_ptr<MoserIsotopy> moser_correct(Isotopy phi, const MoserOptions& options) {
  return std::make_shared<MoserIsotopy>(std::move(phi), options);
}

namespace {

double point_segment(const Vec2& q, const Vec2& a, const Vec2& b) {
  const Vec2 d = torus_delta(a, b);
  const Vec2 rel = torus_delta(a, q);
  const double len2 = dot(d, d);
  const double s = len2 > 0.0 ? std::clamp(dot(rel, d) / len2, 0.0, 1.0) : 0.0;
  return norm(rel - s * d);
}

double directed(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  double worst = 0.0;
  for (const auto& q : a) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < b.size(); ++i) best = std::min(best, point_segment(q, b[i], b[(i + 1) % b.size()]));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

double hausdorff_closed(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  return std::max(directed(a, b), directed(b, a));
}

MoserReport check_moser(const MoserIsotopy& psi, int grid, int curve_samples) {
  MoserReport r;
  const Isotopy as_fn = [&psi](double t, const Vec2& p) { return psi(t, p); };
  for (double t : psi.times()) {
    const auto sl = psi.slice(t);
    r.poisson_residual = std::max(r.poisson_residual, sl->poisson_residual);
    for (int i = 0; i < grid; ++i) {
      for (int j = 0; j < grid; ++j) {
        const Vec2 p{kTwoPi * (i + 0.5) / grid, kTwoPi * (j + 0.5) / grid};
        r.area_defect = std::max(r.area_defect, std::fabs(isotopy_det(as_fn, t, p) - 1.0));
        const Vec2 img = psi(t, p);
        r.max_deviation = std::max(r.max_deviation, torus_distance(img, psi.original()(t, p)));
        if (psi.options().equivariant) {
          r.equivariance_defect = std::max(r.equivariance_defect, torus_distance(-img, psi(t, -p)));
        }
      }
    }
    std::vector<Vec2> a, b;
    a.reserve(static_cast<std::size_t>(curve_samples));
    b.reserve(static_cast<std::size_t>(curve_samples));
    for (int k = 0; k < curve_samples; ++k) {
      const Vec2 c{kTwoPi * k / curve_samples, kPi};
      a.push_back(psi(t, c));
      b.push_back(psi.original()(t, c));
    }
    r.curve_distance = std::max(r.curve_distance, hausdorff_closed(a, b));
  }
  return r;
}

}  // namespace pillowkit::torus
