#include "pillowkit/torus/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "fft.hpp"
#include "pillowkit/errors.hpp"

namespace pillowkit::torus {

GridField GridField::sample(int n, const std::function<Vec2(const Vec2&)>& field) {
  GridField g;
  g.n = n;
  g.values.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g.values[static_cast<std::size_t>(i) * n + j] = field(g.point(i, j));
  }
  return g;
}

bool is_canonical_wavevector(const Int2& k) { return k.a > 0 || (k.a == 0 && k.b > 0); }

Vec2 FourierTerm::operator()(const Vec2& p) const {
  const double s = static_cast<double>(k.a) * p.x + static_cast<double>(k.b) * p.y;
  const double amp = c_sin * std::sin(s) + c_cos * std::cos(s);
  return amp * to_vec(direction());
}

Mat2 FourierTerm::jacobian(const Vec2& p) const {
  const double s = static_cast<double>(k.a) * p.x + static_cast<double>(k.b) * p.y;
  const double amp = c_sin * std::cos(s) - c_cos * std::sin(s);
  const Vec2 d = to_vec(direction());
  const double ka = static_cast<double>(k.a), kb = static_cast<double>(k.b);
  return {amp * d.x * ka, amp * d.x * kb, amp * d.y * ka, amp * d.y * kb};
}

double FourierTerm::sup_norm() const { return std::hypot(c_sin, c_cos) * norm(to_vec(direction())); }

ShearingMap FourierTerm::as_shearing() const {
  const long g = frequency();
  std::vector<Harmonic> s, c;
  if (c_sin != 0.0) s.push_back({g, c_sin});
  if (c_cos != 0.0) c.push_back({g, c_cos});
  return ShearingMap(direction(), normal(), ShearingProfile(std::move(s), std::move(c)));
}

FourierField::FourierField(std::vector<FourierTerm> terms, Vec2 mean) : mean_(mean) {
  std::map<Int2, FourierTerm> merged;
  for (const auto& t : terms) {
    if (!is_canonical_wavevector(t.k)) {
      throw std::invalid_argument("fourier term: wavevector is not the canonical representative");
    }
    auto [it, inserted] = merged.try_emplace(t.k, t);
    if (!inserted) {
      it->second.c_sin += t.c_sin;
      it->second.c_cos += t.c_cos;
    }
  }
  for (const auto& [k, t] : merged) {
    if (t.c_sin != 0.0 || t.c_cos != 0.0) terms_.push_back(t);
  }
}

FourierField FourierField::from_raw(const std::vector<RawTerm>& raw, Vec2 mean, double* residual) {
  std::vector<FourierTerm> terms;
  double worst = 0.0;
  for (const auto& r : raw) {
    if (r.k.a == 0 && r.k.b == 0) {
      mean += r.u_cos;
      continue;
    }
    Int2 k = r.k;
    Vec2 us = r.u_sin;
    const Vec2 uc = r.u_cos;
    if (!is_canonical_wavevector(k)) {
      k = {-k.a, -k.b};
      us = -us;
    }
    FourierTerm t{k, 0.0, 0.0};
    const Vec2 d = to_vec(t.direction());
    const Vec2 kv = to_vec(k);
    const double dd = dot(d, d);
    t.c_sin = dot(us, d) / dd;
    t.c_cos = dot(uc, d) / dd;
    worst = std::max({worst, std::fabs(dot(us, kv)) / norm(kv), std::fabs(dot(uc, kv)) / norm(kv)});
    terms.push_back(t);
  }
  if (residual != nullptr) *residual = worst;
  return FourierField(std::move(terms), mean);
}

bool FourierField::equivariant() const {
  if (mean_ != Vec2{}) return false;
  return std::all_of(terms_.begin(), terms_.end(), [](const FourierTerm& t) { return t.c_cos == 0.0; });
}

Vec2 FourierField::operator()(const Vec2& p) const {
  Vec2 acc = mean_;
  for (const auto& t : terms_) acc += t(p);
  return acc;
}

Mat2 FourierField::jacobian(const Vec2& p) const {
  Mat2 acc{0.0, 0.0, 0.0, 0.0};
  for (const auto& t : terms_) {
    const Mat2 j = t.jacobian(p);
    acc.a += j.a;
    acc.b += j.b;
    acc.c += j.c;
    acc.d += j.d;
  }
  return acc;
}

FourierField FourierField::truncated(int radius) const {
  std::vector<FourierTerm> kept;
  for (const auto& t : terms_) {
    if (std::labs(t.k.a) <= radius && std::labs(t.k.b) <= radius) kept.push_back(t);
  }
  return FourierField(std::move(kept), mean_);
}

std::vector<ShearingMap> FourierField::shearing_terms() const {
  std::vector<ShearingMap> out;
  if (mean_.x != 0.0) out.emplace_back(Int2{1, 0}, ShearingProfile({}, {{0, mean_.x}}));
  if (mean_.y != 0.0) out.emplace_back(Int2{0, 1}, ShearingProfile({}, {{0, mean_.y}}));
  for (const auto& t : terms_) out.push_back(t.as_shearing());
  return out;
}

Decomposition fourier_decompose(const GridField& samples, int radius, double div_tol, bool equivariant,
                                double drop_tol) {
  const int n = samples.n;
  if (radius < 1) throw std::invalid_argument("fourier_decompose: radius must be positive");
  if (n < 4 * radius) throw std::invalid_argument("fourier_decompose: grid too coarse for radius");

  const std::size_t nn = static_cast<std::size_t>(n) * n;
  std::vector<double> comp(nn);
  std::vector<std::complex<double>> spec1, spec2;
  detail::RealFft2d fft(n);
  for (std::size_t i = 0; i < nn; ++i) comp[i] = samples.values[i].x;
  fft.forward(comp, spec1);
  for (std::size_t i = 0; i < nn; ++i) comp[i] = samples.values[i].y;
  fft.forward(comp, spec2);

  // (1 / 2pi^2) * integral ~ (1 / 2pi^2) * (4 pi^2 / n^2) * sum = (2 / n^2) * sum
  const double scale = 2.0 / static_cast<double>(nn);
  std::vector<FourierField::RawTerm> raw;
  double largest = 0.0;
  for (long k1 = 0; k1 <= radius; ++k1) {
    for (long k2 = -radius; k2 <= radius; ++k2) {
      const Int2 k{k1, k2};
      if (!is_canonical_wavevector(k)) continue;
      const auto f1 = detail::RealFft2d::lookup(spec1, n, k1, k2);
      const auto f2 = detail::RealFft2d::lookup(spec2, n, k1, k2);
      FourierField::RawTerm t{k, {-scale * f1.imag(), -scale * f2.imag()}, {scale * f1.real(), scale * f2.real()}};
      if (equivariant) t.u_cos = {};
      largest = std::max({largest, norm(t.u_sin), norm(t.u_cos)});
      raw.push_back(t);
    }
  }
  Vec2 mean{};
  if (!equivariant) {
    mean = {spec1[0].real() / static_cast<double>(nn), spec2[0].real() / static_cast<double>(nn)};
  }

  // Drop numerically absent modes so that an exactly finite field decomposes
  // into exactly its own terms.
  const double floor = drop_tol * std::max(1.0, largest);
  std::erase_if(raw, [&](const FourierField::RawTerm& t) { return norm(t.u_sin) <= floor && norm(t.u_cos) <= floor; });
  if (std::fabs(mean.x) <= floor) mean.x = 0.0;
  if (std::fabs(mean.y) <= floor) mean.y = 0.0;

  Decomposition out;
  out.field = FourierField::from_raw(raw, mean, &out.projection_residual);
  if (out.projection_residual > div_tol) {
    std::ostringstream msg;
    msg << "projection residual " << out.projection_residual << " exceeds div_tol " << div_tol;
    throw DivergenceTooLarge(msg.str());
  }
  return out;
}

}  // namespace pillowkit::torus
