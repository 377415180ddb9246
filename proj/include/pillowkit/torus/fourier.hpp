#pragma once

#include <functional>
#include <vector>

#include "pillowkit/torus/geometry.hpp"
#include "pillowkit/torus/shearing.hpp"

namespace pillowkit::torus {

/// Values of a vector field on the uniform N x N periodic grid, stored
/// row-major with index i * N + j at the point (2 pi i / N, 2 pi j / N).
struct GridField {
  int n = 0;
  std::vector<Vec2> values;

  static GridField sample(int n, const std::function<Vec2(const Vec2&)>& field);
  Vec2 point(int i, int j) const { return {kTwoPi * i / n, kTwoPi * j / n}; }
  const Vec2& at(int i, int j) const { return values[static_cast<std::size_t>(i) * n + j]; }
};

/// One Fourier mode of a divergence-free field:
///   sin(k.p) c_sin d + cos(k.p) c_cos d,   d = (k2, -k1) / gcd(k)
/// so that the amplitude vectors are multiples of the primitive integer
/// direction d orthogonal to k. The representative of +-k has its first
/// nonzero entry positive.
struct FourierTerm {
  Int2 k;
  double c_sin = 0.0;
  double c_cos = 0.0;

  long frequency() const { return gcd(k.a, k.b); }
  Int2 direction() const {
    const long g = frequency();
    return {k.b / g, -k.a / g};
  }
  Int2 normal() const {
    const long g = frequency();
    return {k.a / g, k.b / g};
  }
  Vec2 u_sin() const { return c_sin * to_vec(direction()); }
  Vec2 u_cos() const { return c_cos * to_vec(direction()); }
  /// u . k evaluated in integer arithmetic; identically zero by construction.
  double divergence_sin() const { return c_sin * static_cast<double>(idot(direction(), k)); }
  double divergence_cos() const { return c_cos * static_cast<double>(idot(direction(), k)); }

  Vec2 operator()(const Vec2& p) const;
  Mat2 jacobian(const Vec2& p) const;
  /// Exact sup norm of the term.
  double sup_norm() const;
  /// The term as a shearing vector field f(<p, w>) v.
  ShearingMap as_shearing() const;
};

/// True if k is the canonical representative of {k, -k}.
bool is_canonical_wavevector(const Int2& k);

/// A finite Fourier series of a divergence-free field on T^2. Non-equivariant
/// fields may carry a constant mean (a translation).
class FourierField {
 public:
  FourierField() = default;
  FourierField(std::vector<FourierTerm> terms, Vec2 mean = {});

  /// Build from raw amplitude vectors. u_sin and u_cos are projected onto
  /// the direction orthogonal to k; the largest removed component is
  /// returned through `residual` when non-null.
  struct RawTerm {
    Int2 k;
    Vec2 u_sin;
    Vec2 u_cos;
  };
  static FourierField from_raw(const std::vector<RawTerm>& raw, Vec2 mean = {},
                               double* residual = nullptr);

  const std::vector<FourierTerm>& terms() const { return terms_; }
  const Vec2& mean() const { return mean_; }
  bool equivariant() const;
  bool empty() const { return terms_.empty() && mean_ == Vec2{}; }

  Vec2 operator()(const Vec2& p) const;
  Mat2 jacobian(const Vec2& p) const;

  /// Terms with |k1|, |k2| <= radius.
  FourierField truncated(int radius) const;
  /// Shearing vector fields whose sum is this field; the mean contributes
  /// constant-profile shears along (1,0) and (0,1).
  std::vector<ShearingMap> shearing_terms() const;

 private:
  std::vector<FourierTerm> terms_;
  Vec2 mean_{};
};

struct Decomposition {
  FourierField field;
  /// Largest amplitude component along k removed by the projection.
  double projection_residual = 0.0;
};

/// Trapezoidal (uniform periodic) quadrature of the Fourier coefficient
/// integrals for every |k1|, |k2| <= radius. Requires samples.n >= 4 radius.
/// Throws DivergenceTooLarge when the projection residual exceeds div_tol.
/// With `equivariant` set, cosine parts and the mean are dropped.
Decomposition fourier_decompose(const GridField& samples, int radius, double div_tol = 1e-8,
                                bool equivariant = false, double drop_tol = 1e-14);

}  // namespace pillowkit::torus
