#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "pillowkit/torus/time_field.hpp"

namespace pillowkit::torus {

struct MoserOptions {
  int grid = 128;  // spectral grid M
  int time_samples = 11;
  double bump_width = 0.5;  // radians around y = pi
  bool equivariant = false;
  int flow_steps = 32;  // RK4 steps in s
  double form_floor = 0.1;
  double poisson_tol = 1e-9;
  double fd_step = 1e-5;
};

/// Grid data of one time t: the area density F of the rescaled isotopy and
/// the corrected primitive alpha~ = a~ dx + b~ dy with d alpha~ = F - 1.
struct MoserSlice {
  double t = 0.0;
  int m = 0;
  std::vector<double> density;
  std::vector<double> a_tilde;
  std::vector<double> b_tilde;
  double poisson_residual = 0.0;
  double min_density = 0.0;
  /// max |a~| along y = pi, zero up to rounding.
  double curve_dx_residual = 0.0;

  /// X_s = (b~, -a~) / (s + (1 - s) F), by periodic 6-point interpolation.
  Vec2 field(double s, const Vec2& p) const;
};

/// The corrected isotopy psi(t) = chi(t) o phi_1(t)^{-1} where chi(t) = phi(t)
/// o h_t rescales normal to c = {y = pi}. Slices at the sampled times are
/// built eagerly; other times are built on first use and cached.
class MoserIsotopy {
 public:
  MoserIsotopy(Isotopy phi, MoserOptions options);

  Vec2 operator()(double t, const Vec2& p) const;
  /// chi(t, p) = phi(t, h_t(p)).
  Vec2 rescaled(double t, const Vec2& p) const;
  /// h_t(p).
  Vec2 dilation(double t, const Vec2& p) const;
  /// phi_1(t)^{-1}(q) by integrating X_s backwards from s = 1 to 0.
  Vec2 inverse_correction(double t, const Vec2& q) const;
  /// phi_1(t)(p).
  Vec2 correction(double t, const Vec2& p) const;

  const std::vector<double>& times() const { return times_; }
  std::shared_ptr<const MoserSlice> slice(double t) const;
  const MoserOptions& options() const { return options_; }
  const Isotopy& original() const { return phi_; }

 private:
  std::shared_ptr<const MoserSlice> build(double t) const;
  double density_on_curve(double t, double x) const;

  Isotopy phi_;
  MoserOptions options_;
  std::vector<double> times_;
  mutable std::mutex mutex_;
  mutable std::map<double, std::shared_ptr<const MoserSlice>> cache_;
};

/// Throws DegenerateForm when a slice density drops below form_floor.
std::shared_ptr<MoserIsotopy> moser_correct(Isotopy phi, const MoserOptions& options = {});

struct MoserReport {
  double area_defect = 0.0;  // max |det D psi - 1|
  double curve_distance = 0.0;  // max Hausdorff distance psi(t, c) vs phi(t, c)
  double equivariance_defect = 0.0;  // max |psi(t, -p) + psi(t, p)| mod 2pi
  double poisson_residual = 0.0;
  double max_deviation = 0.0;  // max |psi - phi|
};

MoserReport check_moser(const MoserIsotopy& psi, int grid = 32, int curve_samples = 1024);

/// Symmetric Hausdorff distance between two closed polylines on T^2.
double hausdorff_closed(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

/// Finite-difference Jacobian determinant of p -> psi(t, p) on the torus.
double isotopy_det(const Isotopy& psi, double t, const Vec2& p, double h = 1e-5);

}  // namespace pillowkit::torus
