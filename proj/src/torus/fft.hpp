#pragma once

// Thin RAII wrappers around FFTW for square periodic grids.

#include <fftw3.h>

#include <complex>
#include <vector>

namespace pillowkit::torus::detail {

/// Forward real-to-complex transform of an n x n row-major grid. Output has
/// n x (n/2 + 1) entries, F(k1, k2) = sum_{ij} v_ij exp(-i (k1 x_i + k2 y_j)).
class RealFft2d {
 public:
  explicit RealFft2d(int n);
  ~RealFft2d();
  RealFft2d(const RealFft2d&) = delete;
  RealFft2d& operator=(const RealFft2d&) = delete;

  int n() const { return n_; }
  int half() const { return n_ / 2 + 1; }

  /// Forward transform of `in` (size n*n).
  void forward(const std::vector<double>& in, std::vector<std::complex<double>>& out);
  /// Unnormalized inverse; `in` has n*(n/2+1) entries. Output scaled by n^2.
  void inverse(const std::vector<std::complex<double>>& in, std::vector<double>& out);

  /// Spectrum lookup for any integer wavevector with |k| < n / 2.
  static std::complex<double> lookup(const std::vector<std::complex<double>>& spec, int n,
                                     long k1, long k2);

 private:
  int n_;
  double* real_;
  fftw_complex* cplx_;
  fftw_plan fwd_;
  fftw_plan inv_;
};

}  // namespace pillowkit::torus::detail
