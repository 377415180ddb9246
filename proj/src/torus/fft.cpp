#include "fft.hpp"

#include <cstring>
#include <mutex>
#include <new>

namespace pillowkit::torus::detail {

namespace {
// Plan creation is not thread-safe in FFTW.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft2d::RealFft2d(int n) : n_(n) {
  const std::size_t rn = static_cast<std::size_t>(n) * n;
  const std::size_t cn = static_cast<std::size_t>(n) * (n / 2 + 1);
  real_ = fftw_alloc_real(rn);
  cplx_ = fftw_alloc_complex(cn);
  if (real_ == nullptr || cplx_ == nullptr) throw std::bad_alloc();
  std::lock_guard lock(planner_mutex());
  fwd_ = fftw_plan_dft_r2c_2d(n, n, real_, cplx_, FFTW_ESTIMATE);
  inv_ = fftw_plan_dft_c2r_2d(n, n, cplx_, real_, FFTW_ESTIMATE);
}

RealFft2d::~RealFft2d() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(fwd_);
  fftw_destroy_plan(inv_);
  fftw_free(real_);
  fftw_free(cplx_);
}

void RealFft2d::forward(const std::vector<double>& in, std::vector<std::complex<double>>& out) {
  const std::size_t rn = static_cast<std::size_t>(n_) * n_;
  const std::size_t cn = static_cast<std::size_t>(n_) * half();
  std::memcpy(real_, in.data(), rn * sizeof(double));
  fftw_execute(fwd_);
  out.resize(cn);
  for (std::size_t i = 0; i < cn; ++i) out[i] = {cplx_[i][0], cplx_[i][1]};
}

void RealFft2d::inverse(const std::vector<std::complex<double>>& in, std::vector<double>& out) {
  const std::size_t rn = static_cast<std::size_t>(n_) * n_;
  const std::size_t cn = static_cast<std::size_t>(n_) * half();
  for (std::size_t i = 0; i < cn; ++i) {
    cplx_[i][0] = in[i].real();
    cplx_[i][1] = in[i].imag();
  }
  // c2r destroys its input; it is a private buffer here.
  fftw_execute(inv_);
  out.assign(real_, real_ + rn);
}

std::complex<double> RealFft2d::lookup(const std::vector<std::complex<double>>& spec, int n,
                                       long k1, long k2) {
  const int h = n / 2 + 1;
  if (k2 < 0) return std::conj(lookup(spec, n, -k1, -k2));
  const long row = ((k1 % n) + n) % n;
  return spec[static_cast<std::size_t>(row) * h + static_cast<std::size_t>(k2)];
}

}  // namespace pillowkit::torus::detail
