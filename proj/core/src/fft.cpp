#include "fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <new>
#include <stdexcept>

namespace nbp::detail {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <class T>
T* fftw_alloc(std::size_t count) {
  void* p = fftw_malloc(sizeof(T) * count);
  if (!p) throw std::bad_alloc();
  return static_cast<T*>(p);
}

}  // namespace

int good_fft_size(int n) {
  if (n < 1) return 1;
  for (int m = n;; ++m) {
    int r = m;
    for (int p : {2, 3, 5, 7})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

RealFft1D::RealFft1D(int n) : n_(n) {
  if (n < 2) throw std::invalid_argument("FFT size must be at least 2");
  real_ = fftw_alloc<double>(n_);
  spectrum_ = fftw_alloc<std::complex<double>>(spectrum_size());
  std::lock_guard lock(planner_mutex());
  auto* c = reinterpret_cast<fftw_complex*>(spectrum_);
  plan_forward_ = fftw_plan_dft_r2c_1d(n_, real_, c, FFTW_ESTIMATE);
  plan_inverse_ = fftw_plan_dft_c2r_1d(n_, c, real_, FFTW_ESTIMATE);
}

RealFft1D::~RealFft1D() {
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_inverse_));
  }
  fftw_free(real_);
  fftw_free(spectrum_);
}

void RealFft1D::forward() { fftw_execute(static_cast<fftw_plan>(plan_forward_)); }
void RealFft1D::inverse() { fftw_execute(static_cast<fftw_plan>(plan_inverse_)); }

RealFft2D::RealFft2D(int n0, int n1) : n0_(n0), n1_(n1) {
  if (n0 < 2 || n1 < 2) throw std::invalid_argument("FFT size must be at least 2");
  real_ = fftw_alloc<double>(static_cast<std::size_t>(n0_) * n1_);
  spectrum_ = fftw_alloc<std::complex<double>>(static_cast<std::size_t>(n0_) * spectrum_cols());
  std::lock_guard lock(planner_mutex());
  auto* c = reinterpret_cast<fftw_complex*>(spectrum_);
  plan_forward_ = fftw_plan_dft_r2c_2d(n0_, n1_, real_, c, FFTW_ESTIMATE);
  plan_inverse_ = fftw_plan_dft_c2r_2d(n0_, n1_, c, real_, FFTW_ESTIMATE);
}

RealFft2D::~RealFft2D() {
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_inverse_));
  }
  fftw_free(real_);
  fftw_free(spectrum_);
}

void RealFft2D::forward() { fftw_execute(static_cast<fftw_plan>(plan_forward_)); }
void RealFft2D::inverse() { fftw_execute(static_cast<fftw_plan>(plan_inverse_)); }

}  // namespace nbp::detail
