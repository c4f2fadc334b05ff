#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace nbp::detail {

/// Smallest integer >= n whose prime factors are all in {2, 3, 5, 7}.
int good_fft_size(int n);

/// Real-to-complex FFT of fixed size with its own aligned buffers.
/// Plans are built with FFTW_ESTIMATE under a global lock; execution on
/// distinct instances is thread safe.
class RealFft1D {
 public:
  explicit RealFft1D(int n);
  ~RealFft1D();
  RealFft1D(const RealFft1D&) = delete;
  RealFft1D& operator=(const RealFft1D&) = delete;

  int size() const { return n_; }
  int spectrum_size() const { return n_ / 2 + 1; }
  std::span<double> real() { return {real_, static_cast<std::size_t>(n_)}; }
  std::span<std::complex<double>> spectrum() {
    return {spectrum_, static_cast<std::size_t>(spectrum_size())};
  }
  /// real() -> spectrum(), unnormalized.
  void forward();
  /// spectrum() -> real(), unnormalized (scale by 1/n yourself).
  void inverse();

 private:
  int n_;
  double* real_;
  std::complex<double>* spectrum_;
  void* plan_forward_;
  void* plan_inverse_;
};

/// Real-to-complex 2D FFT on an n0 x n1 row-major array.
class RealFft2D {
 public:
  RealFft2D(int n0, int n1);
  ~RealFft2D();
  RealFft2D(const RealFft2D&) = delete;
  RealFft2D& operator=(const RealFft2D&) = delete;

  int rows() const { return n0_; }
  int cols() const { return n1_; }
  int spectrum_cols() const { return n1_ / 2 + 1; }
  std::span<double> real() { return {real_, static_cast<std::size_t>(n0_) * n1_}; }
  std::span<std::complex<double>> spectrum() {
    return {spectrum_, static_cast<std::size_t>(n0_) * spectrum_cols()};
  }
  void forward();
  void inverse();

 private:
  int n0_;
  int n1_;
  double* real_;
  std::complex<double>* spectrum_;
  void* plan_forward_;
  void* plan_inverse_;
};

}  // namespace nbp::detail
