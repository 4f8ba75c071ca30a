#pragma once

#include <complex>
#include <cstddef>

namespace evrate::detail {

/// Real-to-complex FFT of a fixed length, wrapping FFTW with its own aligned
/// buffers. One instance per thread; plan creation is serialized internally
/// (the FFTW planner is not thread-safe), execution is not.
class RealFft {
public:
  explicit RealFft(size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  size_t size() const noexcept { return n_; }
  size_t bins() const noexcept { return n_ / 2 + 1; }

  /// Input buffer of size() doubles. Contents survive forward().
  double* in() noexcept { return in_; }
  /// Spectrum of bins() complex values, valid after forward().
  const std::complex<double>* out() const noexcept { return out_; }

  void forward();

  /// Unnormalized inverse of `spectrum` (bins() values) into `dst`
  /// (size() values). Divide by size() for a round trip.
  void inverse(const std::complex<double>* spectrum, double* dst);

  static size_t next_pow2(size_t n) {
    size_t p = 1;
    while (p < n) p <<= 1;
    return p;
  }

private:
  size_t n_;
  double* in_;
  std::complex<double>* out_;
  void* fwd_plan_;
  void* inv_plan_;
};

}  // namespace evrate::detail
