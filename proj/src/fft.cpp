#include "fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <stdexcept>

namespace evrate::detail {

namespace {
std::mutex planner_mutex;
}

RealFft::RealFft(size_t n) : n_(n) {
  if (n < 2) throw std::invalid_argument("fft size must be >= 2");
  in_ = fftw_alloc_real(n);
  out_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(n / 2 + 1));
  if (!in_ || !out_) throw std::bad_alloc();
  std::lock_guard lock(planner_mutex);
  fwd_plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_,
                                   reinterpret_cast<fftw_complex*>(out_), FFTW_ESTIMATE);
  inv_plan_ = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                   reinterpret_cast<fftw_complex*>(out_), in_,
                                   FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex);
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inv_plan_));
  fftw_free(in_);
  fftw_free(out_);
}

void RealFft::forward() { fftw_execute(static_cast<fftw_plan>(fwd_plan_)); }

void RealFft::inverse(const std::complex<double>* spectrum, double* dst) {
  std::memcpy(out_, spectrum, bins() * sizeof(std::complex<double>));
  fftw_execute(static_cast<fftw_plan>(inv_plan_));
  std::memcpy(dst, in_, n_ * sizeof(double));
}

}  // namespace evrate::detail
