#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <new>
#include <stdexcept>
#include <cmath>

namespace ghostsim::detail {

namespace {

// FFTW planning is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void init_threads_once() {
  static std::once_flag flag;
  std::call_once(flag, [] { fftw_init_threads(); });
}

}  // namespace

int fft_threads() {
  const char* env = std::getenv("GHOSTSIM_THREADS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return std::clamp(n, 1, 256);
}

Fft2::Fft2(std::size_t n1, std::size_t n2) : n1_(n1), n2_(n2) {
  std::lock_guard lock(planner_mutex());
  init_threads_once();
  fftw_plan_with_nthreads(fft_threads());
  buffer_ = fftw_alloc_complex(n1 * n2);
  if (!buffer_) throw std::bad_alloc();
  auto* buf = static_cast<fftw_complex*>(buffer_);
  const int a = static_cast<int>(n1), b = static_cast<int>(n2);
  forward_plan_ = fftw_plan_dft_2d(a, b, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_2d(a, b, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft2::~Fft2() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  fftw_free(buffer_);
}

void Fft2::run(void* plan, std::complex<double>* data) {
  const std::size_t bytes = n1_ * n2_ * sizeof(fftw_complex);
  std::memcpy(buffer_, data, bytes);
  fftw_execute(static_cast<fftw_plan>(plan));
  std::memcpy(data, buffer_, bytes);
}

std::vector<double> real_spectrum_magnitude(const std::vector<double>& x, std::size_t nfft) {
  if (nfft < x.size()) throw std::invalid_argument("real_spectrum_magnitude: nfft shorter than input");
  const std::size_t nout = nfft / 2 + 1;
  double* in = fftw_alloc_real(nfft);
  fftw_complex* out = fftw_alloc_complex(nout);
  if (!in || !out) {
    fftw_free(in);
    fftw_free(out);
    throw std::bad_alloc();
  }
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    init_threads_once();
    fftw_plan_with_nthreads(1);
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(nfft), in, out, FFTW_ESTIMATE);
  }
  std::fill(in, in + nfft, 0.0);
  std::copy(x.begin(), x.end(), in);
  fftw_execute(plan);
  std::vector<double> mag(nout);
  for (std::size_t k = 0; k < nout; ++k) mag[k] = std::hypot(out[k][0], out[k][1]);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return mag;
}

void Fft2::forward(std::complex<double>* data) { run(forward_plan_, data); }
void Fft2::inverse(std::complex<double>* data) { run(inverse_plan_, data); }

}  // namespace ghostsim::detail
