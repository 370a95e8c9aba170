#pragma once

// Thin wrappers around FFTW: in-place 2D complex transforms and a padded 1D
// real spectrum.

#include <complex>
#include <cstddef>
#include <vector>

namespace ghostsim::detail {

class Fft2 {
 public:
  Fft2(std::size_t n1, std::size_t n2);
  ~Fft2();
  Fft2(const Fft2&) = delete;
  Fft2& operator=(const Fft2&) = delete;

  /// Unnormalized forward transform (exp(-i k y) kernel), in place on a row-major n1 x n2 array.
  void forward(std::complex<double>* data);
  /// Unnormalized inverse transform.
  void inverse(std::complex<double>* data);

 private:
  void run(void* plan, std::complex<double>* data);

  std::size_t n1_, n2_;
  void* buffer_;
  void* forward_plan_;
  void* inverse_plan_;
};

/// |X_k| for k = 0..nfft/2 of the zero-padded real sequence x (nfft >= x.size()).
std::vector<double> real_spectrum_magnitude(const std::vector<double>& x, std::size_t nfft);

/// Thread count from GHOSTSIM_THREADS (default 1).
int fft_threads();

}  // namespace ghostsim::detail
