#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace isrsgn {

/// In-place 1-D complex FFT of fixed length backed by FFTW.
///
/// forward:  X[k] = sum_n x[n] exp(-2 pi j k n / N)
/// inverse:  x[n] = (1/N) sum_k X[k] exp(+2 pi j k n / N)
/// Plans are created under a global lock; execution is thread safe.
class Fft {
 public:
  explicit Fft(std::size_t n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  std::size_t size() const { return n_; }
  void forward(std::vector<std::complex<double>>& data) const;
  void inverse(std::vector<std::complex<double>>& data) const;

 private:
  std::size_t n_;
  void* forward_plan_;
  void* inverse_plan_;
};

/// Signed index of FFT bin k: k for k < N/2, k - N otherwise.
inline long fft_bin_index(std::size_t k, std::size_t n) {
  return k < n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
}

}  // namespace isrsgn
