#include "isrsgn/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace isrsgn {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::vector<std::complex<double>>& v) { return reinterpret_cast<fftw_complex*>(v.data()); }

}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
  if (n == 0) throw std::invalid_argument("fft: length must be positive");
  std::vector<std::complex<double>> scratch(n);
  const std::lock_guard<std::mutex> lock(planner_mutex());
  const int len = static_cast<int>(n);
  forward_plan_ = fftw_plan_dft_1d(len, as_fftw(scratch), as_fftw(scratch), FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  inverse_plan_ = fftw_plan_dft_1d(len, as_fftw(scratch), as_fftw(scratch), FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!forward_plan_ || !inverse_plan_) throw std::runtime_error("fft: plan creation failed");
}

Fft::~Fft() {
  const std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void Fft::forward(std::vector<std::complex<double>>& data) const {
  if (data.size() != n_) throw std::invalid_argument("fft: buffer length mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(data), as_fftw(data));
}

void Fft::inverse(std::vector<std::complex<double>>& data) const {
  if (data.size() != n_) throw std::invalid_argument("fft: buffer length mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_), as_fftw(data), as_fftw(data));
  const double scale = 1.0 / static_cast<double>(n_);
  for (auto& v : data) v *= scale;
}

}  // namespace isrsgn
