#include "fourier_transform.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace visconv::detail {

namespace {

// FFTW planning is not thread-safe; execution with distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

FourierTransform::FourierTransform(int resolution, int cutoff)
    : m_(resolution), cutoff_(cutoff), half_(resolution / 2 + 1) {
  const auto spectral = static_cast<std::size_t>(m_) * static_cast<std::size_t>(half_);
  const auto physical = static_cast<std::size_t>(m_) * static_cast<std::size_t>(m_);
  std::lock_guard lock(planner_mutex());
  spectrum_ = fftw_alloc_complex(spectral);
  real_ = fftw_alloc_real(physical);
  // ESTIMATE keeps plan choice, and therefore roundoff, identical across runs.
  backward_ = fftw_plan_dft_c2r_2d(m_, m_, spectrum_, real_, FFTW_ESTIMATE);
  forward_ = fftw_plan_dft_r2c_2d(m_, m_, real_, spectrum_, FFTW_ESTIMATE);
}

FourierTransform::~FourierTransform() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(backward_);
  fftw_destroy_plan(forward_);
  fftw_free(spectrum_);
  fftw_free(real_);
}

FourierTransform& FourierTransform::for_resolution(int resolution, int cutoff) {
  thread_local std::map<std::pair<int, int>, std::unique_ptr<FourierTransform>> cache;
  auto& slot = cache[{resolution, cutoff}];
  if (!slot) slot = std::make_unique<FourierTransform>(resolution, cutoff);
  return *slot;
}

void FourierTransform::clear_spectrum() {
  std::fill_n(reinterpret_cast<double*>(spectrum_),
              2 * static_cast<std::size_t>(m_) * static_cast<std::size_t>(half_), 0.0);
}

void FourierTransform::set_mode(int k1, int k2, std::complex<double> value) {
  const int row = k1 < 0 ? k1 + m_ : k1;
  auto& slot = spectrum_[static_cast<std::size_t>(row) * half_ + k2];
  slot[0] = value.real();
  slot[1] = value.imag();
}

void FourierTransform::synthesize(std::span<double> out) {
  fftw_execute(backward_);
  std::copy_n(real_, out.size(), out.begin());
}

void FourierTransform::analyze(std::span<const double> in) {
  std::copy(in.begin(), in.end(), real_);
  fftw_execute(forward_);
}

std::complex<double> FourierTransform::mode(int k1, int k2) const {
  const double scale = 1.0 / (static_cast<double>(m_) * static_cast<double>(m_));
  if (k2 < 0) return std::conj(mode(-k1, -k2));
  const int row = k1 < 0 ? k1 + m_ : k1;
  const auto& slot = spectrum_[static_cast<std::size_t>(row) * half_ + k2];
  return {slot[0] * scale, slot[1] * scale};
}

}  // namespace visconv::detail
