#pragma once

#include <fftw3.h>

#include <complex>
#include <span>

namespace visconv::detail {

/// Real 2-D transforms on an M x M grid between physical values and the
/// retained coefficient square |k1|,|k2| <= cutoff.
///
/// Instances own their buffers and plans. Use for_resolution() to get the
/// calling thread's instance; FFTW planning is serialized internally.
class FourierTransform {
 public:
  FourierTransform(int resolution, int cutoff);
  ~FourierTransform();
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

  static FourierTransform& for_resolution(int resolution, int cutoff);

  int resolution() const noexcept { return m_; }

  /// Spectral buffer for the next synthesize() call; zero it with clear_spectrum().
  void clear_spectrum();
  /// Set the coefficient of mode (k1, k2) with k2 >= 0.
  void set_mode(int k1, int k2, std::complex<double> value);
  /// Inverse transform of the staged spectrum into out (M*M values).
  void synthesize(std::span<double> out);

  /// Forward transform of in (M*M values), scaled so that coefficients match
  /// the synthesis convention. Read results with mode().
  void analyze(std::span<const double> in);
  std::complex<double> mode(int k1, int k2) const;

 private:
  int m_;
  int cutoff_;
  int half_;
  fftw_complex* spectrum_;
  double* real_;
  fftw_plan backward_;
  fftw_plan forward_;
};

}  // namespace visconv::detail
