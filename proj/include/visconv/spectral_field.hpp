#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace visconv {

using Complex = std::complex<double>;

/// Periodic square [0, L]^2 resolved on an M x M collocation grid.
///
/// Retained Fourier modes are the square |k1|, |k2| <= cutoff with
/// cutoff = floor(M / 3), which makes quadratic products alias-free on the
/// retained set.
class TorusGrid {
 public:
  TorusGrid(double length, int resolution);

  double length() const noexcept { return length_; }
  double kappa0() const noexcept { return kappa0_; }
  int resolution() const noexcept { return resolution_; }
  int cutoff() const noexcept { return cutoff_; }
  int width() const noexcept { return 2 * cutoff_ + 1; }
  std::size_t mode_count() const noexcept {
    return static_cast<std::size_t>(width()) * static_cast<std::size_t>(width());
  }
  double area() const noexcept { return length_ * length_; }

  bool contains(int k1, int k2) const noexcept {
    return k1 >= -cutoff_ && k1 <= cutoff_ && k2 >= -cutoff_ && k2 <= cutoff_;
  }
  std::size_t index(int k1, int k2) const noexcept {
    return static_cast<std::size_t>(k1 + cutoff_) * static_cast<std::size_t>(width()) +
           static_cast<std::size_t>(k2 + cutoff_);
  }

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

 private:
  double length_;
  double kappa0_;
  int resolution_;
  int cutoff_;
};

/// Fourier coefficient of a planar vector field at one wavevector.
struct ModeVector {
  Complex x;
  Complex y;

  friend bool operator==(const ModeVector&, const ModeVector&) = default;
};

/// Velocity-like field on the torus stored as Fourier coefficients
/// u(x) = sum_k c(k) exp(i kappa0 k.x) over the retained square of modes.
///
/// The full (both half-planes) coefficient array is kept; Hermitian symmetry
/// c(-k) = conj(c(k)) and c(0) = 0 are maintained by every library operation
/// and can be re-imposed with enforce_symmetry().
class SpectralField {
 public:
  explicit SpectralField(const TorusGrid& grid);

  const TorusGrid& grid() const noexcept { return grid_; }

  ModeVector& at(int k1, int k2) { return coeffs_[grid_.index(k1, k2)]; }
  const ModeVector& at(int k1, int k2) const { return coeffs_[grid_.index(k1, k2)]; }

  /// Row-major over k1 then k2, both running from -cutoff to cutoff.
  std::span<ModeVector> coefficients() noexcept { return coeffs_; }
  std::span<const ModeVector> coefficients() const noexcept { return coeffs_; }

  /// Largest |c(k)| (Euclidean norm of the complex 2-vector).
  double max_abs() const noexcept;

  /// Average c(k) with conj(c(-k)) and zero the mean mode.
  void enforce_symmetry();

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double scale);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

  friend bool operator==(const SpectralField&, const SpectralField&) = default;

 private:
  TorusGrid grid_;
  std::vector<ModeVector> coeffs_;
};

/// Unit vector perpendicular to k, (-k2, k1)/|k|.
ModeVector perpendicular_unit(int k1, int k2);

/// Real single-mode field c k_perp e^{i kappa0 k.x} + conj(c) k_perp e^{-i kappa0 k.x}.
SpectralField single_mode_field(const TorusGrid& grid, int k1, int k2, Complex amplitude);

/// Seeded random divergence-free field with |c(k)| proportional to |k|^-decay
/// on 0 < |k| <= kmax, rescaled so its L2 norm equals l2_norm_target.
SpectralField random_field(const TorusGrid& grid, std::uint64_t seed, double kmax,
                           double decay, double l2_norm_target);

}  // namespace visconv
