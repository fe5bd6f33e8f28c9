#include "visconv/spectral_field.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "visconv/errors.hpp"
#include "visconv/spectral_ops.hpp"

namespace visconv {

TorusGrid::TorusGrid(double length, int resolution)
    : length_(length),
      kappa0_(2.0 * std::numbers::pi / length),
      resolution_(resolution),
      cutoff_(resolution / 3) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw InvalidArgument("torus length must be positive and finite");
  }
  if (resolution < 4 || (resolution & (resolution - 1)) != 0) {
    throw InvalidArgument("grid resolution must be a power of two >= 4");
  }
}

SpectralField::SpectralField(const TorusGrid& grid)
    : grid_(grid), coeffs_(grid.mode_count(), ModeVector{}) {}

double SpectralField::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& c : coeffs_) {
    m = std::max(m, std::sqrt(std::norm(c.x) + std::norm(c.y)));
  }
  return m;
}

void SpectralField::enforce_symmetry() {
  const int K = grid_.cutoff();
  for (int k1 = -K; k1 <= K; ++k1) {
    for (int k2 = -K; k2 <= K; ++k2) {
      // Visit each conjugate pair once, from the upper half-plane.
      if (k2 < 0 || (k2 == 0 && k1 <= 0)) continue;
      auto& a = at(k1, k2);
      auto& b = at(-k1, -k2);
      const ModeVector avg{0.5 * (a.x + std::conj(b.x)), 0.5 * (a.y + std::conj(b.y))};
      a = avg;
      b = {std::conj(avg.x), std::conj(avg.y)};
    }
  }
  at(0, 0) = {};
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  if (!(grid_ == other.grid_)) throw InvalidArgument("grid mismatch in field addition");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    coeffs_[i].x += other.coeffs_[i].x;
    coeffs_[i].y += other.coeffs_[i].y;
  }
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  if (!(grid_ == other.grid_)) throw InvalidArgument("grid mismatch in field subtraction");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    coeffs_[i].x -= other.coeffs_[i].x;
    coeffs_[i].y -= other.coeffs_[i].y;
  }
  return *this;
}

SpectralField& SpectralField::operator*=(double scale) {
  for (auto& c : coeffs_) {
    c.x *= scale;
    c.y *= scale;
  }
  return *this;
}

ModeVector perpendicular_unit(int k1, int k2) {
  const double norm = std::hypot(static_cast<double>(k1), static_cast<double>(k2));
  if (norm == 0.0) throw InvalidArgument("k_perp undefined for k = 0");
  return {Complex(-k2 / norm, 0.0), Complex(k1 / norm, 0.0)};
}

SpectralField single_mode_field(const TorusGrid& grid, int k1, int k2, Complex amplitude) {
  if (k1 == 0 && k2 == 0) throw InvalidArgument("single mode must have k != 0");
  if (!grid.contains(k1, k2)) throw InvalidArgument("single mode wavevector outside grid cutoff");
  SpectralField f(grid);
  const auto perp = perpendicular_unit(k1, k2);
  f.at(k1, k2) = {amplitude * perp.x, amplitude * perp.y};
  f.at(-k1, -k2) = {std::conj(amplitude) * perp.x, std::conj(amplitude) * perp.y};
  return f;
}

SpectralField random_field(const TorusGrid& grid, std::uint64_t seed, double kmax,
                           double decay, double l2_norm_target) {
  if (kmax < 1.0) throw InvalidArgument("random_field needs kmax >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SpectralField u(grid);
  const int K = grid.cutoff();
  for (int k1 = -K; k1 <= K; ++k1) {
    for (int k2 = 0; k2 <= K; ++k2) {
      if (k2 == 0 && k1 <= 0) continue;
      const double kk = std::hypot(static_cast<double>(k1), static_cast<double>(k2));
      if (kk > kmax) continue;
      const double re = gauss(rng);
      const double im = gauss(rng);
      const Complex amp = Complex(re, im) * std::pow(kk, -decay);
      const auto perp = perpendicular_unit(k1, k2);
      u.at(k1, k2) = {amp * perp.x, amp * perp.y};
      u.at(-k1, -k2) = {std::conj(amp) * perp.x, std::conj(amp) * perp.y};
    }
  }
  const double norm = l2_norm(u);
  if (norm > 0.0) u *= l2_norm_target / norm;
  return u;
}

}  // namespace visconv
