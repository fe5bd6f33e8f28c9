#pragma once

// Reference computations that do not go through the FFT path. Everything
// here is direct summation, slow but easy to audit.

#include <vector>

#include "visconv/spectral_field.hpp"

namespace visconv::oracle {

struct PointValues {
  int points = 0;  // samples per dimension
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> dx1;  // d/dx1 of x, y components; filled on request
  std::vector<double> dx2;
  std::vector<double> dy1;
  std::vector<double> dy2;
};

/// Direct evaluation of sum_k c(k) e^{i kappa0 k.x} on a Q x Q uniform grid.
PointValues evaluate(const SpectralField& u, int q, bool with_gradient = false);

/// Uniform-grid quadrature of |u|^2 and |u|^4 (integrals over the torus).
double quadrature_l2_squared(const SpectralField& u, int q);
double quadrature_l4(const SpectralField& u, int q);

/// Quadrature of |grad u|^2.
double quadrature_h1_squared(const SpectralField& u, int q);

/// P_sigma[(u.grad) v] by direct evaluation on a grid fine enough for the
/// product to be resolved exactly, followed by direct Fourier analysis.
SpectralField advection(const SpectralField& u, const SpectralField& v);

/// Quadrature points per dimension that integrate any product of two
/// retained-band fields exactly, and products of four.
int exact_points_quadratic(const TorusGrid& g);
int exact_points_quartic(const TorusGrid& g);

}  // namespace visconv::oracle
