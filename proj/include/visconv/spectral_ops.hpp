#pragma once

#include <vector>

#include "visconv/spectral_field.hpp"

namespace visconv {

/// Helmholtz-Leray projection (I - k k^T / |k|^2) applied mode by mode.
SpectralField leray_project(const SpectralField& f);

/// Keeps coefficients with |k| < n and zeroes the rest. Throws for n < 1.
SpectralField modal_project(const SpectralField& u, double n);

/// H inner product (u, v) = L^2 sum_k c_u(k) . conj(c_v(k)).
double inner(const SpectralField& u, const SpectralField& v);

/// |u|, the L2 norm.
double l2_norm(const SpectralField& u);
/// ||u|| = |grad u|.
double h1_norm(const SpectralField& u);

/// Stokes operator A = -Laplacian: multiplies c(k) by kappa0^2 |k|^2.
SpectralField apply_stokes(const SpectralField& u);
/// Inverse Stokes operator on mean-free fields.
SpectralField apply_inverse_stokes(const SpectralField& u);

/// B(u, v) = P_sigma[(u . grad) v], evaluated pseudo-spectrally with 2/3-rule
/// dealiasing. Throws InvalidArgument when the grids differ.
SpectralField bilinear(const SpectralField& u, const SpectralField& v);

/// B(u, u) via the rotational form P_sigma[omega e_z x u]. Equal to
/// bilinear(u, u) up to roundoff but needs fewer transforms. When max_speed
/// is non-null it receives max |u| over the collocation points.
SpectralField self_advection(const SpectralField& u, double* max_speed = nullptr);

/// b(u, v, w) = (B(u, v), w).
double trilinear(const SpectralField& u, const SpectralField& v, const SpectralField& w);

/// Values of a field on the M x M collocation grid, row-major in (x1, x2).
struct PhysicalField {
  int resolution = 0;
  std::vector<double> x;
  std::vector<double> y;
};

PhysicalField to_physical(const SpectralField& u);

/// max_k |k . c(k)|, the spectral divergence residual.
double divergence_residual(const SpectralField& u);
/// max_k |c(-k) - conj(c(k))| plus |c(0)|.
double symmetry_residual(const SpectralField& u);

/// Fraction of energy in the outermost retained shell max(|k1|,|k2|) = cutoff.
double edge_shell_energy_fraction(const SpectralField& u);

}  // namespace visconv
