#include "visconv/spectral_ops.hpp"

#include <algorithm>
#include <cmath>

#include "fourier_transform.hpp"
#include "visconv/errors.hpp"

namespace visconv {

namespace {

using detail::FourierTransform;

FourierTransform& transform_for(const TorusGrid& g) {
  return FourierTransform::for_resolution(g.resolution(), g.cutoff());
}

std::size_t grid_points(const TorusGrid& g) {
  return static_cast<std::size_t>(g.resolution()) * static_cast<std::size_t>(g.resolution());
}

// Stage coef(c(k), k1, k2) for the half-plane k2 >= 0 and synthesize.
template <class Coef>
void synthesize(FourierTransform& ft, const SpectralField& u, Coef coef, std::span<double> out) {
  const int K = u.grid().cutoff();
  ft.clear_spectrum();
  for (int k1 = -K; k1 <= K; ++k1) {
    for (int k2 = 0; k2 <= K; ++k2) {
      ft.set_mode(k1, k2, coef(u.at(k1, k2), k1, k2));
    }
  }
  ft.synthesize(out);
}

// Forward transform of the two physical components, truncated to the
// retained square, Leray-projected and symmetrized.
SpectralField analyze_projected(FourierTransform& ft, const TorusGrid& grid,
                                std::span<const double> x, std::span<const double> y) {
  SpectralField out(grid);
  const int K = grid.cutoff();
  ft.analyze(x);
  for (int k1 = -K; k1 <= K; ++k1) {
    for (int k2 = -K; k2 <= K; ++k2) out.at(k1, k2).x = ft.mode(k1, k2);
  }
  ft.analyze(y);
  for (int k1 = -K; k1 <= K; ++k1) {
    for (int k2 = -K; k2 <= K; ++k2) out.at(k1, k2).y = ft.mode(k1, k2);
  }
  out.enforce_symmetry();
  return leray_project(out);
}

void require_same_grid(const SpectralField& a, const SpectralField& b) {
  if (!(a.grid() == b.grid())) throw InvalidArgument("fields live on different grids");
}

}  // namespace

SpectralField leray_project(const SpectralField& f) {
  SpectralField out(f.grid());
  const int K = f.grid().cutoff();
  for (int k1 = -K; k1 <= K; ++k1) {
    for (int k2 = -K; k2 <= K; ++k2) {
      const int kk = k1 * k1 + k2 * k2;
      if (kk == 0) continue;
      const auto& c = f.at(k1, k2);
      const Complex kdotc = static_cast<double>(k1) * c.x + static_cast<double>(k2) * c.y;
      const Complex s = kdotc / static_cast<double>(kk);
      out.at(k1, k2) = {c.x - s * static_cast<double>(k1), c.y - s * static_cast<double>(k2)};
    }
  }
  return out;
}

SpectralField modal_project(const SpectralField& u, double n) {
  if (!(n >= 1.0)) throw InvalidArgument("modal projection cutoff N must be >= 1");
  SpectralField out(u.grid());
  const int K = u.grid().cutoff();
  const double n2 = n * n;
  for (int k1 = -K; k1 <= K; ++k1) {
    for (int k2 = -K; k2 <= K; ++k2) {
      if (static_cast<double>(k1 * k1 + k2 * k2) < n2) out.at(k1, k2) = u.at(k1, k2);
    }
  }
  return out;
}

double inner(const SpectralField& u, const SpectralField& v) {
  require_same_grid(u, v);
  const auto a = u.coefficients();
  const auto b = v.coefficients();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum += (a[i].x * std::conj(b[i].x) + a[i].y * std::conj(b[i].y)).real();
  }
  return u.grid().area() * sum;
}

double l2_norm(const SpectralField& u) {
  double sum = 0.0;
  for (const auto& c : u.coefficients()) sum += std::norm(c.x) + std::norm(c.y);
  return std::sqrt(u.grid().area() * sum);
}

double h1_norm(const SpectralField& u) {
  const int K = u.grid().cutoff();
  double sum = 0.0;
  for (int k1 = -K; k1 <= K; ++k1) {
    for (int k2 = -K; k2 <= K; ++k2) {
      const auto& c = u.at(k1, k2);
      sum += static_cast<double>(k1 * k1 + k2 * k2) * (std::norm(c.x) + std::norm(c.y));
    }
  }
  const double k0 = u.grid().kappa0();
  return std::sqrt(u.grid().area() * k0 * k0 * sum);
}

SpectralField apply_stokes(const SpectralField& u) {
  SpectralField out(u.grid());
  const int K = u.grid().cutoff();
  const double k0sq = u.grid().kappa0() * u.grid().kappa0();
  for (int k1 = -K; k1 <= K; ++k1) {
    for (int k2 = -K; k2 <= K; ++k2) {
      const double lambda = k0sq * static_cast<double>(k1 * k1 + k2 * k2);
      const auto& c = u.at(k1, k2);
      out.at(k1, k2) = {c.x * lambda, c.y * lambda};
    }
  }
  return out;
}

SpectralField apply_inverse_stokes(const SpectralField& u) {
  SpectralField out(u.grid());
  const int K = u.grid().cutoff();
  const double k0sq = u.grid().kappa0() * u.grid().kappa0();
  for (int k1 = -K; k1 <= K; ++k1) {
    for (int k2 = -K; k2 <= K; ++k2) {
      const int kk = k1 * k1 + k2 * k2;
      if (kk == 0) continue;
      const double lambda = k0sq * static_cast<double>(kk);
      const auto& c = u.at(k1, k2);
      out.at(k1, k2) = {c.x / lambda, c.y / lambda};
    }
  }
  return out;
}

SpectralField bilinear(const SpectralField& u, const SpectralField& v) {
  require_same_grid(u, v);
  const auto& grid = u.grid();
  auto& ft = transform_for(grid);
  const std::size_t n = grid_points(grid);
  const double k0 = grid.kappa0();
  std::vector<double> u1(n), u2(n), d1v1(n), d2v1(n), d1v2(n), d2v2(n);

  synthesize(ft, u, [](const ModeVector& c, int, int) { return c.x; }, u1);
  synthesize(ft, u, [](const ModeVector& c, int, int) { return c.y; }, u2);
  const Complex i(0.0, 1.0);
  synthesize(ft, v, [&](const ModeVector& c, int k1, int) { return i * (k0 * k1) * c.x; }, d1v1);
  synthesize(ft, v, [&](const ModeVector& c, int, int k2) { return i * (k0 * k2) * c.x; }, d2v1);
  synthesize(ft, v, [&](const ModeVector& c, int k1, int) { return i * (k0 * k1) * c.y; }, d1v2);
  synthesize(ft, v, [&](const ModeVector& c, int, int k2) { return i * (k0 * k2) * c.y; }, d2v2);

  for (std::size_t p = 0; p < n; ++p) {
    const double a1 = u1[p] * d1v1[p] + u2[p] * d2v1[p];
    const double a2 = u1[p] * d1v2[p] + u2[p] * d2v2[p];
    d1v1[p] = a1;
    d1v2[p] = a2;
  }
  return analyze_projected(ft, grid, d1v1, d1v2);
}

SpectralField self_advection(const SpectralField& u, double* max_speed) {
  const auto& grid = u.grid();
  auto& ft = transform_for(grid);
  const std::size_t n = grid_points(grid);
  const double k0 = grid.kappa0();
  std::vector<double> u1(n), u2(n), omega(n);

  synthesize(ft, u, [](const ModeVector& c, int, int) { return c.x; }, u1);
  synthesize(ft, u, [](const ModeVector& c, int, int) { return c.y; }, u2);
  const Complex i(0.0, 1.0);
  synthesize(
      ft, u,
      [&](const ModeVector& c, int k1, int k2) { return i * k0 * (double(k1) * c.y - double(k2) * c.x); }, omega);

  double speed2 = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    speed2 = std::max(speed2, u1[p] * u1[p] + u2[p] * u2[p]);
    const double a1 = -omega[p] * u2[p];
    const double a2 = omega[p] * u1[p];
    u1[p] = a1;
    u2[p] = a2;
  }
  if (max_speed != nullptr) *max_speed = std::sqrt(speed2);
  return analyze_projected(ft, grid, u1, u2);
}

double trilinear(const SpectralField& u, const SpectralField& v, const SpectralField& w) {
  require_same_grid(u, w);
  return inner(bilinear(u, v), w);
}

PhysicalField to_physical(const SpectralField& u) {
  const auto& grid = u.grid();
  auto& ft = transform_for(grid);
  PhysicalField out;
  out.resolution = grid.resolution();
  out.x.resize(grid_points(grid));
  out.y.resize(grid_points(grid));
  synthesize(ft, u, [](const ModeVector& c, int, int) { return c.x; }, out.x);
  synthesize(ft, u, [](const ModeVector& c, int, int) { return c.y; }, out.y);
  return out;
}

double divergence_residual(const SpectralField& u) {
  const int K = u.grid().cutoff();
  double worst = 0.0;
  for (int k1 = -K; k1 <= K; ++k1) {
    for (int k2 = -K; k2 <= K; ++k2) {
      const auto& c = u.at(k1, k2);
      worst = std::max(worst, std::abs(static_cast<double>(k1) * c.x + static_cast<double>(k2) * c.y));
    }
  }
  return worst;
}

double symmetry_residual(const SpectralField& u) {
  const int K = u.grid().cutoff();
  double worst = 0.0;
  for (int k1 = -K; k1 <= K; ++k1) {
    for (int k2 = -K; k2 <= K; ++k2) {
      const auto& a = u.at(k1, k2);
      const auto& b = u.at(-k1, -k2);
      worst = std::max(worst, std::abs(a.x - std::conj(b.x)) + std::abs(a.y - std::conj(b.y)));
    }
  }
  const auto& z = u.at(0, 0);
  return worst + std::abs(z.x) + std::abs(z.y);
}

double edge_shell_energy_fraction(const SpectralField& u) {
  const int K = u.grid().cutoff();
  double edge = 0.0;
  double total = 0.0;
  for (int k1 = -K; k1 <= K; ++k1) {
    for (int k2 = -K; k2 <= K; ++k2) {
      const auto& c = u.at(k1, k2);
      const double e = std::norm(c.x) + std::norm(c.y);
      total += e;
      if (std::max(std::abs(k1), std::abs(k2)) == K) edge += e;
    }
  }
  return total > 0.0 ? edge / total : 0.0;
}

}  // namespace visconv
