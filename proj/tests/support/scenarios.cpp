#include "scenarios.hpp"

#include <cmath>
#include <numbers>

#include "visconv/spectral_ops.hpp"

namespace visconv::scenario {

namespace {

TorusGrid unit_torus(int M) { return TorusGrid(2.0 * std::numbers::pi, M); }

}  // namespace

SpectralField stationary_state(const TorusGrid& grid, const StationaryOptions& o) {
  return single_mode_field(grid, o.k1, o.k2, o.amplitude);
}

Run stationary(const StationaryOptions& o) {
  const auto grid = unit_torus(o.M);
  const auto u0 = stationary_state(grid, o);
  PhysicsConfig phys(grid, o.nu, apply_stokes(u0) * o.nu, o.dt, 0.0);
  auto truth = integrate(u0, phys, {.t_end = o.t_end, .record_every = o.record_every});
  auto obs = observe(truth, o.N);
  return {phys, std::move(truth), std::move(obs)};
}

Run decaying(int M, double nu, int k1, int k2, double dt, double t_end, int record_every) {
  const auto grid = unit_torus(M);
  PhysicsConfig phys(grid, nu, SpectralField(grid), dt, 0.0);
  auto truth = integrate(single_mode_field(grid, k1, k2, {1.0, 0.5}), phys,
                         {.t_end = t_end, .record_every = record_every});
  auto obs = observe(truth, 4.0);
  return {phys, std::move(truth), std::move(obs)};
}

ForceSpec large_scale_force(const TorusGrid& grid, double nu, double G) {
  std::vector<ForceSpec::Mode> modes{{2, 1, {1.0, 0.5}}, {-1, 2, {0.3, -0.8}}, {2, 2, {-0.6, 0.2}}};
  const double k0 = grid.kappa0();
  const double scale = G * nu * nu * k0 * k0 / l2_norm(ForceSpec::multi_mode(modes).build(grid));
  for (auto& m : modes) m.c *= scale;
  return ForceSpec::multi_mode(std::move(modes));
}

Run forced(const ForcedOptions& o) {
  const auto grid = unit_torus(o.M);
  const auto spec = large_scale_force(grid, o.nu, o.G);
  PhysicsConfig phys(grid, o.nu, spec.build(grid), o.dt, o.spinup);
  phys.force_spec = spec.to_json();
  const auto u0 = random_field(grid, o.seed, 8.0, 2.0, o.initial_l2);
  auto truth = integrate(u0, phys,
                         {.t_end = o.spinup + o.t_record, .record_every = o.record_every,
                          .store_transient = false});
  auto obs = observe(truth, o.N);
  return {phys, std::move(truth), std::move(obs)};
}

}  // namespace visconv::scenario
