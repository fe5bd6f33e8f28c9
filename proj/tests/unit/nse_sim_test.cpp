#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "visconv/errors.hpp"
#include "visconv/inverse_solver.hpp"
#include "visconv/nse_sim.hpp"
#include "visconv/spectral_ops.hpp"

namespace visconv {
namespace {

constexpr double kPi = std::numbers::pi;

struct Stationary {
  TorusGrid grid{2.0 * kPi, 32};
  SpectralField u0 = single_mode_field(grid, 1, 2, {0.4, -0.3});
  double nu = 0.1;
  // f = nu kappa0^2 |k|^2 u0 balances viscosity exactly
  PhysicsConfig cfg{grid, nu, apply_stokes(u0) * nu, 0.01, 0.0};
};

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("visconv_test_" + name);
}

TEST(Step, StationarySingleModeIsPreserved) {
  Stationary s;
  const auto u1 = step(s.u0, s.cfg);
  EXPECT_LE((u1 - s.u0).max_abs(), 1e-10 * s.u0.max_abs());
}

TEST(Step, UnforcedSingleModeDecaysExactly) {
  TorusGrid g(2.0 * kPi, 32);
  const double nu = 0.07, dt = 0.02;
  PhysicsConfig cfg(g, nu, SpectralField(g), dt, 0.0);
  const auto u0 = single_mode_field(g, 3, 1, {1.0, 0.5});
  const auto u1 = step(u0, cfg);
  const double factor = std::exp(-nu * 10.0 * dt);
  EXPECT_LE((u1 - u0 * factor).max_abs(), 1e-8 * factor * u0.max_abs());
}

TEST(Step, ZeroStaysZero) {
  TorusGrid g(1.0, 16);
  PhysicsConfig cfg(g, 0.1, SpectralField(g), 0.01, 0.0);
  EXPECT_EQ(step(SpectralField(g), cfg).max_abs(), 0.0);
}

TEST(Step, RejectsLargeCfl) {
  TorusGrid g(2.0 * kPi, 32);
  PhysicsConfig cfg(g, 0.01, SpectralField(g), 1.0, 0.0);
  const auto u = random_field(g, 1, 4, 1, 10.0);
  try {
    step(u, cfg);
    FAIL() << "expected StepRejected";
  } catch (const StepRejected& e) {
    EXPECT_GT(e.cfl(), 0.5);
    EXPECT_EQ(e.limit(), 0.5);
  }
}

TEST(Step, PreservesInvariants) {
  TorusGrid g(2.0 * kPi, 32);
  auto f = single_mode_field(g, 2, 1, {0.5, 0.0}) + single_mode_field(g, -1, 3, {0.0, 0.4});
  PhysicsConfig cfg(g, 0.05, f, 0.01, 0.0);
  auto u = random_field(g, 3, 8, 2, 1.0);
  for (int i = 0; i < 20; ++i) u = step(u, cfg);
  EXPECT_EQ(symmetry_residual(u), 0.0);
  EXPECT_LE(divergence_residual(u), 1e-12 * u.max_abs());
}

TEST(Integrate, StationaryRecordStaysPut) {
  Stationary s;
  const auto traj = integrate(s.u0, s.cfg, {.t_end = 10.0, .record_every = 50});
  ASSERT_EQ(traj.size(), 21u);
  for (const auto& u : traj.states) EXPECT_LE((u - s.u0).max_abs(), 1e-8 * s.u0.max_abs());
  EXPECT_DOUBLE_EQ(traj.time(20), 10.0);
}

TEST(Integrate, CoarseRecordIsSubsequence) {
  TorusGrid g(2.0 * kPi, 32);
  auto f = single_mode_field(g, 2, 1, {0.3, 0.1});
  PhysicsConfig cfg(g, 0.05, f, 0.01, 0.0);
  const auto u0 = random_field(g, 5, 8, 2, 0.5);
  const auto fine = integrate(u0, cfg, {.t_end = 1.0, .record_every = 2});
  const auto coarse = integrate(u0, cfg, {.t_end = 1.0, .record_every = 10});
  ASSERT_EQ(coarse.size(), 11u);
  for (std::size_t i = 0; i < coarse.size(); ++i) EXPECT_EQ(coarse.states[i], fine.states[5 * i]);
}

TEST(Integrate, TransientFlagAndSkipping) {
  Stationary s;
  s.cfg.spinup_time = 0.5;
  const auto all = integrate(s.u0, s.cfg, {.t_end = 1.0, .record_every = 10});
  EXPECT_EQ(all.size(), 11u);
  EXPECT_EQ(all.transient_count, 5u);
  const auto kept = integrate(s.u0, s.cfg, {.t_end = 1.0, .record_every = 10, .store_transient = false});
  EXPECT_EQ(kept.size(), 6u);
  EXPECT_EQ(kept.transient_count, 0u);
  EXPECT_NEAR(kept.t0, 0.5, 1e-12);
}

TEST(Integrate, TruncatedRecording) {
  TorusGrid g(2.0 * kPi, 32);
  PhysicsConfig cfg(g, 0.05, single_mode_field(g, 2, 1, {0.3, 0.1}), 0.01, 0.0);
  const auto traj = integrate(random_field(g, 2, 8, 2, 0.5), cfg,
                              {.t_end = 0.1, .record_every = 5, .cutoff = 3.0});
  for (const auto& u : traj.states) EXPECT_EQ(modal_project(u, 3.0), u);
  EXPECT_THROW(integrate(SpectralField(g), cfg, {.t_end = 0.105}), InvalidArgument);
}

TEST(Integrate, DeterministicBitForBit) {
  TorusGrid g(2.0 * kPi, 32);
  PhysicsConfig cfg(g, 0.02, single_mode_field(g, 2, 1, {0.3, 0.1}), 0.01, 0.0);
  const auto u0 = random_field(g, 9, 8, 2, 1.0);
  const auto a = integrate(u0, cfg, {.t_end = 0.5, .record_every = 10});
  const auto b = integrate(u0, cfg, {.t_end = 0.5, .record_every = 10});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.states[i], b.states[i]);
}

TEST(Integrate, SecondOrderInTime) {
  TorusGrid g(2.0 * kPi, 32);
  const auto f = single_mode_field(g, 2, 1, {0.4, 0.1}) + single_mode_field(g, 1, -2, {0.2, -0.3});
  const auto u0 = random_field(g, 4, 8, 2, 1.5);
  auto run = [&](double dt) {
    PhysicsConfig cfg(g, 0.05, f, dt, 0.0);
    ForwardStepper st(cfg);
    auto u = u0;
    for (int i = 0; i < static_cast<int>(std::lround(2.0 / dt)); ++i) u = st.step(u);
    return u;
  };
  const auto ref = run(0.01);
  const double e1 = l2_norm(run(0.04) - ref);
  const double e2 = l2_norm(run(0.02) - ref);
  EXPECT_GE(std::log2(e1 / e2), 1.8);
}

TEST(Grashof, Values) {
  TorusGrid g(2.0 * kPi, 16);
  auto f = single_mode_field(g, 1, 0, {1.0, 0.0});
  f *= 1.0 / l2_norm(f);
  EXPECT_NEAR(grashof(f, 0.1, 1.0), 100.0, 1e-10);
  EXPECT_EQ(grashof(SpectralField(g), 0.1, 1.0), 0.0);
  EXPECT_NEAR(grashof(f, 0.2, 1.0), 25.0, 1e-10);
  EXPECT_THROW(grashof(f, 0.0, 1.0), InvalidArgument);
}

TEST(EnergyBalance, StationaryAndDecaying) {
  Stationary s;
  const auto st = integrate(s.u0, s.cfg, {.t_end = 2.0, .record_every = 10});
  EXPECT_LE(energy_balance_residual(st, s.cfg, 0.0, 2.0), 1e-8);
  EXPECT_NEAR(direct_viscosity(st, s.cfg.force, 0.0, 2.0), s.nu, 1e-8 * s.nu);

  TorusGrid g(2.0 * kPi, 32);
  PhysicsConfig cfg(g, 0.1, SpectralField(g), 0.01, 0.0);
  const auto decay = integrate(single_mode_field(g, 1, 1, {1.0, 0.0}), cfg, {.t_end = 2.0, .record_every = 1});
  EXPECT_LE(energy_balance_residual(decay, cfg, 0.0, 2.0), 1e-6);
  EXPECT_NEAR(direct_viscosity(decay, cfg.force, 0.0, 2.0), 0.1, 1e-4 * 0.1);

  EXPECT_THROW(energy_balance_residual(observe(decay, 2.0), cfg, 0.0, 2.0), InvalidArgument);
  EXPECT_THROW(energy_balance_residual(decay, cfg, 0.0, 2.005), DataRangeError);
}

TEST(AttractorBounds, StationaryState) {
  Stationary s;
  const auto st = integrate(s.u0, s.cfg, {.t_end = 1.0, .record_every = 10});
  const auto c = check_attractor_bounds(st, s.cfg);
  EXPECT_TRUE(c.ok());
  // single-mode steady state sits on the L2 bound's scale: |u| = |f|/(nu kappa0^2 |k|^2) <= nu G
  EXPECT_LE(c.sup_l2, c.bound_l2);
  EXPECT_EQ(c.samples, st.size());
}

TEST(ForceSpec, BuildAndEcho) {
  TorusGrid g(2.0 * kPi, 16);
  const auto spec = ForceSpec::multi_mode({{1, 0, {0.5, 0.0}}, {2, 1, {0.0, 0.25}}});
  const auto f = spec.build(g);
  EXPECT_LE(divergence_residual(f), 1e-15);
  EXPECT_EQ(symmetry_residual(f), 0.0);
  EXPECT_EQ(spec.to_json()["type"], "multi_mode");
  EXPECT_THROW(ForceSpec::single_mode(0, 0, {1.0, 0.0}).build(g), InvalidArgument);
  EXPECT_THROW(ForceSpec::single_mode(9, 0, {1.0, 0.0}).build(g), InvalidArgument);
}

TEST(TrajectoryFile, RoundTripIsBitExact) {
  TorusGrid g(1.7, 32);
  Trajectory t(g);
  t.t0 = 3.25;
  t.dt_record = 0.125;
  t.nu = 0.0123456789;
  t.transient_count = 1;
  for (std::uint64_t s = 0; s < 3; ++s) t.states.push_back(random_field(g, s, 10, 1, 1.0 / 3.0));
  const auto path = temp_file("roundtrip.vsct");
  write_trajectory(path, t);
  const auto r = read_trajectory(path);
  EXPECT_EQ(r.grid, g);
  EXPECT_EQ(r.t0, t.t0);
  EXPECT_EQ(r.dt_record, t.dt_record);
  EXPECT_EQ(r.nu, t.nu);
  EXPECT_EQ(r.transient_count, 1u);
  EXPECT_FALSE(r.cutoff.has_value());
  ASSERT_EQ(r.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(r.states[i], t.states[i]);

  const auto obs = observe(t, 4.5);
  const auto opath = temp_file("roundtrip_obs.vsct");
  write_trajectory(opath, obs);
  EXPECT_EQ(stored_half_width(obs), 4);
  EXPECT_LT(std::filesystem::file_size(opath), std::filesystem::file_size(path));
  const auto ro = read_trajectory(opath);
  ASSERT_TRUE(ro.cutoff.has_value());
  EXPECT_EQ(*ro.cutoff, 4.5);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(ro.states[i], obs.states[i]);
  std::filesystem::remove(path);
  std::filesystem::remove(opath);
}

TEST(TrajectoryFile, RejectsTruncatedPayloadAndBadMagic) {
  TorusGrid g(1.0, 16);
  Trajectory t(g);
  t.dt_record = 1.0;
  t.states.push_back(random_field(g, 1, 4, 1, 1.0));
  const auto path = temp_file("short.vsct");
  write_trajectory(path, t);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 8);
  EXPECT_THROW(read_trajectory(path), FormatError);
  {
    std::ofstream out(path, std::ios::trunc);
    out << "NOPE\n{}\n";
  }
  EXPECT_THROW(read_trajectory(path), FormatError);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace visconv
