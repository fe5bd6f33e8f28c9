#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "scenarios.hpp"
#include "visconv/errors.hpp"
#include "visconv/inverse_solver.hpp"
#include "visconv/spectral_ops.hpp"

namespace visconv {
namespace {

AssimConfig make_config(double N, double mu0, double s, double t) {
  AssimConfig c;
  c.N = N;
  c.mu0 = mu0;
  c.nu0 = 0.05;
  c.nu1 = 0.5;
  c.s = s;
  c.t = t;
  return c;
}

// |f| / (gamma kappa0^2 |k|^2 + mu) * |gamma - nu| / nu
double single_mode_loss(double f_l2, double gamma, double nu, double mu, double kk) {
  return f_l2 / (gamma * kk + mu) * std::abs(gamma - nu) / nu;
}

TEST(ExpWeightedAverage, ConstantSignal) {
  const double mu = 1.7, dt = 0.05;
  const std::vector<double> ones(201, 1.0);
  const double T = 200 * dt;
  EXPECT_NEAR(exp_weighted_average(ones, dt, mu), -std::expm1(-mu * T) / (mu * T), 1e-14);
  const std::vector<double> c(11, 3.25);
  EXPECT_NEAR(exp_weighted_average(c, 0.1, 0.0), 3.25, 1e-14);
  EXPECT_NEAR(exp_weighted_average(c, 0.1, 1e-6), 3.25 * -std::expm1(-1e-6) / 1e-6, 1e-12);
}

TEST(ExpWeightedAverage, LinearSignalIsExact) {
  // phi(tau) = tau on [0, T]: int_0^T e^{-mu (T - tau)} tau dtau = T/mu - (1 - e^{-mu T})/mu^2
  const double mu = 0.8, dt = 0.25;
  std::vector<double> ramp;
  for (int j = 0; j <= 16; ++j) ramp.push_back(j * dt);
  const double T = 4.0;
  const double expect = (T / mu - (1.0 - std::exp(-mu * T)) / (mu * mu)) / T;
  EXPECT_NEAR(exp_weighted_average(ramp, dt, mu), expect, 1e-14);
}

TEST(ExpWeightedAverage, FlatWeightedIntegrand) {
  // phi(tau) = e^{mu (T - tau)} makes the weighted integrand identically 1
  const double mu = 2.0, dt = 1e-3, T = 1.0;
  std::vector<double> phi;
  for (int j = 0; j <= 1000; ++j) phi.push_back(std::exp(mu * (T - j * dt)));
  EXPECT_NEAR(exp_weighted_average(phi, dt, mu), 1.0, 1e-6);
}

TEST(ExpWeightedAverage, RejectsShortSeries) {
  const std::vector<double> one{1.0};
  EXPECT_THROW(exp_weighted_average(one, 0.1, 1.0), InvalidArgument);
}

TEST(Loss, SingleModeClosedForm) {
  scenario::StationaryOptions o;
  const auto run = scenario::stationary(o);
  DataSignal d(run.observations);
  const auto cfg = make_config(o.N, 2.0, 30.0, 40.0);
  const double kk = o.k1 * o.k1 + o.k2 * o.k2;
  const double f = l2_norm(run.phys.force);
  const double phi = l2_norm(d.sample(0));
  for (double gamma : {0.05, 0.1, 0.25, 0.5}) {
    const double expect = single_mode_loss(f, gamma, o.nu, cfg.mu(1.0), kk);
    EXPECT_NEAR(loss(gamma, d, cfg, run.phys), expect, 1e-6 * expect + 1e-12 * phi) << gamma;
  }
}

TEST(Loss, VanishesAtTrueViscosityOnForcedData) {
  const auto run = scenario::forced({.seed = 1});
  DataSignal d(run.observations);
  const auto cfg = make_config(8.0, 2.0, 10.0, 12.0);
  double sup_phi = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) sup_phi = std::max(sup_phi, l2_norm(d.sample(i)));
  EXPECT_LE(loss(run.phys.nu, d, cfg, run.phys), 1e-6 * sup_phi);
  EXPECT_GT(loss(0.3, d, cfg, run.phys), 1e-3 * sup_phi);
}

TEST(Degenerate, UnobservedModeGivesZeroLossAndNoViscosity) {
  scenario::StationaryOptions o;
  o.N = 2.0;  // |k|^2 = 5 >= N^2
  const auto run = scenario::stationary(o);
  DataSignal d(run.observations);
  auto cfg = make_config(o.N, 2.0, 30.0, 40.0);
  cfg.spinup_time = 20.0;
  for (double gamma : {0.05, 0.1, 0.5}) EXPECT_EQ(loss(gamma, d, cfg, run.phys), 0.0);
  EXPECT_THROW(gamma_update(0.2, d, cfg, run.phys), DegenerateData);
  const auto r = bounds_report(d, run.phys.force, cfg, run.phys);
  EXPECT_TRUE(r.degenerate);
  EXPECT_TRUE(!r.n0 || *r.n0 >= o.N);
  EXPECT_FALSE(r.find("N-uniqueness")->pass);
  const auto rec = recover_viscosity(d, cfg, run.phys, {.gamma0 = 0.2, .eps1 = 0.025, .eps2 = 1e-6});
  EXPECT_EQ(rec.status, RecoveryStatus::condition_failed);
  EXPECT_FALSE(rec.failure.empty());
}

TEST(GammaUpdate, SingleModeOneStepExact) {
  scenario::StationaryOptions o;
  const auto run = scenario::stationary(o);
  DataSignal d(run.observations);
  const auto cfg = make_config(o.N, 2.0, 30.0, 40.0);
  for (double gamma : {0.05, 0.17, 0.5}) {
    const auto u = gamma_update_detail(gamma, d, cfg, run.phys);
    EXPECT_NEAR(u.next, o.nu, 1e-6 * o.nu) << gamma;
    EXPECT_NEAR(u.c2, 0.0, 1e-12 * std::abs(u.c1 + u.c3));
  }
}

class ForcedFixedPoint : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(ForcedFixedPoint, TrueViscosityIsFixed) {
  const auto run = scenario::forced({.seed = GetParam()});
  DataSignal d(run.observations);
  const auto cfg = make_config(8.0, 2.0, 10.0, 12.0);
  EXPECT_NEAR(gamma_update(run.phys.nu, d, cfg, run.phys), run.phys.nu, 1e-6 * run.phys.nu);
}

INSTANTIATE_TEST_SUITE_P(Seeds, ForcedFixedPoint, ::testing::Values(1u, 2u, 3u, 4u, 5u));

TEST(GammaUpdate, TimeShiftedWindowsAgree) {
  const auto run = scenario::forced({.seed = 7, .t_record = 14.0});
  DataSignal d(run.observations);
  const auto a = gamma_update(0.4, d, make_config(8.0, 2.0, 10.0, 12.0), run.phys);
  const auto b = gamma_update(0.4, d, make_config(8.0, 2.0, 12.0, 14.0), run.phys);
  EXPECT_NEAR(a, b, 1e-3 * std::abs(b));
}

TEST(Recovery, SingleModeExactAfterOneUpdate) {
  scenario::StationaryOptions o;
  const auto run = scenario::stationary(o);
  DataSignal d(run.observations);
  const auto cfg = make_config(o.N, 2.0, 30.0, 40.0);
  for (double g0 : {cfg.nu0, cfg.nu1}) {
    const auto r = recover_viscosity(d, cfg, run.phys, {.gamma0 = g0, .eps1 = 0.025, .eps2 = 1e-8});
    EXPECT_EQ(r.status, RecoveryStatus::converged);
    ASSERT_GE(r.gamma_history.size(), 2u);
    EXPECT_NEAR(r.gamma_history[1], o.nu, 1e-6 * o.nu);
    EXPECT_LE(r.iterations(), 2);
    EXPECT_EQ(r.loss_history.size(), static_cast<std::size_t>(r.iterations()));
    EXPECT_EQ(r.wall_seconds.size(), static_cast<std::size_t>(r.iterations()));
  }
}

TEST(Recovery, LooseToleranceStopsEarly) {
  const auto run = scenario::forced({.seed = 1});
  DataSignal d(run.observations);
  const auto cfg = make_config(8.0, 2.0, 10.0, 12.0);
  const auto r = recover_viscosity(d, cfg, run.phys, {.gamma0 = 0.12, .eps1 = 0.025, .eps2 = 1.0});
  EXPECT_EQ(r.status, RecoveryStatus::converged);
  EXPECT_LE(r.iterations(), 2);
}

TEST(Recovery, StoppingRuleIsSound) {
  const auto run = scenario::forced({.seed = 2});
  DataSignal d(run.observations);
  const auto cfg = make_config(8.0, 2.0, 10.0, 12.0);
  const double eps2 = 1e-5;
  int calls = 0;
  const auto r = recover_viscosity(d, cfg, run.phys,
                                   {.gamma0 = 0.5, .eps1 = 0.025, .eps2 = eps2,
                                    .on_iteration = [&](const RecoveryState&) { ++calls; }});
  ASSERT_EQ(r.status, RecoveryStatus::converged);
  EXPECT_LE(std::abs(r.gamma() - run.phys.nu), eps2);
  EXPECT_EQ(calls, r.iterations());
  ASSERT_FALSE(r.contraction_estimates.empty());
  for (double q : r.contraction_estimates) EXPECT_LT(q, 1.0);
}

TEST(Recovery, EscapingTheBracketIsReported) {
  scenario::StationaryOptions o;
  const auto run = scenario::stationary(o);
  DataSignal d(run.observations);
  auto cfg = make_config(o.N, 2.0, 30.0, 40.0);
  cfg.nu0 = 0.2;  // true viscosity 0.1 lies below the bracket
  const auto r = recover_viscosity(d, cfg, run.phys, {.gamma0 = 0.3, .eps1 = 0.01, .eps2 = 1e-6});
  EXPECT_EQ(r.status, RecoveryStatus::condition_failed);
  EXPECT_EQ(r.gamma_history.size(), 2u);
  EXPECT_THROW(recover_viscosity(d, cfg, run.phys, {.gamma0 = 0.3, .eps1 = 0.3, .eps2 = 1e-6}),
               InvalidArgument);
}

TEST(DirectViscosity, ThreeTrajectoryClasses) {
  const auto st = scenario::stationary({.t_end = 5.0});
  EXPECT_NEAR(direct_viscosity(st.truth, st.phys.force, 0.0, 5.0), 0.1, 1e-8 * 0.1);
  const auto dec = scenario::decaying(32, 0.1, 1, 1, 0.01, 2.0, 1);
  EXPECT_NEAR(direct_viscosity(dec.truth, dec.phys.force, 0.0, 2.0), 0.1, 1e-4 * 0.1);
  const auto fr = scenario::forced({.seed = 3, .t_record = 4.0});
  EXPECT_NEAR(direct_viscosity(fr.truth, fr.phys.force, 0.0, 4.0), 0.1, 1e-4 * 0.1);
  EXPECT_THROW(direct_viscosity(fr.observations, fr.phys.force, 0.0, 4.0), InvalidArgument);
}

// Tiny single-mode forcing makes every nonlinear constant negligible, so the
// sufficiency conditions can be met at a modest N.
struct QuietRun {
  scenario::StationaryOptions o;
  scenario::Run run;
  AssimConfig cfg;
  QuietRun() : o(make_options()), run(scenario::stationary(o)), cfg(make_config(8.0, 25.0, 10.0, 20.0)) {}
  static scenario::StationaryOptions make_options() {
    scenario::StationaryOptions o;
    o.k1 = 1;
    o.k2 = 0;
    o.amplitude = {1e-12, 0.0};
    o.N = 8.0;
    o.t_end = 20.0;
    return o;
  }
};

TEST(BoundsReport, QuietRunPassesAllConditions) {
  QuietRun q;
  DataSignal d(q.run.observations);
  const auto r = bounds_report(d, q.run.phys.force, q.cfg, q.run.phys, 0.025);
  for (const char* name : {"gain-floor", "gain-ratio", "N-determining", "N-uniqueness", "N-nonzero-loss",
                           "N-contraction", "mu-contraction"}) {
    ASSERT_NE(r.find(name), nullptr) << name;
    EXPECT_TRUE(r.find(name)->pass) << name;
  }
  EXPECT_TRUE(r.contraction_guaranteed());
  ASSERT_TRUE(r.n0.has_value());
  EXPECT_DOUBLE_EQ(*r.n0, 1.0);
  EXPECT_NEAR(r.delta_window, std::exp(-r.mu * 10.0), 1e-300);
  ASSERT_TRUE(r.eps1_lower_bound.has_value());
  EXPECT_LT(*r.eps1_lower_bound, 0.025);

  // the error bound in terms of the loss, over a sweep of gamma
  for (int i = 0; i < 10; ++i) {
    const double gamma = 0.05 + 0.05 * i;
    const double L = loss(gamma, d, q.cfg, q.run.phys);
    EXPECT_LE(std::abs(q.run.phys.nu - gamma), 2.0 * r.M_2 * L / r.inf_data_l2_sq * (1 + 1e-9) + 1e-15)
        << gamma;
  }
  // guaranteed contraction at both bracket ends
  const double factor = 0.025 / (q.cfg.nu1 - q.cfg.nu0 + 0.025);
  for (double gamma : {q.cfg.nu0, q.cfg.nu1}) {
    const double next = gamma_update(gamma, d, q.cfg, q.run.phys);
    EXPECT_LE(std::abs(next - q.run.phys.nu), factor * std::abs(gamma - q.run.phys.nu));
  }
}

TEST(BoundsReport, LogConstantAndFailures) {
  scenario::StationaryOptions o;
  o.k1 = 1;
  o.k2 = 0;
  const auto run = scenario::stationary(o);
  DataSignal d(run.observations);
  auto cfg = make_config(4.0, 2.0, 30.0, 40.0);
  const auto r = bounds_report(d, run.phys.force, cfg, run.phys);
  // sum over 0 < |k| <= 4 of 1/|k|^2, counted by hand
  double sum = 0.0;
  for (int a = -4; a <= 4; ++a)
    for (int b = -4; b <= 4; ++b)
      if (a * a + b * b > 0 && a * a + b * b <= 16) sum += 1.0 / (a * a + b * b);
  EXPECT_NEAR(r.log_sum, sum, 1e-13);
  EXPECT_NEAR(r.log_const_exact, sum / std::log(5.0), 1e-13);
  EXPECT_LT(r.log_const_exact, r.log_const_fixed);
  EXPECT_EQ(r.find("N-contraction"), nullptr);
  EXPECT_DOUBLE_EQ(*r.n0, 1.0);
  for (const auto& c : r.conditions) EXPECT_EQ(c.pass, c.strict_inequality ? c.lhs > c.rhs : c.lhs >= c.rhs);

  cfg.N = 1.0;
  const auto bad = bounds_report(DataSignal(observe(run.truth, 1.0)), run.phys.force, cfg, run.phys);
  EXPECT_TRUE(bad.degenerate);
  EXPECT_FALSE(bad.find("N-uniqueness")->pass);

  const auto j = to_json(r);
  EXPECT_EQ(j.at("schema").get<std::string>(), "visconv-report/1");
  EXPECT_TRUE(j.contains("conditions"));
}

}  // namespace
}  // namespace visconv
