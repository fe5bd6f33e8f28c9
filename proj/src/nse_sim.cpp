#include "visconv/nse_sim.hpp"

#include <cmath>
#include <numbers>

#include "etd.hpp"
#include "visconv/errors.hpp"
#include "visconv/spectral_ops.hpp"

namespace visconv {

ForceSpec ForceSpec::single_mode(int k1, int k2, Complex c) {
  ForceSpec s;
  s.kind = Kind::single_mode;
  s.modes = {Mode{k1, k2, c}};
  return s;
}

ForceSpec ForceSpec::multi_mode(std::vector<Mode> modes) {
  ForceSpec s;
  s.kind = Kind::multi_mode;
  s.modes = std::move(modes);
  return s;
}

ForceSpec ForceSpec::from_file(std::filesystem::path path) {
  ForceSpec s;
  s.kind = Kind::file;
  s.path = std::move(path);
  return s;
}

SpectralField ForceSpec::build(const TorusGrid& grid) const {
  if (kind == Kind::file) {
    const auto traj = read_trajectory(path);
    if (traj.size() == 0) throw FormatError("force file has no states: " + path.string());
    if (std::abs(traj.grid.length() - grid.length()) > 1e-12 * grid.length()) {
      throw InvalidArgument("force file domain length differs from the configured L");
    }
    const auto& src = traj.states.front();
    SpectralField f(grid);
    const int K = std::min(grid.cutoff(), traj.grid.cutoff());
    for (int k1 = -K; k1 <= K; ++k1) {
      for (int k2 = -K; k2 <= K; ++k2) f.at(k1, k2) = src.at(k1, k2);
    }
    f.enforce_symmetry();
    return leray_project(f);
  }
  SpectralField f(grid);
  for (const auto& m : modes) {
    if (m.k1 == 0 && m.k2 == 0) throw InvalidArgument("forcing mode k = 0 is not allowed");
    if (!grid.contains(m.k1, m.k2)) {
      throw InvalidArgument("forcing mode (" + std::to_string(m.k1) + ", " + std::to_string(m.k2) +
                            ") lies outside the dealiased band");
    }
    f += single_mode_field(grid, m.k1, m.k2, m.c);
  }
  return f;
}

nlohmann::json ForceSpec::to_json() const {
  auto mode_json = [](const Mode& m) {
    return nlohmann::json{{"k", {m.k1, m.k2}}, {"c", {m.c.real(), m.c.imag()}}};
  };
  switch (kind) {
    case Kind::single_mode: {
      auto j = mode_json(modes.at(0));
      j["type"] = "single_mode";
      return j;
    }
    case Kind::multi_mode: {
      nlohmann::json list = nlohmann::json::array();
      for (const auto& m : modes) list.push_back(mode_json(m));
      return {{"type", "multi_mode"}, {"modes", list}};
    }
    case Kind::file:
      return {{"type", "file"}, {"path", path.string()}};
  }
  return nullptr;
}

PhysicsConfig::PhysicsConfig(const TorusGrid& g, double viscosity, SpectralField f, double step,
                             double spinup)
    : grid(g), nu(viscosity), force(std::move(f)), dt(step), spinup_time(spinup) {
  if (!(nu > 0.0)) throw InvalidArgument("viscosity nu must be positive");
  if (!(dt > 0.0)) throw InvalidArgument("time step dt must be positive");
  if (!(spinup_time >= 0.0)) throw InvalidArgument("spinup_time must be nonnegative");
  if (!(force.grid() == grid)) throw InvalidArgument("force lives on a different grid");
}

ForwardStepper::ForwardStepper(const PhysicsConfig& cfg) : cfg_(cfg) {
  const auto& g = cfg_.grid;
  const int K = g.cutoff();
  const double k0sq = g.kappa0() * g.kappa0();
  e_.resize(g.mode_count());
  p1_.resize(g.mode_count());
  p2_.resize(g.mode_count());
  for (int k1 = -K; k1 <= K; ++k1) {
    for (int k2 = -K; k2 <= K; ++k2) {
      const auto w = detail::etd_weights(-cfg_.nu * k0sq * (k1 * k1 + k2 * k2), cfg_.dt);
      const auto i = g.index(k1, k2);
      e_[i] = w.e;
      p1_[i] = w.p1;
      p2_[i] = w.p2;
    }
  }
}

SpectralField ForwardStepper::step(const SpectralField& u) const {
  const auto& g = cfg_.grid;
  double speed = 0.0;
  SpectralField n0 = cfg_.force - self_advection(u, &speed);
  last_cfl_ = cfg_.dt * speed * g.resolution() / g.length();
  if (last_cfl_ > cfg_.cfl_limit) throw StepRejected(last_cfl_, cfg_.cfl_limit);

  SpectralField a(g);
  {
    auto ac = a.coefficients();
    const auto uc = u.coefficients();
    const auto nc = n0.coefficients();
    for (std::size_t i = 0; i < ac.size(); ++i) {
      ac[i].x = e_[i] * uc[i].x + p1_[i] * nc[i].x;
      ac[i].y = e_[i] * uc[i].y + p1_[i] * nc[i].y;
    }
  }
  const SpectralField n1 = cfg_.force - self_advection(a);
  SpectralField out = std::move(a);
  auto oc = out.coefficients();
  const auto nc0 = n0.coefficients();
  const auto nc1 = n1.coefficients();
  for (std::size_t i = 0; i < oc.size(); ++i) {
    oc[i].x += p2_[i] * (nc1[i].x - nc0[i].x);
    oc[i].y += p2_[i] * (nc1[i].y - nc0[i].y);
  }
  return out;
}

SpectralField step(const SpectralField& u, const PhysicsConfig& cfg) {
  return ForwardStepper(cfg).step(u);
}

Trajectory integrate(const SpectralField& u0, const PhysicsConfig& cfg,
                     const IntegrateOptions& opts) {
  if (!(opts.t_end > 0.0)) throw InvalidArgument("t_end must be positive");
  if (opts.record_every < 1) throw InvalidArgument("record_every must be >= 1");
  if (!(u0.grid() == cfg.grid)) throw InvalidArgument("initial field lives on a different grid");
  const double ratio = opts.t_end / cfg.dt;
  const long long steps = std::llround(ratio);
  if (steps < 1 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio)) {
    throw InvalidArgument("t_end must be a whole number of time steps");
  }

  Trajectory traj(cfg.grid);
  traj.dt_record = cfg.dt * opts.record_every;
  traj.cutoff = opts.cutoff;
  traj.nu = cfg.nu;
  traj.provenance = {{"force", cfg.force_spec},
                     {"dt", cfg.dt},
                     {"record_every", opts.record_every},
                     {"spinup_time", cfg.spinup_time}};

  const double transient_end = cfg.spinup_time - 1e-9 * cfg.dt;
  auto record = [&](long long j, const SpectralField& u) {
    if (j % opts.record_every != 0) return;
    const double elapsed = static_cast<double>(j) * cfg.dt;
    const bool transient = elapsed < transient_end;
    if (transient && !opts.store_transient) return;
    if (traj.states.empty()) traj.t0 = opts.start_time + elapsed;
    if (transient) ++traj.transient_count;
    traj.states.push_back(opts.cutoff ? modal_project(u, *opts.cutoff) : u);
  };

  ForwardStepper stepper(cfg);
  SpectralField u = u0;
  record(0, u);
  for (long long j = 1; j <= steps; ++j) {
    u = stepper.step(u);
    record(j, u);
  }
  return traj;
}

double grashof(const SpectralField& force, double nu, double kappa0) {
  if (!(nu > 0.0)) throw InvalidArgument("grashof: nu must be positive");
  return l2_norm(force) / ((nu * kappa0) * (nu * kappa0));
}

double energy_balance_residual(const Trajectory& traj, const PhysicsConfig& cfg, double s,
                               double t) {
  if (traj.truncated()) throw InvalidArgument("energy balance needs the full state, not observations");
  if (!(t > s)) throw InvalidArgument("energy balance window needs s < t");
  const std::size_t is = traj.index_of(s);
  const std::size_t it = traj.index_of(t);
  double dissipation = 0.0;
  double work = 0.0;
  for (std::size_t i = is; i <= it; ++i) {
    const double w = (i == is || i == it) ? 0.5 : 1.0;
    const double h1 = h1_norm(traj.states[i]);
    dissipation += w * h1 * h1;
    work += w * inner(cfg.force, traj.states[i]);
  }
  dissipation *= traj.dt_record;
  work *= traj.dt_record;
  const double es = l2_norm(traj.states[is]);
  const double et = l2_norm(traj.states[it]);
  const double kinetic = 0.5 * (et * et - es * es);
  return std::abs(kinetic + cfg.nu * dissipation - work) / dissipation;
}

double ladyzhenskaya_c0() { return std::sqrt(1.0 + 1.0 / (2.0 * std::numbers::pi)); }

AttractorCheck check_attractor_bounds(const Trajectory& traj, const PhysicsConfig& cfg) {
  if (traj.truncated()) throw InvalidArgument("attractor bounds need the full state");
  AttractorCheck c;
  const double k0 = cfg.grid.kappa0();
  const double c0 = ladyzhenskaya_c0();
  c.grashof = grashof(cfg.force, cfg.nu, k0);
  c.bound_l2 = cfg.nu * c.grashof;
  c.bound_h1 = cfg.nu * k0 * c.grashof;
  c.bound_stokes = 2137.0 * std::pow(c0, 4) * cfg.nu * k0 * k0 * std::pow(c.grashof + 1.0 / (c0 * c0), 3);
  for (std::size_t i = traj.transient_count; i < traj.size(); ++i) {
    const auto& u = traj.states[i];
    c.sup_l2 = std::max(c.sup_l2, l2_norm(u));
    c.sup_h1 = std::max(c.sup_h1, h1_norm(u));
    c.sup_stokes = std::max(c.sup_stokes, l2_norm(apply_stokes(u)));
    ++c.samples;
  }
  return c;
}

}  // namespace visconv
