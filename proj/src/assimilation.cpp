#include "visconv/assimilation.hpp"

#include <cmath>
#include <sstream>

#include "etd.hpp"
#include "visconv/errors.hpp"
#include "visconv/spectral_ops.hpp"

namespace visconv {

namespace {

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(10);
  s << x;
  return s.str();
}

// |phi| and ||phi|| of a compact observed-coefficient sample.
std::pair<double, double> sample_norms(const DataSignal& data, std::size_t i) {
  const auto& modes = data.observed_modes();
  const auto coeffs = data.sample_coefficients(i);
  double l2 = 0.0, h1 = 0.0;
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const double e = std::norm(coeffs[m].x) + std::norm(coeffs[m].y);
    l2 += e;
    h1 += e * static_cast<double>(modes[m].first * modes[m].first + modes[m].second * modes[m].second);
  }
  const double area = data.grid().area();
  const double k0 = data.grid().kappa0();
  return {std::sqrt(area * l2), std::sqrt(area * k0 * k0 * h1)};
}

struct Span {
  std::size_t first;  // start of the spin-up
  std::size_t s;
  std::size_t t;
};

Span window_span(const DataSignal& data, const AssimConfig& cfg) {
  require_matching_cutoff(data, cfg);
  const double k0 = data.grid().kappa0();
  const std::size_t is = data.index_of(cfg.s);
  const std::size_t it = data.index_of(cfg.t);
  const double start = cfg.s - cfg.effective_spinup(k0);
  const double pos = (start - data.t_begin()) / data.dt();
  if (pos < -1e-9) {
    throw DataRangeError("determining map needs data from t = " + fmt(start) +
                         " (window start minus spin-up) but the record begins at " +
                         fmt(data.t_begin()));
  }
  const auto first = static_cast<std::size_t>(std::floor(pos + 1e-9));
  return {std::min(first, is), is, it};
}

}  // namespace

void AssimConfig::validate() const {
  if (!(N >= 1.0)) throw InvalidArgument("observation cutoff N must be >= 1");
  if (!(mu0 > 0.0)) throw InvalidArgument("mu0 must be positive");
  if (!(nu0 > 0.0 && nu1 > nu0)) throw InvalidArgument("viscosity bracket needs 0 < nu0 < nu1");
  if (!(t > s)) throw InvalidArgument("evaluation window needs s < t");
  if (spinup_time && !(*spinup_time >= 0.0)) throw InvalidArgument("spinup_time must be >= 0");
}

double AssimConfig::mu(double kappa0) const { return mu0 * beta(kappa0); }

double AssimConfig::beta(double kappa0) const { return nu0 * kappa0 * kappa0 * N * N; }

double AssimConfig::effective_spinup(double kappa0) const {
  if (spinup_time) return *spinup_time;
  return std::log(1e10) / beta(kappa0);
}

DataSignal::DataSignal(const Trajectory& obs)
    : grid_(obs.grid), cutoff_(obs.cutoff.value_or(0.0)), t0_(obs.t0), dt_(obs.dt_record) {
  if (!obs.cutoff) throw InvalidArgument("data signal needs a truncated (observed) trajectory");
  if (obs.size() < 2) throw InvalidArgument("data signal needs at least two samples");
  if (!(dt_ > 0.0)) throw InvalidArgument("data sample spacing must be positive");
  const int K = grid_.cutoff();
  const double n2 = cutoff_ * cutoff_;
  for (int k1 = -K; k1 <= K; ++k1) {
    for (int k2 = -K; k2 <= K; ++k2) {
      const int kk = k1 * k1 + k2 * k2;
      if (kk > 0 && static_cast<double>(kk) < n2) modes_.emplace_back(k1, k2);
    }
  }
  samples_.reserve(obs.size());
  for (const auto& st : obs.states) {
    std::vector<ModeVector> c;
    c.reserve(modes_.size());
    for (auto [k1, k2] : modes_) c.push_back(st.at(k1, k2));
    samples_.push_back(std::move(c));
  }
}

std::size_t DataSignal::index_of(double t) const {
  const double pos = (t - t0_) / dt_;
  const double idx = std::round(pos);
  if (std::abs(pos - idx) > 1e-9 || idx < 0 || idx > static_cast<double>(samples_.size() - 1)) {
    throw DataRangeError("time " + fmt(t) + " is not a data sample time in [" + fmt(t_begin()) +
                         ", " + fmt(t_end()) + "]");
  }
  return static_cast<std::size_t>(idx);
}

SpectralField DataSignal::sample(std::size_t i) const {
  SpectralField f(grid_);
  const auto& c = samples_.at(i);
  for (std::size_t m = 0; m < modes_.size(); ++m) f.at(modes_[m].first, modes_[m].second) = c[m];
  return f;
}

void require_matching_cutoff(const DataSignal& data, const AssimConfig& cfg) {
  if (std::abs(data.cutoff() - cfg.N) > 1e-12 * cfg.N) {
    throw InvalidArgument("observations were truncated at N = " + fmt(data.cutoff()) +
                          " but the assimilation uses N = " + fmt(cfg.N));
  }
}

SpectralField DataSignal::at(double t) const {
  const double pos = (t - t0_) / dt_;
  const double last = static_cast<double>(samples_.size() - 1);
  if (pos < -1e-9 || pos > last + 1e-9) {
    throw DataRangeError("data requested at t = " + fmt(t) + " outside the record [" +
                         fmt(t_begin()) + ", " + fmt(t_end()) + "]");
  }
  const double clamped = std::clamp(pos, 0.0, last);
  auto i = static_cast<std::size_t>(std::floor(clamped));
  if (i == samples_.size() - 1) i -= 1;
  const double theta = clamped - static_cast<double>(i);
  SpectralField f(grid_);
  const auto& a = samples_[i];
  const auto& b = samples_[i + 1];
  for (std::size_t m = 0; m < modes_.size(); ++m) {
    f.at(modes_[m].first, modes_[m].second) = {(1.0 - theta) * a[m].x + theta * b[m].x,
                                               (1.0 - theta) * a[m].y + theta * b[m].y};
  }
  return f;
}

NudgedStepper::NudgedStepper(const PhysicsConfig& phys, const AssimConfig& cfg, double gamma,
                             double h)
    : force_(phys.force), cfl_limit_(phys.cfl_limit), mu_(cfg.mu(phys.grid.kappa0())), h_(h) {
  if (!(gamma > 0.0)) throw InvalidArgument("nudged viscosity gamma must be positive");
  if (!(h > 0.0)) throw InvalidArgument("nudged step must be positive");
  const auto& g = phys.grid;
  const int K = g.cutoff();
  const double k0sq = g.kappa0() * g.kappa0();
  const double n2 = cfg.N * cfg.N;
  e_.resize(g.mode_count());
  p1_.resize(g.mode_count());
  p2_.resize(g.mode_count());
  observed_.resize(g.mode_count());
  for (int k1 = -K; k1 <= K; ++k1) {
    for (int k2 = -K; k2 <= K; ++k2) {
      const int kk = k1 * k1 + k2 * k2;
      const auto w = detail::etd_weights(-gamma * k0sq * kk, h);
      const auto i = g.index(k1, k2);
      e_[i] = w.e;
      p1_[i] = w.p1;
      p2_[i] = w.p2;
      observed_[i] = kk > 0 && static_cast<double>(kk) < n2;
    }
  }
}

SpectralField NudgedStepper::step(const SpectralField& v, const SpectralField& phi_now,
                                  const SpectralField& phi_next) const {
  const auto& g = v.grid();
  double speed = 0.0;
  SpectralField n0 = force_ - self_advection(v, &speed);
  const double cfl = h_ * speed * g.resolution() / g.length();
  if (cfl > cfl_limit_) throw StepRejected(cfl, cfl_limit_);
  {
    auto nc = n0.coefficients();
    const auto vc = v.coefficients();
    const auto pc = phi_now.coefficients();
    for (std::size_t i = 0; i < nc.size(); ++i) {
      if (!observed_[i]) continue;
      nc[i].x += mu_ * (pc[i].x - vc[i].x);
      nc[i].y += mu_ * (pc[i].y - vc[i].y);
    }
  }
  SpectralField a(g);
  {
    auto ac = a.coefficients();
    const auto vc = v.coefficients();
    const auto nc = n0.coefficients();
    for (std::size_t i = 0; i < ac.size(); ++i) {
      ac[i].x = e_[i] * vc[i].x + p1_[i] * nc[i].x;
      ac[i].y = e_[i] * vc[i].y + p1_[i] * nc[i].y;
    }
  }
  const SpectralField n1 = force_ - self_advection(a);
  SpectralField out = std::move(a);
  auto oc = out.coefficients();
  const auto nc0 = n0.coefficients();
  const auto nc1 = n1.coefficients();
  const auto pn = phi_next.coefficients();
  for (std::size_t i = 0; i < oc.size(); ++i) {
    if (observed_[i]) {
      const double denom = 1.0 + mu_ * p2_[i];
      oc[i].x = (oc[i].x + p2_[i] * (nc1[i].x + mu_ * pn[i].x - nc0[i].x)) / denom;
      oc[i].y = (oc[i].y + p2_[i] * (nc1[i].y + mu_ * pn[i].y - nc0[i].y)) / denom;
    } else {
      oc[i].x += p2_[i] * (nc1[i].x - nc0[i].x);
      oc[i].y += p2_[i] * (nc1[i].y - nc0[i].y);
    }
  }
  return out;
}

SpectralField nudged_step(const SpectralField& v, double gamma, const DataSignal& data, double t,
                          const AssimConfig& cfg, const PhysicsConfig& phys) {
  cfg.validate();
  if (gamma < cfg.nu0) throw InvalidArgument("nudged_step needs gamma >= nu0");
  NudgedStepper stepper(phys, cfg, gamma, phys.dt);
  return stepper.step(v, data.at(t), data.at(t + phys.dt));
}

AprioriBounds apriori_bounds(double force_l2, double force_h1, double sup_phi_l2,
                             double sup_phi_h1, double mu0, double nu0, double kappa0) {
  AprioriBounds b;
  b.sup_phi_l2 = sup_phi_l2;
  b.sup_phi_h1 = sup_phi_h1;
  const double s = nu0 * kappa0 * kappa0;
  b.M_H = std::sqrt(2.0) * std::sqrt(force_l2 * force_l2 / (s * s) + mu0 * mu0 * sup_phi_l2 * sup_phi_l2);
  b.M_V = std::sqrt(2.0) * std::sqrt(force_h1 * force_h1 / (s * s) + mu0 * mu0 * sup_phi_h1 * sup_phi_h1);
  return b;
}

AprioriBounds apriori_bounds(const DataSignal& data, std::size_t first, std::size_t last,
                             const SpectralField& force, double mu0, double nu0) {
  double sup_l2 = 0.0, sup_h1 = 0.0;
  for (std::size_t i = first; i <= last; ++i) {
    const auto [l2, h1] = sample_norms(data, i);
    sup_l2 = std::max(sup_l2, l2);
    sup_h1 = std::max(sup_h1, h1);
  }
  return apriori_bounds(l2_norm(force), h1_norm(force), sup_l2, sup_h1, mu0, nu0,
                        data.grid().kappa0());
}

ConditionResult determining_map_condition(const DataSignal& data, const AssimConfig& cfg,
                                          const PhysicsConfig& phys) {
  const auto span = window_span(data, cfg);
  const auto b = apriori_bounds(data, span.first, span.t, phys.force, cfg.mu0, cfg.nu0);
  const double k0 = phys.grid.kappa0();
  const double rhs = 8.0 / (cfg.nu0 * k0) * std::sqrt(2.0) *
                     (h1_norm(phys.force) / (cfg.nu0 * k0 * k0 * cfg.N * cfg.N) + cfg.mu0 * b.sup_phi_h1);
  return make_condition("N-determining", "N >= 8/(nu0 kappa0) sqrt2 (||f||/(nu0 kappa0^2 N^2) + mu0 R)",
                        cfg.N, rhs, false, "R = sup ||phi|| over the spin-up and window");
}

void run_determining_map(double gamma, const DataSignal& data, const AssimConfig& cfg,
                         const PhysicsConfig& phys,
                         const std::function<void(std::size_t, const SpectralField&)>& visit,
                         const DeterminingMapOptions& opts) {
  cfg.validate();
  if (!(gamma > 0.0)) throw InvalidArgument("determining map needs gamma > 0");
  if (!(data.grid() == phys.grid)) throw InvalidArgument("data and physics grids differ");
  if (std::abs(data.cutoff() - cfg.N) > 1e-12 * cfg.N) {
    throw InvalidArgument("data cutoff " + fmt(data.cutoff()) + " differs from configured N " + fmt(cfg.N));
  }
  const auto span = window_span(data, cfg);
  enforce(determining_map_condition(data, cfg, phys), cfg.mode);

  const int substeps = std::max(1, static_cast<int>(std::lround(data.dt() / phys.dt)));
  NudgedStepper stepper(phys, cfg, gamma, data.dt() / substeps);

  SpectralField v = opts.v0 ? *opts.v0 : SpectralField(phys.grid);
  if (!(v.grid() == phys.grid)) throw InvalidArgument("initial field lives on a different grid");
  if (span.first == span.s) visit(span.s, v);
  for (std::size_t i = span.first; i < span.t; ++i) {
    const SpectralField a = data.sample(i);
    const SpectralField b = data.sample(i + 1);
    if (substeps == 1) {
      v = stepper.step(v, a, b);
    } else {
      SpectralField now = a;
      for (int j = 1; j <= substeps; ++j) {
        const double theta = static_cast<double>(j) / substeps;
        SpectralField next = a * (1.0 - theta) + b * theta;
        v = stepper.step(v, now, next);
        now = std::move(next);
      }
    }
    if (i + 1 >= span.s) visit(i + 1, v);
  }
}

Trajectory determining_map(double gamma, const DataSignal& data, const AssimConfig& cfg,
                           const PhysicsConfig& phys, const DeterminingMapOptions& opts) {
  Trajectory out(phys.grid);
  out.dt_record = data.dt();
  out.t0 = cfg.s;
  out.provenance = {{"gamma", gamma}, {"N", cfg.N}, {"mu0", cfg.mu0}};
  run_determining_map(
      gamma, data, cfg, phys, [&](std::size_t, const SpectralField& v) { out.states.push_back(v); },
      opts);
  return out;
}

LipschitzProbe lipschitz_probe(double gamma1, double gamma2, const DataSignal& data,
                               const AssimConfig& cfg, const PhysicsConfig& phys, double p) {
  cfg.validate();
  for (double g : {gamma1, gamma2}) {
    if (g < cfg.nu0 || g > cfg.nu1) throw InvalidArgument("lipschitz_probe needs gamma in [nu0, nu1]");
  }
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("interpolation parameter p must lie in [0, 1]");
  const double k0 = phys.grid.kappa0();
  const auto span = window_span(data, cfg);
  const auto b = apriori_bounds(data, span.first, span.t, phys.force, cfg.mu0, cfg.nu0);
  enforce(make_condition("gain-ratio", "mu0 >= nu1/nu0", cfg.mu0, cfg.nu1 / cfg.nu0, false), cfg.mode);
  enforce(make_condition("N-lipschitz", "N >= 8/(nu0 kappa0) M_V(phi)", cfg.N, 8.0 / (cfg.nu0 * k0) * b.M_V, false),
          cfg.mode);

  const auto v1 = determining_map(gamma1, data, cfg, phys);
  const auto v2 = determining_map(gamma2, data, cfg, phys);
  LipschitzProbe r;
  for (std::size_t i = 0; i < v1.size(); ++i) {
    r.measured = std::max(r.measured, l2_norm(v1.states[i] - v2.states[i]));
    r.sup_mean_h1 = std::max(r.sup_mean_h1, h1_norm((v1.states[i] + v2.states[i]) * 0.5));
  }
  const double dg = std::abs(gamma1 - gamma2);
  const double gbar = 0.5 * (gamma1 + gamma2);
  const double sq = 5.0 * std::pow(dg, 2.0 - p) / std::pow(gbar, 1.0 - p) * r.sup_mean_h1 *
                    r.sup_mean_h1 / (cfg.nu0 * k0 * k0 * cfg.N * cfg.N);
  r.bound = std::sqrt(sq);
  return r;
}

}  // namespace visconv
