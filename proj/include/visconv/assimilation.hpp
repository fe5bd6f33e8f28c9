#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "visconv/conditions.hpp"
#include "visconv/nse_sim.hpp"
#include "visconv/spectral_field.hpp"
#include "visconv/trajectory.hpp"

namespace visconv {

struct AssimConfig {
  double N = 1.0;
  double mu0 = 1.0;
  double nu0 = 0.0;
  double nu1 = 0.0;
  std::optional<double> spinup_time;  // default: forgetting time for e^{-beta T} = 1e-10
  double s = 0.0;
  double t = 0.0;
  ConditionMode mode = ConditionMode::advisory;

  /// Throws InvalidArgument unless N >= 1, mu0 > 0, 0 < nu0 < nu1, s < t.
  void validate() const;

  /// mu = mu0 nu0 kappa0^2 N^2.
  double mu(double kappa0) const;
  /// Forgetting rate nu0 kappa0^2 N^2.
  double beta(double kappa0) const;
  double effective_spinup(double kappa0) const;
};

/// Observations P_N u sampled uniformly in time, reconstructed piecewise
/// linearly in between. Only the observed coefficients |k| < N are stored.
class DataSignal {
 public:
  explicit DataSignal(const Trajectory& observations);

  const TorusGrid& grid() const noexcept { return grid_; }
  double cutoff() const noexcept { return cutoff_; }
  double t_begin() const noexcept { return t0_; }
  double t_end() const noexcept { return t0_ + dt_ * static_cast<double>(samples_.size() - 1); }
  double dt() const noexcept { return dt_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double time(std::size_t i) const noexcept { return t0_ + dt_ * static_cast<double>(i); }

  /// Sample index of time t; throws DataRangeError if t is not a sample time.
  std::size_t index_of(double t) const;

  const std::vector<std::pair<int, int>>& observed_modes() const noexcept { return modes_; }
  std::span<const ModeVector> sample_coefficients(std::size_t i) const { return samples_.at(i); }

  SpectralField sample(std::size_t i) const;
  /// phi(t); throws DataRangeError outside [t_begin, t_end].
  SpectralField at(double t) const;

 private:
  TorusGrid grid_;
  double cutoff_;
  double t0_;
  double dt_;
  std::vector<std::pair<int, int>> modes_;
  std::vector<std::vector<ModeVector>> samples_;
};

/// Throws InvalidArgument unless the data were truncated at cfg.N.
void require_matching_cutoff(const DataSignal& data, const AssimConfig& cfg);

/// One step of dv/dt + gamma A v + B(v,v) = f + mu (phi - P_N v). gamma A is
/// integrated exactly per mode, mu P_N v with a trapezoidal (A-stable)
/// weight, B, f and mu phi explicitly through the ETD2RK stages.
class NudgedStepper {
 public:
  NudgedStepper(const PhysicsConfig& phys, const AssimConfig& cfg, double gamma, double h);

  double h() const noexcept { return h_; }
  /// phi_now and phi_next are the data at the start and end of the step.
  SpectralField step(const SpectralField& v, const SpectralField& phi_now,
                     const SpectralField& phi_next) const;

 private:
  SpectralField force_;
  double cfl_limit_;
  double mu_;
  double h_;
  std::vector<double> e_, p1_, p2_;
  std::vector<unsigned char> observed_;
};

/// One step of length phys.dt from time t.
SpectralField nudged_step(const SpectralField& v, double gamma, const DataSignal& data, double t,
                          const AssimConfig& cfg, const PhysicsConfig& phys);

/// M_H(phi) = sqrt2 sqrt(|f|^2/(nu0 kappa0^2)^2 + mu0^2 sup|phi|^2), and M_V
/// likewise with ||f|| and sup ||phi||.
struct AprioriBounds {
  double sup_phi_l2 = 0.0;
  double sup_phi_h1 = 0.0;
  double M_H = 0.0;
  double M_V = 0.0;
};

AprioriBounds apriori_bounds(double force_l2, double force_h1, double sup_phi_l2,
                             double sup_phi_h1, double mu0, double nu0, double kappa0);

/// Sup norms of the data over samples [first, last].
AprioriBounds apriori_bounds(const DataSignal& data, std::size_t first, std::size_t last,
                             const SpectralField& force, double mu0, double nu0);

/// Condition N >= 8/(nu0 kappa0) sqrt2 (||f||/(nu0 kappa0^2 N^2) + mu0 R) with
/// R = sup ||phi|| over [s - spinup, t].
ConditionResult determining_map_condition(const DataSignal& data, const AssimConfig& cfg,
                                          const PhysicsConfig& phys);

struct DeterminingMapOptions {
  const SpectralField* v0 = nullptr;  // default: zero field
};

/// Streams W(gamma, phi) at every data sample time in [s, t]. The nudged
/// system runs from v0 at the last sample time <= s - spinup; the step is
/// the data spacing divided into round(spacing / phys.dt) substeps.
void run_determining_map(double gamma, const DataSignal& data, const AssimConfig& cfg,
                         const PhysicsConfig& phys,
                         const std::function<void(std::size_t, const SpectralField&)>& visit,
                         const DeterminingMapOptions& opts = {});

/// W(gamma, phi) restricted to the window [s, t], full state.
Trajectory determining_map(double gamma, const DataSignal& data, const AssimConfig& cfg,
                           const PhysicsConfig& phys, const DeterminingMapOptions& opts = {});

struct LipschitzProbe {
  double measured = 0.0;  // sup_[s,t] |v1 - v2|
  double bound = 0.0;     // Lipschitz bound, identical data
  double sup_mean_h1 = 0.0;
  bool holds() const { return measured <= bound; }
};

/// sup |W(gamma1) - W(gamma2)| against
/// sqrt(5 |dg|^{2-p} / gbar^{1-p} sup ||(v1 + v2)/2||^2 / (nu0 kappa0^2 N^2)).
LipschitzProbe lipschitz_probe(double gamma1, double gamma2, const DataSignal& data,
                               const AssimConfig& cfg, const PhysicsConfig& phys, double p = 0.0);

}  // namespace visconv
