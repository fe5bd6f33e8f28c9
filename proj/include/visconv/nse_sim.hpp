#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "visconv/spectral_field.hpp"
#include "visconv/trajectory.hpp"

namespace visconv {

/// Time-independent body force, built from k_perp directions so that the
/// result is mean-free and divergence-free.
struct ForceSpec {
  enum class Kind { single_mode, multi_mode, file };
  struct Mode {
    int k1 = 1;
    int k2 = 0;
    Complex c{};
  };

  Kind kind = Kind::multi_mode;
  std::vector<Mode> modes;  // one entry for single_mode
  std::filesystem::path path;

  static ForceSpec single_mode(int k1, int k2, Complex c);
  static ForceSpec multi_mode(std::vector<Mode> modes);
  static ForceSpec from_file(std::filesystem::path path);

  /// Sum of single-mode fields, or the first state of a VSCT1 file.
  SpectralField build(const TorusGrid& grid) const;

  nlohmann::json to_json() const;
};

struct PhysicsConfig {
  PhysicsConfig(const TorusGrid& grid, double nu, SpectralField force, double dt,
                double spinup_time);

  TorusGrid grid;
  double nu;
  SpectralField force;
  double dt;
  double spinup_time;
  double cfl_limit = 0.5;
  nlohmann::json force_spec = nullptr;  // echoed into trajectory headers
};

/// Second-order exponential time differencing (ETD2RK) for
/// du/dt + nu A u + B(u,u) = f. The viscous term is integrated exactly per
/// mode; B and f enter through the phi-function quadrature.
class ForwardStepper {
 public:
  explicit ForwardStepper(const PhysicsConfig& cfg);

  /// One step of length cfg.dt. Throws StepRejected if dt max|u| M / L
  /// exceeds the CFL limit.
  SpectralField step(const SpectralField& u) const;

  /// CFL number measured at the start of the last step.
  double last_cfl() const noexcept { return last_cfl_; }

 private:
  PhysicsConfig cfg_;
  std::vector<double> e_, p1_, p2_;
  mutable double last_cfl_ = 0.0;
};

SpectralField step(const SpectralField& u, const PhysicsConfig& cfg);

struct IntegrateOptions {
  double t_end = 0.0;
  int record_every = 1;
  std::optional<double> cutoff;  // record P_N u instead of u
  bool store_transient = true;   // false skips recording before spinup_time
  double start_time = 0.0;
};

/// Advances u0 from start_time to start_time + t_end and records every
/// record_every-th state. The step count is t_end / dt rounded to the
/// nearest integer; t_end must be a whole number of steps within 1e-9.
Trajectory integrate(const SpectralField& u0, const PhysicsConfig& cfg,
                     const IntegrateOptions& opts);

/// G = |f| / (nu kappa0)^2.
double grashof(const SpectralField& force, double nu, double kappa0);

/// |(|u(t)|^2 - |u(s)|^2)/2 + nu int ||u||^2 - int (f,u)| / int ||u||^2
/// with trapezoid quadrature over the recorded samples in [s, t].
double energy_balance_residual(const Trajectory& traj, const PhysicsConfig& cfg, double s,
                               double t);

/// c0 = sqrt(1 + 1/(2 pi)), the Ladyzhenskaya constant.
double ladyzhenskaya_c0();

struct AttractorCheck {
  double grashof = 0.0;
  double sup_l2 = 0.0, bound_l2 = 0.0;
  double sup_h1 = 0.0, bound_h1 = 0.0;
  double sup_stokes = 0.0, bound_stokes = 0.0;
  std::size_t samples = 0;
  bool l2_ok() const { return sup_l2 <= bound_l2; }
  bool h1_ok() const { return sup_h1 <= bound_h1; }
  bool stokes_ok() const { return sup_stokes <= bound_stokes; }
  bool ok() const { return l2_ok() && h1_ok() && stokes_ok(); }
};

/// Sup norms over the non-transient samples against the global attractor
/// bounds |u| <= nu G, ||u|| <= nu kappa0 G, |Au| <= c2 nu kappa0^2 (G + c0^-2)^3.
AttractorCheck check_attractor_bounds(const Trajectory& traj, const PhysicsConfig& cfg);

}  // namespace visconv
