#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "visconv/assimilation.hpp"
#include "visconv/conditions.hpp"

namespace visconv {

/// (1/(t-s)) int_s^t e^{-mu(t-tau)} phi(tau) dtau for samples phi(s + j dt),
/// j = 0..n-1, t = s + (n-1) dt. The samples are joined linearly and each
/// piece is integrated exactly against the weight, so the result is the
/// trapezoid rule at mu = 0 and exact for constant or linear phi.
double exp_weighted_average(std::span<const double> samples, double dt, double mu);

/// <|P_N u|^2>_s^t from the data alone.
double weighted_data_energy(const DataSignal& data, const AssimConfig& cfg);

/// L(gamma) = max over window samples of |P_N W(gamma, phi) - phi|.
double loss(double gamma, const DataSignal& data, const AssimConfig& cfg, const PhysicsConfig& phys);

struct GammaUpdate {
  double gamma = 0.0;   // input
  double next = 0.0;    // Gamma(gamma)
  double loss = 0.0;    // L(gamma) from the same determining-map run
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
  double denominator = 0.0;  // <|P_N u|^2>
};

/// The viscosity update map Gamma. Throws DegenerateData when the weighted
/// data energy on the window vanishes.
GammaUpdate gamma_update_detail(double gamma, const DataSignal& data, const AssimConfig& cfg,
                                const PhysicsConfig& phys);
double gamma_update(double gamma, const DataSignal& data, const AssimConfig& cfg,
                    const PhysicsConfig& phys);

enum class RecoveryStatus { running, converged, condition_failed, max_iter };
std::string to_string(RecoveryStatus s);

struct RecoveryState {
  std::vector<double> gamma_history;  // gamma_0, gamma_1, ...
  std::vector<double> loss_history;   // L(gamma_k) for k < gamma_history.size() - 1
  std::vector<double> contraction_estimates;  // |G(g_k) - G(g_{k-1})| / |g_k - g_{k-1}|, k >= 1
  std::vector<double> wall_seconds;   // per update
  double eps1 = 0.0;
  double eps2 = 0.0;
  RecoveryStatus status = RecoveryStatus::running;
  std::string failure;

  double gamma() const { return gamma_history.back(); }
  int iterations() const { return static_cast<int>(gamma_history.size()) - 1; }
};

struct RecoveryOptions {
  double gamma0 = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  int max_iter = 30;
  std::function<void(const RecoveryState&)> on_iteration;
};

/// Fixed-point iteration gamma <- Gamma(gamma) until
/// |gamma_new - gamma| / (nu1 - nu0) <= eps2 / (nu1 - nu0 + eps1). An iterate
/// outside [nu0 - eps1, nu1 + eps1] ends the run with condition_failed.
RecoveryState recover_viscosity(const DataSignal& data, const AssimConfig& cfg,
                                const PhysicsConfig& phys, const RecoveryOptions& opts);

/// (int (f,u) - (|u(t)|^2 - |u(s)|^2)/2) / int ||u||^2, trapezoid quadrature.
/// Test oracle: needs the full state.
double direct_viscosity(const Trajectory& truth, const SpectralField& force, double s, double t);

struct BoundsReport {
  double s = 0.0, t = 0.0;
  double N = 0.0, mu0 = 0.0, mu = 0.0, nu0 = 0.0, nu1 = 0.0;
  std::optional<double> eps1;
  double G = 0.0;  // max(|f|/(nu0 kappa0)^2, ||f||/(nu0^2 kappa0^3))
  double M_H = 0.0, M_V = 0.0, M_1 = 0.0, M_2 = 0.0;
  double gamma2 = 0.0;  // viscosity used in M_2
  double sup_data_l2 = 0.0, sup_data_h1 = 0.0;
  double inf_data_l2_sq = 0.0;
  double weighted_energy = 0.0;  // <|P_N u|^2>
  double delta_window = 0.0;     // e^{-mu (t - s)}
  std::optional<double> n0;      // empty: data vanish on the window
  double log_sum = 0.0;          // sum_{0<|k|<=N} 1/|k|^2
  double log_const_exact = 0.0;  // log_sum / ln(N+1)
  double log_const_fixed = 21.0;
  double delta_proxy = 0.0;      // inf |P_N u|, stands in for d_H(0, A)
  std::optional<double> eps1_lower_bound;
  bool degenerate = false;
  std::vector<ConditionResult> conditions;

  const ConditionResult* find(const std::string& name) const;
  /// The contraction conditions all hold.
  bool contraction_guaranteed() const;
};

/// Constants and sufficiency conditions from observable quantities: norms
/// of the data phi = P_N u on the window and of f. M_H, M_V are evaluated
/// with phi in place of u. eps1 enables the contraction conditions.
BoundsReport bounds_report(const DataSignal& data, const SpectralField& force,
                           const AssimConfig& cfg, const PhysicsConfig& phys,
                           std::optional<double> eps1 = std::nullopt);

nlohmann::json to_json(const BoundsReport& r);

}  // namespace visconv
