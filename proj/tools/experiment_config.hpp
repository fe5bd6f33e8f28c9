#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "visconv/assimilation.hpp"
#include "visconv/nse_sim.hpp"

namespace visconv::workbench {

inline constexpr const char* kConfigFormat = "visconv-config/1";

/// Thrown for malformed or unknown configuration entries (exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  // physics
  double L = 0.0;
  int M = 64;
  double nu = 0.1;
  double dt = 0.01;
  std::optional<double> spinup;  // default 20 / (nu kappa0^2)
  double t_end = 20.0;           // recorded time after spin-up
  std::uint64_t seed = 1;
  std::string initial = "random";  // random | stationary | zero
  double initial_l2 = 1.0;
  std::optional<double> grashof;  // rescales the force to |f| = G nu^2 kappa0^2
  ForceSpec force;
  bool force_given = false;

  // observation
  double N = 8.0;
  int record_every = 1;
  std::optional<std::pair<double, double>> window;

  // assimilation
  double mu0 = 10.0;
  double nu0 = 0.05;
  double nu1 = 0.5;
  std::optional<double> assim_spinup;

  // recovery
  std::optional<double> gamma0;  // default nu1
  std::optional<double> eps1;    // default nu0 / 2
  double eps2 = 1e-6;
  int max_iter = 30;
  ConditionMode mode = ConditionMode::advisory;

  // loss_scan
  std::optional<std::vector<double>> gammas;
  std::optional<double> scan_from, scan_to;  // default nu0, nu1
  int scan_count = 21;

  // output
  std::filesystem::path truth_path = "truth.vsct";
  std::filesystem::path observations_path = "observations.vsct";
  std::filesystem::path recovery_csv = "recovery.csv";
  std::filesystem::path report_json = "report.json";
  std::filesystem::path loss_csv = "loss_scan.csv";

  double length() const;
  double effective_spinup() const;
  double effective_gamma0() const;
  double effective_eps1() const;
  std::vector<double> scan_grid() const;

  /// Grid, force and time step; the force is rescaled when grashof is set.
  PhysicsConfig physics() const;
  /// Window defaults to the final quarter of the data record, snapped to samples.
  AssimConfig assimilation(const DataSignal& data) const;

  /// Every field with defaults materialized.
  nlohmann::json effective() const;
};

/// Parses a config document. Unknown sections or keys are rejected.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

ForceSpec parse_force(const nlohmann::json& j);

}  // namespace visconv::workbench
