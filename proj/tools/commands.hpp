#pragma once

#include <iosfwd>
#include <optional>

#include "experiment_config.hpp"

namespace visconv::workbench {

enum ExitCode { kSuccess = 0, kUsageError = 1, kConditionFailure = 2 };

struct CommandContext {
  ExperimentConfig config;
  std::optional<std::filesystem::path> observations;  // input override
  std::optional<std::filesystem::path> truth;         // observe input
  int jobs = 1;
  bool strict = false;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

int cmd_simulate(const CommandContext& ctx);
int cmd_observe(const CommandContext& ctx);
int cmd_recover(const CommandContext& ctx);
int cmd_loss_scan(const CommandContext& ctx);
int cmd_verify(const CommandContext& ctx);

/// Evaluates L(gamma) for every grid value on up to `jobs` threads.
std::vector<double> scan_losses(const std::vector<double>& gammas, const DataSignal& data,
                                const AssimConfig& cfg, const PhysicsConfig& phys, int jobs);

/// Runs a command and maps library exceptions onto the exit-code contract.
int run_guarded(int (*command)(const CommandContext&), const CommandContext& ctx);

}  // namespace visconv::workbench
