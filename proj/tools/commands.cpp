#include "commands.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "visconv/errors.hpp"
#include "visconv/inverse_solver.hpp"
#include "visconv/spectral_ops.hpp"

namespace visconv::workbench {

namespace {

using nlohmann::json;

constexpr const char* kLossFormat = "visconv-loss-scan/1";
constexpr const char* kRecoveryFormat = "visconv-recovery/1";

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void ensure_parent(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
}

std::ofstream open_output(const std::filesystem::path& p) {
  ensure_parent(p);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::ios_base::failure("cannot write " + p.string());
  return out;
}

// CSV preamble: format and effective config as comment lines.
void csv_preamble(std::ostream& os, const char* format, const json& config) {
  os << "# format: " << format << "\n# config: " << config.dump() << "\n";
}

void write_json(const std::filesystem::path& p, const json& j) {
  auto out = open_output(p);
  out << j.dump(2) << "\n";
}

// Observations truncated to the configured N; a file observed at a
// smaller cutoff cannot supply the missing modes.
Trajectory load_observations(const CommandContext& ctx) {
  const auto path = ctx.observations.value_or(ctx.config.observations_path);
  auto obs = read_trajectory(path);
  const double N = ctx.config.N;
  if (obs.cutoff && *obs.cutoff < N) {
    throw ConfigError(path.string() + " was observed at N = " + num(*obs.cutoff) + " < configured N = " + num(N));
  }
  if (!obs.cutoff || *obs.cutoff != N) obs = observe(obs, N);
  return obs;
}

// The force comes from the config when given, else from the observation
// file's provenance.
PhysicsConfig physics_for(const CommandContext& ctx, const Trajectory& obs) {
  auto cfg = ctx.config;
  if (!cfg.force_given && obs.provenance.contains("force") && obs.provenance.at("force").is_object()) {
    cfg.force = parse_force(obs.provenance.at("force"));
    cfg.grashof.reset();
  }
  auto phys = cfg.physics();
  if (!(phys.grid == obs.grid)) {
    throw ConfigError("observation grid (L = " + num(obs.grid.length()) + ", M = " +
                      std::to_string(obs.grid.resolution()) + ") differs from the configured physics");
  }
  return phys;
}

json effective_with(const CommandContext& ctx, const PhysicsConfig& phys, const AssimConfig* a) {
  auto j = ctx.config.effective();
  j["physics"]["force"] = phys.force_spec;
  if (a) j["observation"]["window"] = json::array({a->s, a->t});
  if (ctx.strict) j["recovery"]["mode"] = "strict";
  return j;
}

AssimConfig assimilation_for(const CommandContext& ctx, const DataSignal& data) {
  auto a = ctx.config.assimilation(data);
  if (ctx.strict) a.mode = ConditionMode::strict;
  return a;
}

const ConditionResult* first_failure(const BoundsReport& r) {
  for (const auto& c : r.conditions) {
    if (!c.pass) return &c;
  }
  return nullptr;
}

void print_condition_failure(std::ostream& os, const ConditionResult& c) {
  os << "condition failed: " << c.name << ": " << c.inequality << " (lhs " << num(c.lhs) << ", rhs "
     << num(c.rhs) << ")\n";
}

}  // namespace

int cmd_simulate(const CommandContext& ctx) {
  const auto& c = ctx.config;
  auto phys = c.physics();
  const auto& grid = phys.grid;
  SpectralField u0(grid);
  if (c.initial == "random") {
    u0 = random_field(grid, c.seed, 8.0, 2.0, c.initial_l2);
  } else if (c.initial == "stationary") {
    u0 = apply_inverse_stokes(phys.force) * (1.0 / c.nu);
  }
  const double total = phys.spinup_time + c.t_end;
  auto truth = integrate(u0, phys, {.t_end = total, .record_every = c.record_every, .cutoff = std::nullopt, .store_transient = false});
  const auto effective = effective_with(ctx, phys, nullptr);
  truth.provenance["config"] = effective;
  truth.provenance["seed"] = c.seed;
  auto obs = observe(truth, c.N);
  ensure_parent(c.truth_path);
  ensure_parent(c.observations_path);
  write_trajectory(c.truth_path, truth);
  write_trajectory(c.observations_path, obs);

  auto& os = *ctx.out;
  const auto check = check_attractor_bounds(truth, phys);
  os << "grashof " << num(grashof(phys.force, c.nu, grid.kappa0())) << "\n";
  os << "samples " << truth.size() << " from t = " << num(truth.t0) << " to " << num(truth.end_time()) << "\n";
  os << "attractor |u| " << num(check.sup_l2) << " <= " << num(check.bound_l2) << (check.l2_ok() ? " ok" : " VIOLATED")
     << "\n";
  os << "attractor ||u|| " << num(check.sup_h1) << " <= " << num(check.bound_h1)
     << (check.h1_ok() ? " ok" : " VIOLATED") << "\n";
  os << "attractor |Au| " << num(check.sup_stokes) << " <= " << num(check.bound_stokes)
     << (check.stokes_ok() ? " ok" : " VIOLATED") << "\n";
  if (truth.size() >= 2) {
    os << "energy residual " << num(energy_balance_residual(truth, phys, truth.t0, truth.end_time())) << "\n";
  }
  os << "edge shell fraction " << num(edge_shell_energy_fraction(truth.states.back())) << "\n";
  os << "wrote " << c.truth_path.string() << " and " << c.observations_path.string() << "\n";
  return kSuccess;
}

int cmd_observe(const CommandContext& ctx) {
  const auto input = ctx.truth.value_or(ctx.config.truth_path);
  const auto truth = read_trajectory(input);
  auto obs = observe(truth, ctx.config.N);
  obs.provenance["observed_from"] = input.filename().string();
  ensure_parent(ctx.config.observations_path);
  write_trajectory(ctx.config.observations_path, obs);
  *ctx.out << "wrote " << ctx.config.observations_path.string() << " (N = " << num(ctx.config.N) << ", "
           << obs.size() << " samples)\n";
  return kSuccess;
}

int cmd_verify(const CommandContext& ctx) {
  const auto obs = load_observations(ctx);
  const DataSignal data(obs);
  const auto phys = physics_for(ctx, obs);
  const auto a = assimilation_for(ctx, data);
  const auto report = bounds_report(data, phys.force, a, phys, ctx.config.effective_eps1());
  auto j = to_json(report);
  j["config"] = effective_with(ctx, phys, &a);
  write_json(ctx.config.report_json, j);

  auto& os = *ctx.out;
  for (const auto& c : report.conditions) {
    os << (c.pass ? "pass " : "FAIL ") << c.name << " margin " << num(c.margin()) << "\n";
  }
  if (report.degenerate) os << "degenerate: the data vanish on the window\n";
  os << "wrote " << ctx.config.report_json.string() << "\n";
  if (a.mode == ConditionMode::strict) {
    if (const auto* f = first_failure(report)) {
      print_condition_failure(*ctx.err, *f);
      return kConditionFailure;
    }
  }
  return kSuccess;
}

int cmd_recover(const CommandContext& ctx) {
  const auto obs = load_observations(ctx);
  const DataSignal data(obs);
  const auto phys = physics_for(ctx, obs);
  const auto a = assimilation_for(ctx, data);
  const double eps1 = ctx.config.effective_eps1();
  const auto effective = effective_with(ctx, phys, &a);

  const auto report = bounds_report(data, phys.force, a, phys, eps1);
  auto rj = to_json(report);
  rj["config"] = effective;
  write_json(ctx.config.report_json, rj);
  if (a.mode == ConditionMode::strict) {
    if (const auto* f = first_failure(report)) {
      print_condition_failure(*ctx.err, *f);
      return kConditionFailure;
    }
  }

  auto csv = open_output(ctx.config.recovery_csv);
  csv_preamble(csv, kRecoveryFormat, effective);
  csv << "iteration,gamma,loss,contraction_estimate,wall_seconds\n";
  csv.flush();
  auto& os = *ctx.out;
  RecoveryOptions opts{.gamma0 = ctx.config.effective_gamma0(),
                       .eps1 = eps1,
                       .eps2 = ctx.config.eps2,
                       .max_iter = ctx.config.max_iter,
                       .on_iteration = [&](const RecoveryState& st) {
                         const int k = st.iterations();
                         const auto& ce = st.contraction_estimates;
                         const std::string est = k >= 2 ? num(ce[static_cast<std::size_t>(k - 2)]) : "";
                         csv << k - 1 << "," << num(st.gamma_history[k - 1]) << ","
                             << num(st.loss_history[k - 1]) << "," << est << ","
                             << num(st.wall_seconds[k - 1]) << "\n";
                         csv.flush();
                         os << "iteration " << k << " gamma " << num(st.gamma()) << "\n";
                       }};
  const auto st = recover_viscosity(data, a, phys, opts);
  csv << st.iterations() << "," << num(st.gamma()) << ",,,\n";

  os << "status " << to_string(st.status) << " gamma " << num(st.gamma()) << " after " << st.iterations()
     << " iterations\n";
  if (st.status == RecoveryStatus::converged) return kSuccess;
  if (!st.failure.empty()) *ctx.err << st.failure << "\n";
  return kConditionFailure;
}

std::vector<double> scan_losses(const std::vector<double>& gammas, const DataSignal& data,
                                const AssimConfig& cfg, const PhysicsConfig& phys, int jobs) {
  std::vector<double> out(gammas.size(), 0.0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < gammas.size(); i = next++) {
      try {
        out[i] = loss(gammas[i], data, cfg, phys);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const auto n = static_cast<std::size_t>(std::max(1, jobs));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < std::min(n, gammas.size()); ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

int cmd_loss_scan(const CommandContext& ctx) {
  const auto obs = load_observations(ctx);
  const DataSignal data(obs);
  const auto phys = physics_for(ctx, obs);
  const auto a = assimilation_for(ctx, data);
  const auto grid = ctx.config.scan_grid();
  const auto losses = scan_losses(grid, data, a, phys, ctx.jobs);

  auto csv = open_output(ctx.config.loss_csv);
  csv_preamble(csv, kLossFormat, effective_with(ctx, phys, &a));
  csv << "gamma,loss\n";
  std::size_t best = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    csv << num(grid[i]) << "," << num(losses[i]) << "\n";
    if (losses[i] < losses[best]) best = i;
  }
  if (!grid.empty()) *ctx.out << "minimum loss " << num(losses[best]) << " at gamma " << num(grid[best]) << "\n";
  *ctx.out << "wrote " << ctx.config.loss_csv.string() << "\n";
  return kSuccess;
}

int run_guarded(int (*command)(const CommandContext&), const CommandContext& ctx) {
  auto& err = *ctx.err;
  try {
    return command(ctx);
  } catch (const ConditionFailure& e) {
    err << "condition failed: " << e.what() << "\n";
    return kConditionFailure;
  } catch (const DegenerateData& e) {
    err << e.what() << "\n";
    return kConditionFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
}

}  // namespace visconv::workbench
