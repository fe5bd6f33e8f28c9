#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "visconv/spectral_field.hpp"

namespace visconv {

/// Uniformly sampled states u(t0 + i dt_record), optionally truncated to
/// the observed modes |k| < cutoff.
struct Trajectory {
  explicit Trajectory(const TorusGrid& g) : grid(g) {}

  TorusGrid grid;
  double t0 = 0.0;
  double dt_record = 0.0;
  std::vector<SpectralField> states;
  std::optional<double> cutoff;     // N, or empty for the full state
  std::optional<double> nu;         // viscosity of the generating run, if known
  std::size_t transient_count = 0;  // leading samples recorded before spin-up ended
  nlohmann::json provenance = nlohmann::json::object();  // force spec, config echo

  std::size_t size() const noexcept { return states.size(); }
  double time(std::size_t i) const noexcept { return t0 + static_cast<double>(i) * dt_record; }
  double end_time() const noexcept { return states.empty() ? t0 : time(states.size() - 1); }
  bool truncated() const noexcept { return cutoff.has_value(); }

  /// Index of the sample at time t. Throws DataRangeError if t is not a
  /// sample time (within 1e-9 of the spacing) or lies outside the record.
  std::size_t index_of(double t) const;
};

/// Half-width of the coefficient rectangle written to disk.
int stored_half_width(const Trajectory& traj);

/// P_N applied to every state; the result carries cutoff = n.
Trajectory observe(const Trajectory& truth, double n);

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory(const std::filesystem::path& path);

}  // namespace visconv
