#include "experiment_config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "visconv/errors.hpp"
#include "visconv/spectral_ops.hpp"

namespace visconv::workbench {

namespace {

using nlohmann::json;

void reject_unknown(const json& section, const std::string& name, const std::set<std::string>& allowed) {
  if (!section.is_object()) throw ConfigError("config section '" + name + "' must be an object");
  for (const auto& [key, value] : section.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + name + "." + key + "'");
  }
}

template <class T>
void read(const json& section, const char* key, T& out) {
  if (!section.contains(key) || section.at(key).is_null()) return;
  try {
    out = section.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <class T>
void read(const json& section, const char* key, std::optional<T>& out) {
  if (!section.contains(key) || section.at(key).is_null()) return;
  T v{};
  read(section, key, v);
  out = v;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

Complex parse_complex(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("force coefficient must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

ForceSpec::Mode parse_mode(const json& j) {
  reject_unknown(j, "physics.force.mode", {"k", "c", "type"});
  if (!j.contains("k") || !j.at("k").is_array() || j.at("k").size() != 2) {
    throw ConfigError("force mode needs k = [k1, k2]");
  }
  return {j.at("k")[0].get<int>(), j.at("k")[1].get<int>(), parse_complex(j.value("c", json::array({1.0, 0.0})))};
}

}  // namespace

ForceSpec parse_force(const json& j) {
  if (!j.is_object() || !j.contains("type")) throw ConfigError("physics.force needs a 'type'");
  const auto type = j.at("type").get<std::string>();
  if (type == "single_mode") {
    reject_unknown(j, "physics.force", {"type", "k", "c"});
    const auto m = parse_mode(j);
    return ForceSpec::single_mode(m.k1, m.k2, m.c);
  }
  if (type == "multi_mode") {
    reject_unknown(j, "physics.force", {"type", "modes"});
    std::vector<ForceSpec::Mode> modes;
    for (const auto& m : j.at("modes")) modes.push_back(parse_mode(m));
    if (modes.empty()) throw ConfigError("multi_mode force needs at least one mode");
    return ForceSpec::multi_mode(std::move(modes));
  }
  if (type == "file") {
    reject_unknown(j, "physics.force", {"type", "path"});
    return ForceSpec::from_file(j.at("path").get<std::string>());
  }
  throw ConfigError("unknown force type '" + type + "'");
}

double ExperimentConfig::length() const { return L > 0.0 ? L : 2.0 * std::numbers::pi; }

double ExperimentConfig::effective_spinup() const {
  if (spinup) return *spinup;
  const double k0 = 2.0 * std::numbers::pi / length();
  const double raw = 20.0 / (nu * k0 * k0);
  return std::ceil(raw / dt - 1e-9) * dt;
}

double ExperimentConfig::effective_gamma0() const { return gamma0.value_or(nu1); }
double ExperimentConfig::effective_eps1() const { return eps1.value_or(0.5 * nu0); }

std::vector<double> ExperimentConfig::scan_grid() const {
  if (gammas) return *gammas;
  const double a = scan_from.value_or(nu0), b = scan_to.value_or(nu1);
  std::vector<double> g;
  if (scan_count == 1) g.push_back(a);
  for (int i = 0; scan_count > 1 && i < scan_count; ++i) g.push_back(a + (b - a) * i / (scan_count - 1));
  return g;
}

PhysicsConfig ExperimentConfig::physics() const {
  TorusGrid grid(length(), M);
  auto spec = force;
  if (grashof) {
    if (spec.kind == ForceSpec::Kind::file) throw ConfigError("grashof rescaling needs a modal force");
    const double k0 = grid.kappa0();
    const double scale = *grashof * nu * nu * k0 * k0 / l2_norm(spec.build(grid));
    for (auto& m : spec.modes) m.c *= scale;
  }
  PhysicsConfig p(grid, nu, spec.build(grid), dt, effective_spinup());
  p.force_spec = spec.to_json();
  return p;
}

AssimConfig ExperimentConfig::assimilation(const DataSignal& data) const {
  AssimConfig a;
  a.N = N;
  a.mu0 = mu0;
  a.nu0 = nu0;
  a.nu1 = nu1;
  a.spinup_time = assim_spinup;
  a.mode = mode;
  if (window) {
    a.s = window->first;
    a.t = window->second;
  } else {
    const std::size_t last = data.size() - 1;
    a.s = data.time(last - last / 4);
    a.t = data.time(last);
  }
  return a;
}

nlohmann::json ExperimentConfig::effective() const {
  json window_json = window ? json::array({window->first, window->second}) : json(nullptr);
  json gammas_json = gammas ? json(*gammas) : json(nullptr);
  return {
      {"format", kConfigFormat},
      {"physics",
       {{"L", length()},
        {"M", M},
        {"nu", nu},
        {"dt", dt},
        {"spinup", effective_spinup()},
        {"t_end", t_end},
        {"seed", seed},
        {"initial", initial},
        {"initial_l2", initial_l2},
        {"grashof", opt(grashof)},
        {"force", force.to_json()}}},
      {"observation", {{"N", N}, {"record_every", record_every}, {"window", window_json}}},
      {"assimilation", {{"mu0", mu0}, {"nu0", nu0}, {"nu1", nu1}, {"spinup", opt(assim_spinup)}}},
      {"recovery",
       {{"gamma0", effective_gamma0()},
        {"eps1", effective_eps1()},
        {"eps2", eps2},
        {"max_iter", max_iter},
        {"mode", mode == ConditionMode::strict ? "strict" : "advisory"}}},
      {"loss_scan",
       {{"gammas", gammas_json},
        {"from", gammas ? json(nullptr) : json(scan_from.value_or(nu0))},
        {"to", gammas ? json(nullptr) : json(scan_to.value_or(nu1))},
        {"count", scan_count}}},
      {"output",
       {{"truth", truth_path.string()},
        {"observations", observations_path.string()},
        {"recovery_csv", recovery_csv.string()},
        {"report_json", report_json.string()},
        {"loss_csv", loss_csv.string()}}},
  };
}

ExperimentConfig parse_config(const json& doc) {
  reject_unknown(doc, "<root>",
                 {"format", "physics", "observation", "assimilation", "recovery", "loss_scan", "output"});
  if (doc.contains("format") && doc.at("format") != kConfigFormat) {
    throw ConfigError("unsupported config format " + doc.at("format").dump());
  }
  ExperimentConfig c;
  c.force = ForceSpec::single_mode(1, 1, {0.1, 0.0});
  const json empty = json::object();
  auto section = [&](const char* name) -> const json& { return doc.contains(name) ? doc.at(name) : empty; };

  const auto& ph = section("physics");
  reject_unknown(ph, "physics",
                 {"L", "M", "nu", "dt", "spinup", "t_end", "seed", "initial", "initial_l2", "grashof", "force"});
  read(ph, "L", c.L);
  read(ph, "M", c.M);
  read(ph, "nu", c.nu);
  read(ph, "dt", c.dt);
  read(ph, "spinup", c.spinup);
  read(ph, "t_end", c.t_end);
  read(ph, "seed", c.seed);
  read(ph, "initial", c.initial);
  read(ph, "initial_l2", c.initial_l2);
  read(ph, "grashof", c.grashof);
  if (ph.contains("force") && !ph.at("force").is_null()) {
    c.force = parse_force(ph.at("force"));
    c.force_given = true;
  }
  if (c.initial != "random" && c.initial != "stationary" && c.initial != "zero") {
    throw ConfigError("physics.initial must be random, stationary or zero");
  }
  if (!(c.nu > 0.0)) throw ConfigError("physics.nu must be positive");
  if (!(c.dt > 0.0)) throw ConfigError("physics.dt must be positive");
  if (!(c.t_end >= 0.0)) throw ConfigError("physics.t_end must be nonnegative");

  const auto& ob = section("observation");
  reject_unknown(ob, "observation", {"N", "record_every", "window"});
  read(ob, "N", c.N);
  read(ob, "record_every", c.record_every);
  if (ob.contains("window") && !ob.at("window").is_null()) {
    const auto& w = ob.at("window");
    if (!w.is_array() || w.size() != 2) throw ConfigError("observation.window must be [s, t]");
    c.window = std::pair{w[0].get<double>(), w[1].get<double>()};
  }
  if (c.record_every < 1) throw ConfigError("observation.record_every must be >= 1");

  const auto& as = section("assimilation");
  reject_unknown(as, "assimilation", {"mu0", "nu0", "nu1", "spinup"});
  read(as, "mu0", c.mu0);
  read(as, "nu0", c.nu0);
  read(as, "nu1", c.nu1);
  read(as, "spinup", c.assim_spinup);

  const auto& rc = section("recovery");
  reject_unknown(rc, "recovery", {"gamma0", "eps1", "eps2", "max_iter", "mode"});
  read(rc, "gamma0", c.gamma0);
  read(rc, "eps1", c.eps1);
  read(rc, "eps2", c.eps2);
  read(rc, "max_iter", c.max_iter);
  std::string mode = "advisory";
  read(rc, "mode", mode);
  if (mode == "strict") {
    c.mode = ConditionMode::strict;
  } else if (mode != "advisory") {
    throw ConfigError("recovery.mode must be strict or advisory");
  }

  const auto& ls = section("loss_scan");
  reject_unknown(ls, "loss_scan", {"gammas", "from", "to", "count"});
  read(ls, "gammas", c.gammas);
  read(ls, "from", c.scan_from);
  read(ls, "to", c.scan_to);
  read(ls, "count", c.scan_count);
  if (c.scan_count < 0) throw ConfigError("loss_scan.count must be >= 0");

  const auto& out = section("output");
  reject_unknown(out, "output", {"truth", "observations", "recovery_csv", "report_json", "loss_csv"});
  std::string p;
  auto path = [&](const char* key, std::filesystem::path& dst) {
    p.clear();
    read(out, key, p);
    if (!p.empty()) dst = p;
  };
  path("truth", c.truth_path);
  path("observations", c.observations_path);
  path("recovery_csv", c.recovery_csv);
  path("report_json", c.report_json);
  path("loss_csv", c.loss_csv);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

}  // namespace visconv::workbench
