#include "visconv/inverse_solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "visconv/errors.hpp"
#include "visconv/spectral_ops.hpp"

namespace visconv {

namespace {

using Coeffs = std::vector<ModeVector>;

// Observed coefficients of the window [s, t] and their time derivative.
struct Window {
  std::size_t is = 0, it = 0;
  double dt = 0.0, length = 0.0, mu = 0.0, area = 0.0;
  std::vector<double> inv_stokes;  // 1/(kappa0^2 |k|^2) per observed mode
  std::vector<Coeffs> pu;
  std::vector<Coeffs> dpu;

  std::size_t count() const { return pu.size(); }
};

double dot(const Coeffs& a, const Coeffs& b, double area) {
  double s = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) {
    s += (a[m].x * std::conj(b[m].x) + a[m].y * std::conj(b[m].y)).real();
  }
  return area * s;
}

double dot_weighted(const Coeffs& a, const Coeffs& b, const std::vector<double>& w, double area) {
  double s = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) {
    s += w[m] * (a[m].x * std::conj(b[m].x) + a[m].y * std::conj(b[m].y)).real();
  }
  return area * s;
}

Coeffs combine(const Coeffs& a, double ca, const Coeffs& b, double cb) {
  Coeffs out(a.size());
  for (std::size_t m = 0; m < a.size(); ++m) {
    out[m] = {ca * a[m].x + cb * b[m].x, ca * a[m].y + cb * b[m].y};
  }
  return out;
}

Window make_window(const DataSignal& data, const AssimConfig& cfg) {
  require_matching_cutoff(data, cfg);
  Window w;
  w.is = data.index_of(cfg.s);
  w.it = data.index_of(cfg.t);
  if (w.it < w.is + 2) throw InvalidArgument("evaluation window needs at least three data samples");
  w.dt = data.dt();
  w.length = data.time(w.it) - data.time(w.is);
  w.mu = cfg.mu(data.grid().kappa0());
  w.area = data.grid().area();
  const double k0sq = data.grid().kappa0() * data.grid().kappa0();
  for (auto [k1, k2] : data.observed_modes()) w.inv_stokes.push_back(1.0 / (k0sq * (k1 * k1 + k2 * k2)));
  for (std::size_t i = w.is; i <= w.it; ++i) {
    const auto c = data.sample_coefficients(i);
    w.pu.emplace_back(c.begin(), c.end());
  }
  // Centered differences inside, second-order one-sided at the window ends.
  const std::size_t n = w.count();
  const double h = w.dt;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == 0) {
      w.dpu.push_back(combine(combine(w.pu[0], -3.0, w.pu[1], 4.0), 1.0 / (2 * h), w.pu[2], -1.0 / (2 * h)));
    } else if (j == n - 1) {
      w.dpu.push_back(combine(combine(w.pu[n - 1], 3.0, w.pu[n - 2], -4.0), 1.0 / (2 * h), w.pu[n - 3],
                              1.0 / (2 * h)));
    } else {
      w.dpu.push_back(combine(w.pu[j + 1], 1.0 / (2 * h), w.pu[j - 1], -1.0 / (2 * h)));
    }
  }
  return w;
}

double window_energy(const Window& w) {
  std::vector<double> e(w.count());
  for (std::size_t j = 0; j < w.count(); ++j) e[j] = dot(w.pu[j], w.pu[j], w.area);
  return exp_weighted_average(e, w.dt, w.mu);
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(10);
  s << x;
  return s.str();
}

// int_0^1 e^{-a x} x dx and int_0^1 e^{-a x} (1 - x) dx.
std::pair<double, double> linear_weights(double a) {
  if (std::abs(a) < 1e-3) {
    double alpha = 0.0, beta = 0.0, term = 1.0;
    for (int n = 0; n < 8; ++n) {
      if (n > 0) term *= -a / n;
      alpha += term / (n + 2);
      beta += term / ((n + 1.0) * (n + 2.0));
    }
    return {alpha, beta};
  }
  const double ea = std::exp(-a);
  const double alpha = (1.0 - (1.0 + a) * ea) / (a * a);
  const double beta = -std::expm1(-a) / a - alpha;
  return {alpha, beta};
}

}  // namespace

double exp_weighted_average(std::span<const double> samples, double dt, double mu) {
  if (samples.size() < 2) throw InvalidArgument("weighted average needs at least two samples");
  if (!(dt > 0.0)) throw InvalidArgument("weighted average needs positive sample spacing");
  const std::size_t n = samples.size();
  const auto [alpha, beta] = linear_weights(mu * dt);
  // On [tau_j, tau_j+1] the weight is e^{-mu(t - tau_{j+1})} e^{-mu dt (1 - theta)}.
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double right = std::exp(-mu * dt * static_cast<double>(n - 2 - j));
    sum += right * (alpha * samples[j] + beta * samples[j + 1]);
  }
  return sum * dt / (dt * static_cast<double>(n - 1));
}

double weighted_data_energy(const DataSignal& data, const AssimConfig& cfg) {
  return window_energy(make_window(data, cfg));
}

GammaUpdate gamma_update_detail(double gamma, const DataSignal& data, const AssimConfig& cfg,
                                const PhysicsConfig& phys) {
  const Window w = make_window(data, cfg);
  GammaUpdate r;
  r.gamma = gamma;
  r.denominator = window_energy(w);
  if (!(r.denominator > std::numeric_limits<double>::min())) {
    throw DegenerateData(cfg.s, cfg.t, r.denominator);
  }

  const auto& modes = data.observed_modes();
  std::vector<double> g_dt(w.count()), g_psi(w.count());
  double beta_s = 0.0, beta_t = 0.0;
  run_determining_map(gamma, data, cfg, phys, [&](std::size_t i, const SpectralField& v) {
    if (i < w.is || i > w.it) return;
    const std::size_t j = i - w.is;
    Coeffs psi(modes.size());
    for (std::size_t m = 0; m < modes.size(); ++m) {
      const auto& c = v.at(modes[m].first, modes[m].second);
      psi[m] = {w.pu[j][m].x - c.x, w.pu[j][m].y - c.y};
    }
    g_dt[j] = dot_weighted(psi, w.dpu[j], w.inv_stokes, w.area);
    g_psi[j] = dot(psi, w.pu[j], w.area);
    r.loss = std::max(r.loss, std::sqrt(dot(psi, psi, w.area)));
    if (j == 0) beta_s = dot_weighted(psi, w.pu[j], w.inv_stokes, w.area);
    if (j + 1 == w.count()) beta_t = dot_weighted(psi, w.pu[j], w.inv_stokes, w.area);
  });

  r.c1 = (beta_t - std::exp(-w.mu * w.length) * beta_s) / w.length;
  r.c2 = -exp_weighted_average(g_dt, w.dt, w.mu);
  r.c3 = gamma * exp_weighted_average(g_psi, w.dt, w.mu);
  r.next = gamma - (r.c1 + r.c2 + r.c3) / r.denominator;
  return r;
}

double gamma_update(double gamma, const DataSignal& data, const AssimConfig& cfg,
                    const PhysicsConfig& phys) {
  return gamma_update_detail(gamma, data, cfg, phys).next;
}

double loss(double gamma, const DataSignal& data, const AssimConfig& cfg, const PhysicsConfig& phys) {
  const std::size_t is = data.index_of(cfg.s);
  const std::size_t it = data.index_of(cfg.t);
  const auto& modes = data.observed_modes();
  const double area = data.grid().area();
  double worst = 0.0;
  run_determining_map(gamma, data, cfg, phys, [&](std::size_t i, const SpectralField& v) {
    if (i < is || i > it) return;
    const auto phi = data.sample_coefficients(i);
    double e = 0.0;
    for (std::size_t m = 0; m < modes.size(); ++m) {
      const auto& c = v.at(modes[m].first, modes[m].second);
      e += std::norm(c.x - phi[m].x) + std::norm(c.y - phi[m].y);
    }
    worst = std::max(worst, std::sqrt(area * e));
  });
  return worst;
}

std::string to_string(RecoveryStatus s) {
  switch (s) {
    case RecoveryStatus::running: return "running";
    case RecoveryStatus::converged: return "converged";
    case RecoveryStatus::condition_failed: return "condition_failed";
    case RecoveryStatus::max_iter: return "max_iter";
  }
  return "unknown";
}

RecoveryState recover_viscosity(const DataSignal& data, const AssimConfig& cfg,
                                const PhysicsConfig& phys, const RecoveryOptions& opts) {
  cfg.validate();
  if (!(opts.eps1 > 0.0 && opts.eps1 < cfg.nu0)) throw InvalidArgument("eps1 must lie in (0, nu0)");
  if (!(opts.eps2 > 0.0)) throw InvalidArgument("eps2 must be positive");
  if (opts.max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
  const double lo = cfg.nu0 - opts.eps1;
  const double hi = cfg.nu1 + opts.eps1;
  if (opts.gamma0 < lo || opts.gamma0 > hi) {
    throw InvalidArgument("gamma0 must lie in [nu0 - eps1, nu1 + eps1] = [" + fmt(lo) + ", " + fmt(hi) + "]");
  }

  RecoveryState st;
  st.eps1 = opts.eps1;
  st.eps2 = opts.eps2;
  st.gamma_history.push_back(opts.gamma0);
  const double width = cfg.nu1 - cfg.nu0;
  const double threshold = opts.eps2 / (width + opts.eps1);

  if (!(weighted_data_energy(data, cfg) > 0.0)) {
    st.status = RecoveryStatus::condition_failed;
    st.failure = "denominator-degenerate: <|P_N u|^2> vanishes on window [" + fmt(cfg.s) + ", " +
                 fmt(cfg.t) + "]; the data do not determine the viscosity";
    return st;
  }

  for (int k = 0; k < opts.max_iter; ++k) {
    const double gamma = st.gamma();
    const auto t0 = std::chrono::steady_clock::now();
    const auto upd = gamma_update_detail(gamma, data, cfg, phys);
    st.wall_seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    st.loss_history.push_back(upd.loss);
    st.gamma_history.push_back(upd.next);
    const std::size_t n = st.gamma_history.size();
    if (n >= 3) {
      const double step_prev = st.gamma_history[n - 2] - st.gamma_history[n - 3];
      const double step_now = st.gamma_history[n - 1] - st.gamma_history[n - 2];
      st.contraction_estimates.push_back(step_prev != 0.0 ? std::abs(step_now / step_prev) : 0.0);
    }
    if (upd.next < lo || upd.next > hi || !std::isfinite(upd.next)) {
      st.status = RecoveryStatus::condition_failed;
      st.failure = "iterate " + fmt(upd.next) + " left the bracket [" + fmt(lo) + ", " + fmt(hi) +
                   "]; the convergence conditions are violated for these data";
    } else if (std::abs(upd.next - gamma) / width <= threshold) {
      st.status = RecoveryStatus::converged;
    }
    if (opts.on_iteration) opts.on_iteration(st);
    if (st.status != RecoveryStatus::running) return st;
  }
  st.status = RecoveryStatus::max_iter;
  return st;
}

double direct_viscosity(const Trajectory& truth, const SpectralField& force, double s, double t) {
  if (truth.truncated()) throw InvalidArgument("direct viscosity formula needs the full state");
  if (!(t > s)) throw InvalidArgument("direct viscosity window needs s < t");
  const std::size_t is = truth.index_of(s);
  const std::size_t it = truth.index_of(t);
  double work = 0.0, dissipation = 0.0;
  for (std::size_t i = is; i <= it; ++i) {
    const double w = (i == is || i == it) ? 0.5 : 1.0;
    const double h1 = h1_norm(truth.states[i]);
    work += w * inner(force, truth.states[i]);
    dissipation += w * h1 * h1;
  }
  const double es = l2_norm(truth.states[is]);
  const double et = l2_norm(truth.states[it]);
  return (work * truth.dt_record - 0.5 * (et * et - es * es)) / (dissipation * truth.dt_record);
}

const ConditionResult* BoundsReport::find(const std::string& name) const {
  for (const auto& c : conditions) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

bool BoundsReport::contraction_guaranteed() const {
  const auto* a = find("N-contraction");
  const auto* b = find("mu-contraction");
  return a && b && a->pass && b->pass && !degenerate;
}

BoundsReport bounds_report(const DataSignal& data, const SpectralField& force,
                           const AssimConfig& cfg, const PhysicsConfig& phys,
                           std::optional<double> eps1) {
  cfg.validate();
  const Window w = make_window(data, cfg);
  const double k0 = phys.grid.kappa0();
  const double c0 = ladyzhenskaya_c0();
  const double inf = std::numeric_limits<double>::infinity();
  const double N = cfg.N;

  BoundsReport r;
  r.s = cfg.s;
  r.t = cfg.t;
  r.N = N;
  r.mu0 = cfg.mu0;
  r.mu = w.mu;
  r.nu0 = cfg.nu0;
  r.nu1 = cfg.nu1;
  r.eps1 = eps1;
  r.delta_window = std::exp(-w.mu * w.length);

  const double f_l2 = l2_norm(force);
  const double f_h1 = h1_norm(force);
  r.G = std::max(f_l2 / (cfg.nu0 * cfg.nu0 * k0 * k0), f_h1 / (cfg.nu0 * cfg.nu0 * k0 * k0 * k0));

  const auto& modes = data.observed_modes();
  double sup_inv = 0.0, sup_inv_dt = 0.0, min_k2 = inf;
  r.inf_data_l2_sq = inf;
  for (std::size_t j = 0; j < w.count(); ++j) {
    double l2 = 0.0, h1 = 0.0, a1 = 0.0, a1dt = 0.0;
    for (std::size_t m = 0; m < modes.size(); ++m) {
      const auto& c = w.pu[j][m];
      const auto& d = w.dpu[j][m];
      const double e = std::norm(c.x) + std::norm(c.y);
      const double inv = w.inv_stokes[m];
      l2 += e;
      h1 += e / inv;
      a1 += e * inv * inv;
      a1dt += (std::norm(d.x) + std::norm(d.y)) * inv * inv;
      if (e > 0.0) {
        min_k2 = std::min(min_k2, static_cast<double>(modes[m].first * modes[m].first +
                                                      modes[m].second * modes[m].second));
      }
    }
    r.sup_data_l2 = std::max(r.sup_data_l2, std::sqrt(w.area * l2));
    r.sup_data_h1 = std::max(r.sup_data_h1, std::sqrt(w.area * h1));
    r.inf_data_l2_sq = std::min(r.inf_data_l2_sq, w.area * l2);
    sup_inv = std::max(sup_inv, std::sqrt(w.area * a1));
    sup_inv_dt = std::max(sup_inv_dt, std::sqrt(w.area * a1dt));
  }
  r.weighted_energy = window_energy(w);
  r.delta_proxy = std::sqrt(r.inf_data_l2_sq);
  if (min_k2 < inf) r.n0 = std::sqrt(min_k2);
  r.degenerate = !r.n0 || !(r.weighted_energy > 0.0);

  const auto b = apriori_bounds(f_l2, f_h1, r.sup_data_l2, r.sup_data_h1, cfg.mu0, cfg.nu0, k0);
  r.M_H = b.M_H;
  r.M_V = b.M_V;
  r.M_1 = 2.0 * std::sqrt(5.0) * c0 * c0 / (cfg.nu0 * k0 * k0) * r.M_H * r.M_V * r.M_V;
  r.gamma2 = cfg.nu1;
  r.M_2 = w.mu * (1.0 + r.delta_window) / (1.0 - r.delta_window) * sup_inv + sup_inv_dt +
          r.gamma2 * r.sup_data_l2;

  const int kmax = static_cast<int>(std::floor(N));
  for (int k1 = -kmax; k1 <= kmax; ++k1) {
    for (int k2 = -kmax; k2 <= kmax; ++k2) {
      const double kk = k1 * k1 + k2 * k2;
      if (kk > 0 && kk <= N * N) r.log_sum += 1.0 / kk;
    }
  }
  r.log_const_exact = r.log_sum / std::log(N + 1.0);

  const double n0v = r.n0.value_or(inf);
  const double mv_term = 8.0 / (cfg.nu0 * k0) * r.M_V;
  const std::string subst = "M_H, M_V evaluated with phi = P_N u in place of u (lower bound)";
  auto& cs = r.conditions;
  cs.push_back(make_condition("gain-floor", "mu0 >= 1", cfg.mu0, 1.0, false));
  cs.push_back(make_condition("gain-ratio", "mu0 >= nu1/nu0", cfg.mu0, cfg.nu1 / cfg.nu0, false));
  cs.push_back(make_condition(
      "N-determining", "N >= 8/(nu0 kappa0) sqrt2 (||f||/(nu0 kappa0^2 N^2) + mu0 R)", N,
      8.0 / (cfg.nu0 * k0) * std::sqrt(2.0) * (f_h1 / (cfg.nu0 * k0 * k0 * N * N) + cfg.mu0 * r.sup_data_h1),
      false, "R = sup ||P_N u|| on the window"));
  cs.push_back(make_condition("N-uniqueness-floor", "N > max{8 M_V/(nu0 kappa0), n0}", N,
                              std::max(mv_term, n0v), true, subst));
  const double uniq_rhs = r.degenerate ? inf
                                       : 2.0 * std::sqrt(5.0 * r.log_const_exact) /
                                             (cfg.nu0 * k0 * k0 * std::sqrt(phys.grid.area())) * r.M_H *
                                             r.M_V / r.sup_data_l2;
  cs.push_back(make_condition("N-uniqueness",
                              "N/sqrt(ln(N+1)) > 2 sqrt(5c)/(nu0 kappa0^2 sqrt|Omega|) M_H M_V / sup|P_N u|",
                              N / std::sqrt(std::log(N + 1.0)), uniq_rhs, true,
                              "c = exact lattice sum / ln(N+1); " + subst));
  const double nonzero_rhs =
      std::max({mv_term, n0v, r.inf_data_l2_sq > 0.0 ? 2.0 * r.M_1 / r.inf_data_l2_sq : inf});
  cs.push_back(make_condition("N-nonzero-loss", "N > max{8 M_V/(nu0 kappa0), n, 2 M_1 / inf|P_N u|^2}", N,
                              nonzero_rhs, true, subst));
  if (eps1) {
    const double e1 = *eps1;
    const double contraction_rhs =
        std::max({mv_term, n0v,
                  r.weighted_energy > 0.0 ? (cfg.nu1 - cfg.nu0 + e1) / e1 * r.M_1 / r.weighted_energy : inf});
    cs.push_back(make_condition("N-contraction",
                                "N > max{8 M_V/(nu0 kappa0), n, (nu1 - nu0 + eps1)/eps1 M_1 / <|P_N u|^2>}",
                                N, contraction_rhs, true, subst));
    cs.push_back(make_condition("mu-contraction", "mu0 >= (nu1 + eps1)/(nu0 - eps1)", cfg.mu0,
                                (cfg.nu1 + e1) / (cfg.nu0 - e1), false));
  }
  const double lhs_max = cfg.nu1 / cfg.nu0;
  const double attr_a = r.delta_proxy > 0.0 ? std::max(cfg.nu1 * r.G / r.delta_proxy,
                                                       lhs_max * r.G * std::sqrt(1.0 + lhs_max))
                                            : inf;
  const double attr_b =
      r.delta_proxy > 0.0 ? cfg.nu1 * cfg.nu1 * (1.0 + lhs_max) * r.G / (cfg.nu0 * r.delta_proxy) : inf;
  const std::string attr_note =
      "order-of-magnitude condition, constants taken as 1; delta is the proxy inf|P_N u| on the window";
  cs.push_back(make_condition("N-attractor-a", "N >~ max{nu1 G/delta, (nu1/nu0) G sqrt(1 + nu1/nu0)}", N,
                              attr_a, false, attr_note));
  cs.push_back(make_condition("N-attractor-b", "N/sqrt(ln(N+1)) >~ nu1^2 (1 + nu1/nu0) G/(nu0 delta)",
                              N / std::sqrt(std::log(N + 1.0)), attr_b, false, attr_note));

  const double denom = N * r.weighted_energy - r.M_1;
  if (denom > 0.0) r.eps1_lower_bound = (cfg.nu1 - cfg.nu0) * r.M_1 / denom;
  return r;
}

nlohmann::json to_json(const BoundsReport& r) {
  using nlohmann::json;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json conds = json::array();
  for (const auto& c : r.conditions) {
    conds.push_back({{"name", c.name},
                     {"inequality", c.inequality},
                     {"lhs", std::isfinite(c.lhs) ? json(c.lhs) : json("inf")},
                     {"rhs", std::isfinite(c.rhs) ? json(c.rhs) : json("inf")},
                     {"pass", c.pass},
                     {"margin", std::isfinite(c.margin()) ? json(c.margin()) : json("-inf")},
                     {"note", c.note}});
  }
  return {
      {"schema", "visconv-report/1"},
      {"kind", "bounds"},
      {"window", {r.s, r.t}},
      {"N", r.N},
      {"mu0", r.mu0},
      {"mu", r.mu},
      {"nu0", r.nu0},
      {"nu1", r.nu1},
      {"eps1", opt(r.eps1)},
      {"G", r.G},
      {"M_H", r.M_H},
      {"M_V", r.M_V},
      {"M_1", r.M_1},
      {"M_2", r.M_2},
      {"M_2_gamma", r.gamma2},
      {"M_H_M_V_substitution", "evaluated with phi = P_N u in place of u"},
      {"sup_data_l2", r.sup_data_l2},
      {"sup_data_h1", r.sup_data_h1},
      {"inf_data_l2_sq", r.inf_data_l2_sq},
      {"weighted_data_energy", r.weighted_energy},
      {"delta_window", r.delta_window},
      {"n0", r.n0 ? json(*r.n0) : json("inf")},
      {"log_sum", r.log_sum},
      {"log_const_c", {{"exact", r.log_const_exact}, {"fixed", r.log_const_fixed}}},
      {"delta_proxy", {{"value", r.delta_proxy}, {"label", "proxy"}}},
      {"eps1_lower_bound", opt(r.eps1_lower_bound)},
      {"degenerate", r.degenerate},
      {"conditions", conds},
  };
}

}  // namespace visconv
