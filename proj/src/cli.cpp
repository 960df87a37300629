#include "nlq/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unsupported/Eigen/KroneckerProduct>

#include "nlq/bipartite.hpp"
#include "nlq/linearity.hpp"
#include "nlq/lognlse.hpp"
#include "nlq/qcore.hpp"
#include "nlq/sampling.hpp"
#include "nlq/weinberg.hpp"

namespace nlq::cli {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Config validation

class Checker {
 public:
  explicit Checker(const json& params) : p_(params) {}

  bool has(const std::string& key) const { return p_.contains(key); }

  double number(const std::string& key, bool required, double fallback = 0.0) {
    if (!p_.contains(key)) {
      if (required) errors_.push_back("missing key \"" + key + "\"");
      return fallback;
    }
    if (!p_[key].is_number()) {
      errors_.push_back("key \"" + key + "\" must be a number");
      return fallback;
    }
    return p_[key].get<double>();
  }

  long integer(const std::string& key, bool required, long fallback = 0) {
    if (!p_.contains(key)) {
      if (required) errors_.push_back("missing key \"" + key + "\"");
      return fallback;
    }
    if (!p_[key].is_number_integer()) {
      errors_.push_back("key \"" + key + "\" must be an integer");
      return fallback;
    }
    return p_[key].get<long>();
  }

  std::string text(const std::string& key, bool required,
                   const std::string& fallback = "") {
    if (!p_.contains(key)) {
      if (required) errors_.push_back("missing key \"" + key + "\"");
      return fallback;
    }
    if (!p_[key].is_string()) {
      errors_.push_back("key \"" + key + "\" must be a string");
      return fallback;
    }
    return p_[key].get<std::string>();
  }

  void require(bool cond, const std::string& message) {
    if (!cond) errors_.push_back(message);
  }

  void finish(const std::string& scenario) const {
    if (errors_.empty()) return;
    std::string msg = "invalid " + scenario + " config:";
    for (const auto& e : errors_) msg += "\n  - " + e;
    throw ConfigError(msg);
  }

 private:
  const json& p_;
  std::vector<std::string> errors_;
};

void validate_assert_block(Checker& c, const json& params) {
  if (!params.contains("assert")) return;
  const json& a = params["assert"];
  c.require(a.is_object(), "\"assert\" must be an object");
  if (!a.is_object()) return;
  for (auto it = a.begin(); it != a.end(); ++it) {
    const json& rule = it.value();
    bool ok = rule.is_object() && rule.size() == 1 &&
              (rule.contains("le") || rule.contains("ge")) &&
              rule.begin().value().is_number();
    c.require(ok, "assert rule \"" + it.key() +
                      "\" must be {\"le\": number} or {\"ge\": number}");
  }
}

void validate_spin(const json& params) {
  Checker c(params);
  std::string mode = c.text("mode", false, "evolve");
  c.require(mode == "evolve" || mode == "bounds-doc",
            "\"mode\" must be \"evolve\" or \"bounds-doc\"");
  if (mode == "evolve") {
    c.number("eps", true);
    if (params.contains("s0")) {
      bool ok = params["s0"].is_array() && params["s0"].size() == 3;
      for (const auto& v : params["s0"]) ok = ok && v.is_number();
      c.require(ok, "\"s0\" must be an array of 3 numbers");
      if (ok) {
        double n = 0.0;
        for (const auto& v : params["s0"]) n += v.get<double>() * v.get<double>();
        c.require(n <= 1.0 + 1e-12, "\"s0\" must have Bloch norm <= 1");
      }
    } else {
      c.require(false, "missing key \"s0\"");
    }
    double tf = c.number("t_final", true);
    c.require(tf >= 0.0, "\"t_final\" must be >= 0");
    if (c.has("dt")) c.require(c.number("dt", false) > 0.0, "\"dt\" must be > 0");
    if (c.has("stride"))
      c.require(c.integer("stride", false) >= 1, "\"stride\" must be >= 1");
  }
  validate_assert_block(c, params);
  c.finish("spin");
}

void validate_nlse(const json& params) {
  Checker c(params);
  double b = c.number("b", true);
  c.require(b >= 0.0, "\"b\" must be >= 0");
  double tf = c.number("t_final", true);
  c.require(tf >= 0.0, "\"t_final\" must be >= 0");
  double m = c.number("m", false, 1.0);
  c.require(m > 0.0, "\"m\" must be > 0");
  long n = c.integer("n_points", false, 1024);
  c.require(n >= 16 && (n & (n - 1)) == 0,
            "\"n_points\" must be a power of two >= 16");
  double x0 = c.number("x_min", false, -5.0);
  double x1 = c.number("x_max", false, 5.0);
  c.require(x1 > x0, "\"x_max\" must exceed \"x_min\"");
  c.require(c.number("dt", false, 1e-3) > 0.0, "\"dt\" must be > 0");
  std::string initial = c.text("initial", false, b > 0.0 ? "gausson" : "gaussian");
  c.require(initial == "gausson" || initial == "gaussian",
            "\"initial\" must be \"gausson\" or \"gaussian\"");
  if (initial == "gausson") {
    c.require(b > 0.0, "gausson initial state requires b > 0");
  } else {
    c.require(c.number("sigma0", true) > 0.0, "\"sigma0\" must be > 0");
  }
  if (params.contains("potential")) {
    const json& v = params["potential"];
    bool ok = v.is_object() && v.contains("type") && v["type"].is_string();
    std::string type = ok ? v["type"].get<std::string>() : "";
    c.require(ok && (type == "none" || type == "harmonic"),
              "\"potential.type\" must be \"none\" or \"harmonic\"");
    if (type == "harmonic") {
      c.require(v.contains("omega") && v["omega"].is_number() &&
                    v["omega"].get<double>() > 0.0,
                "\"potential.omega\" must be a number > 0");
    }
  }
  if (c.has("stride"))
    c.require(c.integer("stride", false) >= 1, "\"stride\" must be >= 1");
  if (c.has("log_floor"))
    c.require(c.number("log_floor", false) > 0.0, "\"log_floor\" must be > 0");
  validate_assert_block(c, params);
  c.finish("nlse");
}

void validate_epr(const json& params) {
  Checker c(params);
  c.number("eps", true);
  c.require(c.number("t_final", true) > 0.0, "\"t_final\" must be > 0");
  c.require(c.integer("n_points", false, 100) >= 2, "\"n_points\" must be >= 2");
  if (params.contains("setting")) {
    const json& s = params["setting"];
    bool ok = s.is_string()
                  ? (s.get<std::string>() == "z" || s.get<std::string>() == "45")
                  : s.is_number();
    c.require(ok, "\"setting\" must be \"z\", \"45\" or an angle in degrees");
  } else {
    c.require(false, "missing key \"setting\"");
  }
  validate_assert_block(c, params);
  c.finish("epr");
}

void validate_map_spec(Checker& c, const json& params) {
  if (!params.contains("map")) {
    c.require(false, "missing key \"map\"");
    return;
  }
  const json& m = params["map"];
  if (!m.is_object() || !m.contains("type") || !m["type"].is_string()) {
    c.require(false, "\"map\" must be an object with a string \"type\"");
    return;
  }
  std::string type = m["type"].get<std::string>();
  if (type == "unitary") {
    bool pauli = m.contains("pauli") && m["pauli"].is_array() &&
                 m["pauli"].size() == 3;
    c.require(pauli, "unitary map requires \"pauli\": [c1, c2, c3]");
  } else if (type == "weinberg") {
    c.require(m.contains("eps") && m["eps"].is_number(),
              "weinberg map requires numeric \"eps\"");
  } else if (type == "kraus") {
    bool dep = m.contains("channel") && m["channel"].is_string() &&
               m["channel"].get<std::string>() == "depolarizing" &&
               m.contains("q") && m["q"].is_number();
    double q = dep ? m["q"].get<double>() : -1.0;
    c.require(dep && q >= 0.0 && q <= 1.0,
              "kraus map requires \"channel\": \"depolarizing\" and q in [0,1]");
  } else {
    c.require(false, "unknown map type \"" + type + "\"");
  }
}

void validate_linearity(const json& params) {
  Checker c(params);
  validate_map_spec(c, params);
  c.require(c.integer("samples", false, 100) >= 1, "\"samples\" must be >= 1");
  c.number("t", false, 1.0);
  validate_assert_block(c, params);
  c.finish("linearity");
}

void validate_bipartite(const json& params) {
  Checker c(params);
  std::string mode = c.text("mode", true);
  c.require(mode == "signaling" || mode == "consistency",
            "\"mode\" must be \"signaling\" or \"consistency\"");
  if (mode == "signaling") {
    c.number("eps", true);
    c.require(c.number("t_final", true) > 0.0, "\"t_final\" must be > 0");
    c.require(c.integer("n_points", false, 100) >= 2,
              "\"n_points\" must be >= 2");
  } else if (mode == "consistency") {
    c.number("eps", false, 1.0);
    c.require(c.integer("samples", false, 100) >= 1, "\"samples\" must be >= 1");
    c.require(c.number("dt_fd", false, 1e-4) > 0.0, "\"dt_fd\" must be > 0");
  }
  validate_assert_block(c, params);
  c.finish("bipartite");
}

DynamicalMap build_map(const json& spec) {
  std::string type = spec["type"].get<std::string>();
  if (type == "unitary") {
    Matrix h = spec["pauli"][0].get<double>() * sigma1() +
               spec["pauli"][1].get<double>() * sigma2() +
               spec["pauli"][2].get<double>() * sigma3();
    return UnitaryGenerator(std::move(h));
  }
  if (type == "weinberg") {
    return WeinbergFlow{{spec["eps"].get<double>()}};
  }
  return depolarizing_channel(spec["q"].get<double>());
}

// ---------------------------------------------------------------------------
// Scenario runners

struct ScenarioOutput {
  std::string csv;  // empty when the scenario has no series
  json summary;
};

ScenarioOutput run_spin(const json& p) {
  ScenarioOutput out;
  if (p.value("mode", std::string("evolve")) == "bounds-doc") {
    // Published experimental limits; documentation only, no computation.
    out.summary["b_two_slit_limit_ev"] = 3.4e-13;
    out.summary["b_two_slit_source"] = "neutron two-slit interferometry";
    out.summary["b_fresnel_limit_ev"] = 3.3e-15;
    out.summary["b_fresnel_source"] = "neutron Fresnel diffraction";
    out.summary["epsilon_limit_ev"] = 1.6e-20;
    out.summary["epsilon_source"] = "hydrogen-maser / ion spectroscopy";
    out.summary["note"] =
        "laboratory bounds on the nonlinear couplings; natural units are "
        "used everywhere else in this tool";
    return out;
  }

  double eps = p["eps"].get<double>();
  BlochVector s0{p["s0"][0].get<double>(), p["s0"][1].get<double>(),
                 p["s0"][2].get<double>()};
  double t_final = p["t_final"].get<double>();
  double dt = p.value("dt", default_spin_dt(eps));
  long stride = p.value("stride", 10L);

  WeinbergParams params{eps};
  SpinTrajectory traj = evolve_numeric(params, s0, t_final, dt);

  std::ostringstream csv;
  csv << "t,s1,s2,s3\n";
  double max_err = 0.0;
  double max_norm_drift = 0.0;
  double max_s3_drift = 0.0;
  double n0 = s0.norm();
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const BlochVector& s = traj.states[i];
    BlochVector ref = closed_form(params, s0, traj.times[i]);
    max_err = std::max({max_err, std::abs(s.s1 - ref.s1),
                        std::abs(s.s2 - ref.s2), std::abs(s.s3 - ref.s3)});
    max_norm_drift = std::max(max_norm_drift, std::abs(s.norm() - n0));
    max_s3_drift = std::max(max_s3_drift, std::abs(s.s3 - s0.s3));
    if (i % stride == 0 || i + 1 == traj.times.size()) {
      csv << fmt(traj.times[i]) << ',' << fmt(s.s1) << ',' << fmt(s.s2) << ','
          << fmt(s.s3) << '\n';
    }
  }
  out.csv = csv.str();
  const BlochVector& sf = traj.states.back();
  out.summary["eps"] = eps;
  out.summary["t_final"] = t_final;
  out.summary["dt"] = dt;
  out.summary["final_state"] = {sf.s1, sf.s2, sf.s3};
  out.summary["max_closed_form_error"] = max_err;
  out.summary["max_bloch_norm_drift"] = max_norm_drift;
  out.summary["max_s3_drift"] = max_s3_drift;
  return out;
}

ScenarioOutput run_nlse(const json& p) {
  double b = p["b"].get<double>();
  double m = p.value("m", 1.0);
  double t_final = p["t_final"].get<double>();
  Grid1D grid(static_cast<int>(p.value("n_points", 1024L)),
              p.value("x_min", -5.0), p.value("x_max", 5.0));

  LogNlseParams params;
  params.mass = m;
  params.b = b;
  params.dt = p.value("dt", 1e-3);
  params.log_floor = p.value("log_floor", 1e-30);
  bool harmonic = false;
  double omega = 0.0;
  if (p.contains("potential") && p["potential"]["type"] == "harmonic") {
    harmonic = true;
    omega = p["potential"]["omega"].get<double>();
    Eigen::VectorXd x = grid.points();
    params.potential = 0.5 * m * omega * omega * x.cwiseAbs2();
  }

  double center = p.value("center", 0.0);
  std::string initial = p.value("initial", b > 0.0 ? std::string("gausson")
                                                   : std::string("gaussian"));
  double sigma0 = 0.0;
  WaveField psi0 = [&] {
    if (initial == "gausson") {
      sigma0 = 0.5 / std::sqrt(m * b);
      return make_gausson(params, grid, center);
    }
    sigma0 = p["sigma0"].get<double>();
    return make_gaussian(grid, center, sigma0);
  }();

  EvolveResult res =
      evolve(params, psi0, t_final, static_cast<int>(p.value("stride", 10L)));
  const EvolveDiagnostics& d = res.diagnostics;

  std::ostringstream csv;
  csv << "t,norm,width,energy\n";
  for (std::size_t i = 0; i < d.times.size(); ++i) {
    csv << fmt(d.times[i]) << ',' << fmt(d.norms[i]) << ',' << fmt(d.widths[i])
        << ',' << fmt(d.energies[i]) << '\n';
  }

  double w0 = d.widths.front();
  double max_norm_drift = 0.0;
  double max_width_rel_dev = 0.0;
  for (std::size_t i = 0; i < d.times.size(); ++i) {
    max_norm_drift = std::max(max_norm_drift, std::abs(d.norms[i] - 1.0));
    max_width_rel_dev =
        std::max(max_width_rel_dev, std::abs(d.widths[i] - w0) / w0);
  }

  ScenarioOutput out;
  out.csv = csv.str();
  out.summary["b"] = b;
  out.summary["m"] = m;
  out.summary["t_final"] = t_final;
  out.summary["dt"] = params.dt;
  out.summary["initial"] = initial;
  out.summary["width_initial"] = w0;
  out.summary["width_final"] = d.widths.back();
  out.summary["width_ratio"] = d.widths.back() / w0;
  out.summary["max_norm_drift"] = max_norm_drift;
  out.summary["max_width_rel_dev"] = max_width_rel_dev;
  out.summary["energy_drift"] =
      std::abs(d.energies.back() - d.energies.front());

  if (b == 0.0 && !harmonic && initial == "gaussian") {
    // Free spreading: σ(t) = σ0 √(1 + (t/(2mσ0²))²). The analytic match is
    // only meaningful while the packet is well inside the periodic box, so
    // it is scored up to the doubling time.
    double t_double = 2.0 * std::sqrt(3.0) * m * sigma0 * sigma0;
    double max_rel = 0.0;
    for (std::size_t i = 0; i < d.times.size(); ++i) {
      if (d.times[i] > t_double + 1e-12) continue;
      double tau = d.times[i] / (2.0 * m * sigma0 * sigma0);
      double wa = sigma0 * std::sqrt(1.0 + tau * tau);
      max_rel = std::max(max_rel, std::abs(d.widths[i] - wa) / wa);
    }
    out.summary["free_spread_max_rel_err"] = max_rel;
    out.summary["free_spread_doubling_time"] = t_double;
  }
  return out;
}

ScenarioOutput run_epr(const json& p) {
  double eps = p["eps"].get<double>();
  double t_final = p["t_final"].get<double>();
  long n = p.value("n_points", 100L);

  EprSetting setting = [&] {
    if (p["setting"].is_string()) {
      return p["setting"].get<std::string>() == "z" ? setting_z() : setting_45();
    }
    double deg = p["setting"].get<double>();
    double rad = deg * std::numbers::pi / 180.0;
    return EprSetting(Eigen::Vector3d(std::sin(rad), 0.0, std::cos(rad)));
  }();

  std::ostringstream csv;
  csv << "t,ensemble_mean_sigma2,branch_plus,branch_minus\n";
  double max_sweep_error = 0.0;
  double max_abs_mean = 0.0;
  double final_mean = 0.0;
  bool is_45 = p["setting"].is_string() && p["setting"] == "45";
  bool is_z = p["setting"].is_string() && p["setting"] == "z";
  for (long i = 0; i < n; ++i) {
    double t = t_final * static_cast<double>(i) / (n - 1);
    EprOutcome o = epr_scenario(setting, eps, t);
    csv << fmt(t) << ',' << fmt(o.ensemble_mean_sigma2) << ','
        << fmt(o.branch_means[0]) << ',' << fmt(o.branch_means[1]) << '\n';
    max_abs_mean = std::max(max_abs_mean, std::abs(o.ensemble_mean_sigma2));
    if (is_45) {
      double expected =
          std::sin(std::sqrt(2.0) * eps * t) / std::sqrt(2.0);
      max_sweep_error = std::max(max_sweep_error,
                                std::abs(o.ensemble_mean_sigma2 - expected));
    }
    final_mean = o.ensemble_mean_sigma2;
  }

  ScenarioOutput out;
  out.csv = csv.str();
  out.summary["eps"] = eps;
  out.summary["t_final"] = t_final;
  out.summary["final_mean"] = final_mean;
  out.summary["max_abs_mean"] = max_abs_mean;
  if (is_45) out.summary["max_sweep_error"] = max_sweep_error;
  if (is_z) out.summary["max_z_mean"] = max_abs_mean;
  return out;
}

ScenarioOutput run_linearity(const json& p, std::uint64_t seed) {
  DynamicalMap map = build_map(p["map"]);
  int samples = static_cast<int>(p.value("samples", 100L));
  double t = p.value("t", 1.0);

  LinearityReport rep = classify(map, samples, seed, t);

  ScenarioOutput out;
  json& s = out.summary;
  s["samples"] = samples;
  s["seed"] = seed;
  s["t"] = t;
  s["mixture_residual"] = rep.mixture_residual;
  s["purity_before"] = rep.purity_before;
  s["purity_after"] = rep.purity_after;
  s["purity_gap"] = std::abs(rep.purity_before - rep.purity_after);
  s["overlap_residual"] = rep.overlap_residual;
  s["overlap_applicable"] = rep.overlap_applicable;
  s["entropy_change"] = rep.entropy_change;
  s["entropy_decrease"] = std::max(0.0, -rep.entropy_change);
  s["mean_value_residual"] = rep.mean_value_residual;
  s["verdict_mixture_linear"] = rep.mixture_linear;
  s["verdict_purity_preserving"] = rep.purity_preserving;
  s["verdict_overlap_preserving"] = rep.overlap_preserving;
  s["verdict_entropy_monotone"] = rep.entropy_monotone;
  s["verdict_mean_value_linear"] = rep.mean_value_linear;
  s["one_to_one_evidence"] = rep.one_to_one_evidence;

  if (std::holds_alternative<WeinbergFlow>(map)) {
    // Documented witness: ρ1 along x, ρ2 along z, p = 1/2.
    double witness = mixture_linearity_residual(
        map, bloch_to_density({1, 0, 0}), bloch_to_density({0, 0, 1}),
        MixtureWeight(0.5), t);
    s["witness_mixture_residual"] = witness;
  }
  return out;
}

ScenarioOutput run_bipartite(const json& p, std::uint64_t seed) {
  ScenarioOutput out;
  std::string mode = p["mode"].get<std::string>();
  if (mode == "signaling") {
    double eps = p["eps"].get<double>();
    double t_final = p["t_final"].get<double>();
    long n = p.value("n_points", 100L);
    std::ostringstream csv;
    csv << "t,statistic\n";
    double sweep_max = 0.0;
    for (long i = 0; i < n; ++i) {
      double t = t_final * static_cast<double>(i) / (n - 1);
      double stat = signaling_statistic(eps, t);
      sweep_max = std::max(sweep_max, stat);
      csv << fmt(t) << ',' << fmt(stat) << '\n';
    }
    out.csv = csv.str();
    double t_peak = std::numbers::pi / (2.0 * std::sqrt(2.0) * std::abs(eps));
    double peak = signaling_statistic(eps, t_peak);
    out.summary["eps"] = eps;
    out.summary["t_final"] = t_final;
    out.summary["sweep_max"] = sweep_max;
    out.summary["peak_time"] = t_peak;
    out.summary["peak_statistic"] = peak;
    out.summary["peak_statistic_error"] =
        std::abs(peak - 1.0 / std::sqrt(2.0));
    // The same statistic under a reference linear dynamics.
    out.summary["linear_map_statistic"] =
        signaling_statistic(DynamicalMap(UnitaryGenerator(sigma3())), t_peak);
    return out;
  }

  // Consistency mode: joint-probability decomposition and reduced-dynamics independence
  // of the reduced dynamics from the larger-system construction.
  double eps = p.value("eps", 1.0);
  int samples = static_cast<int>(p.value("samples", 100L));
  double dt_fd = p.value("dt_fd", 1e-4);
  StateSampler sampler(seed);
  EnvironmentFlags flags{0, 1};

  std::ostringstream csv;
  csv << "sample,joint_residual,linear_derivative_residual\n";
  double max_joint = 0.0;
  double max_linear = 0.0;
  double max_ptrace = 0.0;
  for (int i = 0; i < samples; ++i) {
    DensityMatrix rho1 = sampler.random_density(2);
    DensityMatrix rho2 = sampler.random_density(2);
    MixtureWeight w(sampler.random_weight());
    Projector proj = sampler.random_projector(2);

    BipartiteState joint = make_correlated(rho1, rho2, w, flags);
    Matrix big = Eigen::kroneckerProduct(proj.elements(),
                                         Matrix::Identity(2, 2));
    double lhs = (big * joint.matrix).trace().real();
    double rhs = w.value() * expectation(proj.elements(), rho1) +
                 (1.0 - w.value()) * expectation(proj.elements(), rho2);
    double residual = std::abs(lhs - rhs);
    max_joint = std::max(max_joint, residual);
    max_ptrace = std::max(
        max_ptrace,
        trace_distance(partial_trace_env(joint), mixture(rho1, rho2, w)));

    DynamicalMap linear_map = DynamicalMap(
        UnitaryGenerator(sampler.random_hermitian(2)));
    double lin = derivative_consistency_residual(linear_map, rho1, rho2, w,
                                                 proj, 0.0, dt_fd);
    max_linear = std::max(max_linear, lin);
    csv << i << ',' << fmt(residual) << ',' << fmt(lin) << '\n';
  }

  // Documented nonlinearity witness at t = 0 with P = (I + Σ2)/2.
  DynamicalMap weinberg = DynamicalMap(WeinbergFlow{{eps}});
  Projector witness_proj(0.5 * (Matrix::Identity(2, 2) + sigma2()));
  double witness = derivative_consistency_residual(
      weinberg, bloch_to_density({1, 0, 0}), bloch_to_density({0, 0, 1}),
      MixtureWeight(0.5), witness_proj, 0.0, dt_fd);

  out.csv = csv.str();
  out.summary["eps"] = eps;
  out.summary["samples"] = samples;
  out.summary["seed"] = seed;
  out.summary["dt_fd"] = dt_fd;
  out.summary["max_joint_residual"] = max_joint;
  out.summary["max_partial_trace_residual"] = max_ptrace;
  out.summary["max_linear_derivative_residual"] = max_linear;
  out.summary["weinberg_witness_residual"] = witness;
  return out;
}

// ---------------------------------------------------------------------------
// Assertions

json evaluate_assertions(const json& rules, const json& summary, bool* passed) {
  json results = json::object();
  for (auto it = rules.begin(); it != rules.end(); ++it) {
    const std::string& key = it.key();
    json entry;
    if (!summary.contains(key) || !summary[key].is_number()) {
      entry["pass"] = false;
      entry["error"] = "metric not found in summary";
      *passed = false;
    } else {
      double value = summary[key].get<double>();
      const json& rule = it.value();
      bool ok = rule.contains("le") ? value <= rule["le"].get<double>()
                                    : value >= rule["ge"].get<double>();
      entry["pass"] = ok;
      entry["value"] = value;
      entry["bound"] = rule;
      if (!ok) *passed = false;
    }
    results[key] = entry;
  }
  return results;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> list = {
      {"spin-oracle", "spin",
       "RK4 spin integration checked against the closed-form precession",
       json::parse(R"({"eps":1.0,"s0":[0.70710678118654752,0.0,0.70710678118654752],
                       "t_final":10.0,"dt":0.001,"stride":100,
                       "assert":{"max_closed_form_error":{"le":1e-8},
                                 "max_s3_drift":{"le":1e-10}}})")},
      {"bounds-doc", "spin",
       "print the published experimental limits on b and epsilon (no computation)",
       json::parse(R"({"mode":"bounds-doc"})")},
      {"conditional-sweep", "epr",
       "Bob's ensemble mean of Sigma2 for the 45-degree setting vs (1/sqrt2)sin(sqrt2*eps*t)",
       json::parse(R"({"eps":1.0,"t_final":5.0,"n_points":100,"setting":"45",
                       "assert":{"max_sweep_error":{"le":1e-10}}})")},
      {"epr-z", "epr",
       "Bob's ensemble mean of Sigma2 for the z setting (vanishes identically)",
       json::parse(R"({"eps":1.0,"t_final":5.0,"n_points":100,"setting":"z",
                       "assert":{"max_z_mean":{"le":1e-12}}})")},
      {"gausson-hold", "nlse",
       "gausson soliton stationarity over t in [0, 10/b]",
       json::parse(R"({"b":1.0,"m":1.0,"t_final":10.0,"dt":0.001,
                       "n_points":1024,"x_min":-5.0,"x_max":5.0,
                       "initial":"gausson","stride":100,
                       "assert":{"max_width_rel_dev":{"le":0.01},
                                 "max_norm_drift":{"le":1e-8}}})")},
      {"free-spread", "nlse",
       "identical Gaussian with b = 0 spreads along the analytic curve",
       json::parse(R"({"b":0.0,"m":1.0,"t_final":2.0,"dt":0.001,
                       "n_points":1024,"x_min":-5.0,"x_max":5.0,
                       "initial":"gaussian","sigma0":0.5,"stride":20,
                       "assert":{"width_ratio":{"ge":2.0},
                                 "free_spread_max_rel_err":{"le":0.01},
                                 "max_norm_drift":{"le":1e-8}}})")},
      {"weinberg-witness", "linearity",
       "Weinberg flow violates mixture linearity while conserving purity",
       json::parse(R"({"map":{"type":"weinberg","eps":1.0},"samples":100,
                       "t":1.0,"seed":42,
                       "assert":{"mixture_residual":{"ge":0.01},
                                 "witness_mixture_residual":{"ge":0.01},
                                 "purity_gap":{"le":1e-10}}})")},
      {"unitary-check", "linearity",
       "a generic unitary map passes every linearity property",
       json::parse(R"({"map":{"type":"unitary","pauli":[0.4,0.3,1.0]},
                       "samples":100,"t":1.0,"seed":7,
                       "assert":{"mixture_residual":{"le":1e-12},
                                 "purity_gap":{"le":1e-12},
                                 "overlap_residual":{"le":1e-10},
                                 "entropy_decrease":{"le":1e-10},
                                 "mean_value_residual":{"le":1e-8}}})")},
      {"depolarizing-check", "linearity",
       "the depolarizing channel is linear but not purity-preserving",
       json::parse(R"({"map":{"type":"kraus","channel":"depolarizing","q":0.1},
                       "samples":100,"t":1.0,"seed":7,
                       "assert":{"mixture_residual":{"le":1e-12},
                                 "purity_gap":{"ge":1e-3}}})")},
      {"signaling-peak", "bipartite",
       "EPR signaling statistic peaks at 1/sqrt2; zero for linear dynamics",
       json::parse(R"({"mode":"signaling","eps":1.0,
                       "t_final":2.2214414690791831,"n_points":100,
                       "assert":{"peak_statistic_error":{"le":1e-10},
                                 "linear_map_statistic":{"le":1e-12}}})")},
      {"bipartite-consistency", "bipartite",
       "joint-probability decomposition and reduced-dynamics independence",
       json::parse(R"({"mode":"consistency","samples":100,"seed":11,"eps":1.0,
                       "dt_fd":1e-4,
                       "assert":{"max_joint_residual":{"le":1e-12},
                                 "max_partial_trace_residual":{"le":1e-12},
                                 "max_linear_derivative_residual":{"le":1e-8},
                                 "weinberg_witness_residual":{"ge":0.05}}})")},
  };
  return list;
}

const Preset& find_preset(const std::string& name) {
  for (const Preset& p : presets()) {
    if (p.name == name) return p;
  }
  throw ConfigError("unknown preset \"" + name + "\"");
}

ScenarioConfig parse_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  if (!doc.contains("scenario") || !doc["scenario"].is_string()) {
    throw ConfigError("config must name a \"scenario\"");
  }
  std::string scenario = doc["scenario"].get<std::string>();
  json params = doc;
  params.erase("scenario");

  if (params.contains("seed") &&
      !(params["seed"].is_number_unsigned() || params["seed"].is_number_integer())) {
    throw ConfigError("\"seed\" must be an integer");
  }

  if (scenario == "spin") {
    validate_spin(params);
  } else if (scenario == "nlse") {
    validate_nlse(params);
  } else if (scenario == "epr") {
    validate_epr(params);
  } else if (scenario == "linearity") {
    validate_linearity(params);
  } else if (scenario == "bipartite") {
    validate_bipartite(params);
  } else {
    throw ConfigError("unknown scenario \"" + scenario + "\"");
  }
  return ScenarioConfig{scenario, params};
}

RunSummary run(const ScenarioConfig& config, const RunOptions& opts) {
  auto start = std::chrono::steady_clock::now();
  std::uint64_t seed = opts.seed.value_or(
      config.params.value("seed", std::uint64_t{0}));

  ScenarioOutput so;
  if (config.scenario == "spin") {
    so = run_spin(config.params);
  } else if (config.scenario == "nlse") {
    so = run_nlse(config.params);
  } else if (config.scenario == "epr") {
    so = run_epr(config.params);
  } else if (config.scenario == "linearity") {
    so = run_linearity(config.params, seed);
  } else {
    so = run_bipartite(config.params, seed);
  }

  RunSummary result;
  result.scenario = config.scenario;
  json summary;
  summary["scenario"] = config.scenario;
  summary["metrics"] = so.summary;
  {
    json echo = config.params;
    echo.erase("assert");
    summary["input"] = echo;
  }

  if (opts.assert_mode && config.params.contains("assert")) {
    bool passed = true;
    // Assertions read the flat metric map.
    summary["assertions"] =
        evaluate_assertions(config.params["assert"], so.summary, &passed);
    result.assertions_passed = passed;
    result.exit_code = passed ? 0 : 2;
  }

  std::filesystem::create_directories(opts.out_dir);
  if (!so.csv.empty()) {
    std::string csv_path =
        opts.out_dir + "/" + config.scenario + "_series.csv";
    std::ofstream(csv_path, std::ios::binary) << so.csv;
    result.artifact_paths.push_back(csv_path);
  }
  std::string json_path =
      opts.out_dir + "/" + config.scenario + "_summary.json";
  std::ofstream(json_path, std::ios::binary) << summary.dump(2) << '\n';
  result.artifact_paths.push_back(json_path);

  result.summary = std::move(summary);
  result.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

}  // namespace nlq::cli
