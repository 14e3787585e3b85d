#include "genshare/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

namespace genshare {

using nlohmann::json;

namespace {

// ---- JSON access with dotted error paths ----------------------------------

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

const json& field(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing");
  return *it;
}

bool has(const json& obj, const char* key) { return obj.is_object() && obj.contains(key); }

double get_real(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

std::size_t get_count(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0) fail(path, "expected a nonnegative integer");
  return v.get<std::size_t>();
}

std::uint64_t get_seed(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer seed");
  return v.is_number_unsigned() ? v.get<std::uint64_t>()
                                : static_cast<std::uint64_t>(v.get<std::int64_t>());
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

Vector get_reals(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  Vector out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(get_real(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<std::size_t> get_counts(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of integers");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(get_count(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

double get_unit(const json& v, const std::string& path) {
  const double x = get_real(v, path);
  if (!(x >= 0.0 && x <= 1.0)) fail(path, "must lie in [0,1]");
  return x;
}

// ---- sections ---------------------------------------------------------------

EnvironmentSpec parse_environment(const json& j) {
  const std::string p = "environment";
  EnvironmentSpec env;
  const std::string kind = get_string(field(j, p, "kind"), p + ".kind");
  env.d = get_count(field(j, p, "d"), p + ".d");
  if (env.d == 0) fail(p + ".d", "must be >= 1");
  if (has(j, "seed")) env.seed = get_seed(j["seed"], p + ".seed");

  if (kind == "from_file") {
    env.kind = EnvironmentKind::kFromFile;
    env.path = get_string(field(j, p, "path"), p + ".path");
    return env;
  }
  env.horizon = get_count(field(j, p, "T"), p + ".T");
  if (env.horizon == 0) fail(p + ".T", "must be >= 1");

  if (kind == "iid_bernoulli") {
    env.kind = EnvironmentKind::kIidBernoulli;
    env.means = get_reals(field(j, p, "means"), p + ".means");
  } else if (kind == "piecewise_stationary") {
    env.kind = EnvironmentKind::kPiecewiseStationary;
    if (has(j, "segments")) {
      const json& segs = j["segments"];
      if (!segs.is_array()) fail(p + ".segments", "expected an array");
      for (std::size_t k = 0; k < segs.size(); ++k) {
        const std::string sp = p + ".segments[" + std::to_string(k) + "]";
        Segment seg;
        seg.length = get_count(field(segs[k], sp, "length"), sp + ".length");
        seg.means = get_reals(field(segs[k], sp, "means"), sp + ".means");
        env.segments.push_back(std::move(seg));
      }
    } else if (has(j, "best_arms")) {
      const std::string bp = p + ".best_arms";
      const json& b = j["best_arms"];
      const auto lengths = get_counts(field(b, bp, "lengths"), bp + ".lengths");
      const auto arms = get_counts(field(b, bp, "arms"), bp + ".arms");
      const double low = get_unit(field(b, bp, "low"), bp + ".low");
      const double high = get_unit(field(b, bp, "high"), bp + ".high");
      if (lengths.size() != arms.size()) fail(bp, "lengths and arms differ in size");
      for (std::size_t k = 0; k < arms.size(); ++k) {
        if (arms[k] >= env.d) fail(bp + ".arms[" + std::to_string(k) + "]", "arm out of range");
      }
      env.segments = best_arm_segments(env.d, lengths, arms, low, high);
    } else {
      fail(p + ".segments", "missing (or give best_arms)");
    }
  } else if (kind == "adversarial_flip") {
    env.kind = EnvironmentKind::kAdversarialFlip;
  } else {
    fail(p + ".kind", "unknown environment kind '" + kind + "'");
  }
  try {
    validate(env);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return env;
}

DiscountSchedule parse_schedule(const json& j, const std::string& path, std::size_t horizon) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "ramp_up") return linear_ramp(horizon, true);
    if (name == "ramp_down") return linear_ramp(horizon, false);
    fail(path, "unknown schedule '" + name + "' (ramp_up, ramp_down or an array)");
  }
  DiscountSchedule s;
  s.betas = get_reals(j, path);
  if (s.betas.size() != horizon) {
    fail(path, "has " + std::to_string(s.betas.size()) + " entries, T = " + std::to_string(horizon));
  }
  try {
    validate_schedule(s);
  } catch (const std::domain_error& e) {
    fail(path, e.what());
  }
  return s;
}

ComparatorSpec parse_comparator(const json& j, const EnvironmentSpec& env, std::size_t horizon) {
  const std::string p = "comparator";
  const std::string kind = get_string(field(j, p, "kind"), p + ".kind");
  if (kind == "piecewise_best") {
    try {
      return piecewise_best_comparator(env);
    } catch (const std::invalid_argument& e) {
      fail(p + ".kind", e.what());
    }
  }
  ComparatorSpec c;
  c.d = env.d;
  c.horizon = horizon;
  if (kind == "piecewise_corner") {
    c.kind = ComparatorKind::kPiecewiseCorner;
    c.segment_lengths = get_counts(field(j, p, "segment_lengths"), p + ".segment_lengths");
    c.corners = get_counts(field(j, p, "corners"), p + ".corners");
  } else if (kind == "adaptive_window") {
    c.kind = ComparatorKind::kAdaptiveWindow;
    c.first = get_count(field(j, p, "r"), p + ".r");
    c.last = get_count(field(j, p, "s"), p + ".s");
    c.corner = get_count(field(j, p, "corner"), p + ".corner");
  } else if (kind == "discounted") {
    c.kind = ComparatorKind::kDiscounted;
    c.schedule = parse_schedule(field(j, p, "schedule"), p + ".schedule", horizon);
    c.corner = get_count(field(j, p, "corner"), p + ".corner");
  } else if (kind == "scaled_arbitrary") {
    c.kind = ComparatorKind::kScaledArbitrary;
    if (has(j, "seed")) c.seed = get_seed(j["seed"], p + ".seed");
  } else {
    fail(p + ".kind", "unknown comparator kind '" + kind + "'");
  }
  try {
    validate(c);
  } catch (const std::exception& e) {
    fail(p, e.what());
  }
  return c;
}

Schedule array_schedule(Vector values) {
  return [values = std::move(values)](std::size_t t) {
    return values.at(std::min(t, values.size()) - 1);
  };
}

ForecasterSpec parse_forecaster(const json& j, std::size_t d, std::size_t horizon) {
  const std::string p = "forecaster";
  ForecasterSpec f;
  const std::string rule = get_string(field(j, p, "rule"), p + ".rule");

  if (rule == "time_varying") {
    const json& s = field(j, p, "schedule");
    if (s.is_string()) {
      if (s.get<std::string>() != "corollary7") fail(p + ".schedule", "unknown schedule");
      if (d < 2) fail(p + ".schedule", "corollary7 needs d >= 2");
      f.rule = corollary7_rule(d);
    } else {
      auto eta = get_reals(field(s, p + ".schedule", "eta"), p + ".schedule.eta");
      auto alpha = get_reals(field(s, p + ".schedule", "alpha"), p + ".schedule.alpha");
      if (eta.size() < horizon || alpha.size() < horizon) {
        fail(p + ".schedule", "eta and alpha need at least T entries");
      }
      for (std::size_t t = 0; t < horizon; ++t) {
        const std::string at = "[" + std::to_string(t) + "]";
        if (!(eta[t] > 0.0)) fail(p + ".schedule.eta" + at, "must be positive");
        if (!(alpha[t] >= 0.0 && alpha[t] <= 1.0)) fail(p + ".schedule.alpha" + at, "outside [0,1]");
        if (t > 0 && eta[t] > eta[t - 1]) fail(p + ".schedule.eta" + at, "schedule increases");
        if (t > 0 && alpha[t] > alpha[t - 1]) fail(p + ".schedule.alpha" + at, "schedule increases");
      }
      f.rule = TimeVarying{array_schedule(std::move(eta)), array_schedule(std::move(alpha))};
    }
    f.eta = std::get<TimeVarying>(f.rule).eta(1);
    return f;
  }

  double alpha = 0.0;
  if (has(j, "tune")) {
    const json& t = j["tune"];
    const std::string tp = p + ".tune";
    const double m0 = get_real(field(t, tp, "m0"), tp + ".m0");
    const double u0 = get_real(field(t, tp, "U0"), tp + ".U0");
    if (!(m0 > 0.0)) fail(tp + ".m0", "must be positive");
    if (!(u0 >= m0)) fail(tp + ".U0", "must be >= m0");
    if (d < 2) fail(tp, "tuning needs d >= 2");
    if (has(t, "L0")) {
      const double l0 = get_real(t["L0"], tp + ".L0");
      if (!(l0 > 0.0)) fail(tp + ".L0", "must be positive");
      f.tuning = tune_small_loss(d, m0, u0, l0);
    } else {
      f.tuning = tune_fixed_share(d, m0, u0);
    }
    f.eta = f.tuning->eta;
    alpha = f.tuning->alpha;
  } else {
    f.eta = get_real(field(j, p, "eta"), p + ".eta");
    if (!(f.eta > 0.0)) fail(p + ".eta", "must be positive");
    alpha = get_unit(field(j, p, "alpha"), p + ".alpha");
  }

  if (rule == "fixed_share") {
    f.rule = FixedShare{alpha};
  } else if (rule == "projected") {
    if (!(alpha > 0.0)) fail(p + ".alpha", "projection needs alpha > 0 for a finite bound");
    f.rule = Projected{alpha};
  } else if (rule == "bw_max") {
    f.rule = BWMax{alpha};
  } else if (rule == "bw_decayed") {
    const json& g = field(j, p, "gamma");
    double gamma;
    if (g.is_object()) {
      const double m0 = get_real(field(g, p + ".gamma", "m0"), p + ".gamma.m0");
      const double n0 = get_real(field(g, p + ".gamma", "n0"), p + ".gamma.n0");
      if (!(m0 > 0.0 && n0 > 0.0)) fail(p + ".gamma", "m0 and n0 must be positive");
      gamma = bw_decay_rate(m0, n0, horizon);
    } else {
      gamma = get_real(g, p + ".gamma");
    }
    if (!(gamma > 0.0)) fail(p + ".gamma", "must be positive");
    f.rule = BWDecayed{alpha, gamma};
  } else {
    fail(p + ".rule", "unknown rule '" + rule + "'");
  }
  return f;
}

RegretSpec parse_regret(const json& j, std::size_t horizon) {
  const std::string p = "regret";
  RegretSpec r;
  const std::string kind = get_string(field(j, p, "kind"), p + ".kind");
  if (kind == "shifting") {
    r.kind = RegretKind::kShifting;
  } else if (kind == "adaptive") {
    r.kind = RegretKind::kAdaptive;
    r.tau0 = get_count(field(j, p, "tau0"), p + ".tau0");
    if (r.tau0 < 1 || r.tau0 > horizon) fail(p + ".tau0", "must lie in [1, T]");
  } else if (kind == "discounted") {
    r.kind = RegretKind::kDiscounted;
    r.schedule = parse_schedule(field(j, p, "schedule"), p + ".schedule", horizon);
  } else {
    fail(p + ".kind", "unknown regret kind '" + kind + "'");
  }
  return r;
}

std::size_t horizon_of(const EnvironmentSpec& env) {
  if (env.kind != EnvironmentKind::kFromFile) return env.horizon;
  try {
    return gen_losses(env).size();
  } catch (const std::exception& e) {
    fail("environment.path", e.what());
  }
}

}  // namespace

std::string to_string(RegretKind kind) {
  switch (kind) {
    case RegretKind::kShifting:
      return "shifting";
    case RegretKind::kAdaptive:
      return "adaptive";
    case RegretKind::kDiscounted:
      return "discounted";
  }
  return "unknown";
}

bool certify(double regret, double bound) {
  return regret <= bound + 1e-6 * std::max(1.0, std::abs(bound));
}

ExperimentSpec parse_experiment(const json& config) {
  if (!config.is_object()) throw ConfigError("<root>: expected an object");
  ExperimentSpec spec;
  spec.environment = parse_environment(field(config, "<root>", "environment"));
  const std::size_t horizon = horizon_of(spec.environment);
  if (horizon == 0) throw ConfigError("environment: empty loss sequence");
  spec.environment.horizon = horizon;

  spec.forecaster = parse_forecaster(field(config, "<root>", "forecaster"), spec.environment.d, horizon);
  if (has(config, "regret")) {
    spec.regret = parse_regret(config["regret"], horizon);
  }
  if (has(config, "comparator")) {
    spec.comparator = parse_comparator(config["comparator"], spec.environment, horizon);
  } else if (spec.regret.kind == RegretKind::kShifting) {
    throw ConfigError("comparator: missing (required for shifting regret)");
  }
  if (has(config, "repetitions")) {
    spec.repetitions = get_count(config["repetitions"], "repetitions");
    if (spec.repetitions < 1) throw ConfigError("repetitions: must be >= 1");
  }
  if (has(config, "output")) {
    const json& out = config["output"];
    if (has(out, "csv")) spec.csv_path = get_string(out["csv"], "output.csv");
  }
  return spec;
}

ExperimentSpec load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  json config;
  try {
    config = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("<root>: invalid JSON: ") + e.what());
  }
  return parse_experiment(config);
}

double rule_bound(const MixingRule& rule, double eta, std::size_t d, std::size_t horizon,
                  const ComparatorStats& s) {
  if (auto* r = std::get_if<FixedShare>(&rule)) {
    return bound_fixed_share({d, eta, r->alpha}, s.m, s.u_sum, s.u1_norm);
  }
  if (auto* r = std::get_if<Projected>(&rule)) {
    return bound_projected({d, eta, r->alpha}, s.m, s.u_sum, s.u1_norm);
  }
  const double dd = static_cast<double>(d);
  if (auto* r = std::get_if<BWMax>(&rule)) {
    BoundInputs in{d, eta, r->alpha, 1.0, std::min(dd, static_cast<double>(horizon))};
    return bound_bw(in, s.m, s.n, s.u_sum, s.u1_norm, horizon);
  }
  if (auto* r = std::get_if<BWDecayed>(&rule)) {
    BoundInputs in{d, eta, r->alpha, std::exp(r->gamma), std::min(dd, 1.0 / r->gamma)};
    return bound_bw(in, s.m, s.n, s.u_sum, s.u1_norm, horizon);
  }
  const auto& tv = std::get<TimeVarying>(rule);
  return bound_time_varying(d, tv.eta, tv.alpha, s.m, s.norms);
}

double rule_adaptive_bound(const MixingRule& rule, double eta, std::size_t d, std::size_t horizon,
                           std::size_t tau0) {
  if (const auto* tv = std::get_if<TimeVarying>(&rule)) {
    return bound_time_varying_adaptive(d, horizon, tv->eta, tv->alpha, tau0);
  }
  // Window comparators have n = 1 and ||u_1|| + m = 1; the remaining
  // bounds grow with U, so U = tau0 covers every window.
  ComparatorStats first{1.0, 0.0, 1.0, static_cast<double>(tau0), {}};
  double best = rule_bound(rule, eta, d, horizon, first);
  if (horizon >= 2) {
    ComparatorStats later{0.0, 1.0, 1.0, static_cast<double>(std::min(tau0, horizon - 1)), {}};
    best = std::max(best, rule_bound(rule, eta, d, horizon, later));
  }
  return best;
}

RegretReport run_repetition(const ExperimentSpec& spec, std::size_t rep) {
  const auto start = std::chrono::steady_clock::now();
  RegretReport report;
  report.run_id = std::to_string(rep);
  report.seed = derive_seed(spec.environment.seed, rep);
  report.d = spec.environment.d;
  report.regret_kind = spec.regret.kind;

  EnvironmentSpec env = spec.environment;
  env.seed = report.seed;
  std::vector<Vector> losses;
  Trajectory traj;
  if (env.kind == EnvironmentKind::kAdversarialFlip) {
    traj = run_forecaster_online(spec.forecaster.rule, spec.forecaster.eta, env.d, env.horizon,
                                 make_adversary(env), losses);
  } else {
    losses = gen_losses(env);
    traj = run_forecaster(spec.forecaster.rule, spec.forecaster.eta, losses, env.d);
  }
  const std::size_t horizon = losses.size();
  report.horizon = horizon;
  const auto& rule = spec.forecaster.rule;
  const double eta = spec.forecaster.eta;

  switch (spec.regret.kind) {
    case RegretKind::kShifting: {
      ComparatorSpec cs = *spec.comparator;
      if (cs.kind == ComparatorKind::kScaledArbitrary) cs.seed = derive_seed(cs.seed, rep);
      const auto comp = gen_comparator(cs);
      const auto stats = comparator_stats(comp.u);
      report.regret = generalized_shifting_regret(traj.realized, losses, comp.u);
      report.m = stats.m;
      report.n = stats.n;
      report.u_sum = stats.u_sum;
      report.l_sum = comparator_loss(losses, comp.u);
      report.bound = rule_bound(rule, eta, env.d, horizon, stats);
      break;
    }
    case RegretKind::kAdaptive: {
      const auto ar = adaptive_regret(traj.realized, losses, spec.regret.tau0);
      report.regret = ar.value;
      report.m = 1.0;
      report.n = 1.0;
      report.u_sum = static_cast<double>(spec.regret.tau0);
      double expert = 0.0;
      for (std::size_t t = ar.first; t <= ar.last; ++t) expert += losses[t - 1][ar.corner];
      report.l_sum = expert;
      report.bound = rule_adaptive_bound(rule, eta, env.d, horizon, spec.regret.tau0);
      break;
    }
    case RegretKind::kDiscounted: {
      const auto& sched = spec.regret.schedule;
      const auto dr = discounted_regret(traj.realized, losses, sched);
      ComparatorStats stats;
      stats.norms = sched.betas;
      stats.u1_norm = sched.betas.front();
      stats.m = discount_regularity(sched.betas) - stats.u1_norm;
      stats.n = *std::max_element(sched.betas.begin(), sched.betas.end());
      CompensatedSum total;
      for (double b : sched.betas) total.add(b);
      stats.u_sum = total.value();
      report.regret = dr.value;
      report.m = stats.m;
      report.n = stats.n;
      report.u_sum = stats.u_sum;
      report.l_sum = dr.comparator_loss;
      report.bound = rule_bound(rule, eta, env.d, horizon, stats);
      break;
    }
  }
  report.pass = certify(report.regret, report.bound);
  report.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<RegretReport> run_experiment(const ExperimentSpec& spec, unsigned threads) {
  std::vector<RegretReport> rows(spec.repetitions);
  const unsigned workers =
      std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(spec.repetitions)));
  if (workers == 1) {
    for (std::size_t r = 0; r < spec.repetitions; ++r) rows[r] = run_repetition(spec, r);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t r = next++; r < spec.repetitions; r = next++) {
        try {
          rows[r] = run_repetition(spec, r);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return rows;
}

RegretReport worst_case_summary(const std::vector<RegretReport>& rows) {
  if (rows.empty()) throw std::invalid_argument("worst_case_summary: no rows");
  auto excess = [](const RegretReport& r) {
    return r.regret - r.bound - 1e-6 * std::max(1.0, std::abs(r.bound));
  };
  RegretReport worst = *std::max_element(
      rows.begin(), rows.end(),
      [&](const RegretReport& a, const RegretReport& b) { return excess(a) < excess(b); });
  worst.run_id = "worst";
  double total_ms = 0.0;
  for (const auto& r : rows) total_ms += r.wall_ms;
  worst.wall_ms = total_ms;
  return worst;
}

namespace {

std::string real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_row(std::ostream& out, const RegretReport& r, bool timing) {
  out << r.run_id << ',' << r.seed << ',' << r.horizon << ',' << r.d << ','
      << to_string(r.regret_kind) << ',' << real(r.regret) << ',' << real(r.m) << ','
      << real(r.n) << ',' << real(r.u_sum) << ',' << real(r.l_sum) << ',' << real(r.bound) << ','
      << (r.pass ? "pass" : "fail") << ',' << real(timing ? r.wall_ms : 0.0) << '\n';
}

}  // namespace

void write_report_csv(std::ostream& out, const std::vector<RegretReport>& rows, bool timing) {
  out << "run_id,seed,T,d,regret_kind,regret,m,n,U_sum,L_sum,bound,verdict,wall_ms\n";
  for (const auto& r : rows) write_row(out, r, timing);
  if (!rows.empty()) write_row(out, worst_case_summary(rows), timing);
}

}  // namespace genshare
