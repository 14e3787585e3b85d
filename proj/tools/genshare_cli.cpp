// genshare command-line front end: run and certify experiments, tune
// parameters, project onto the clipped simplex and evaluate bounds.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "genshare/bounds.hpp"
#include "genshare/experiment.hpp"
#include "genshare/simplex.hpp"

namespace {

using namespace genshare;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

unsigned thread_cap() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) {
      throw std::invalid_argument("THREADS: expected a positive integer, got '" + std::string(env) + "'");
    }
    return static_cast<unsigned>(v);
  }
  return hw;
}

Vector parse_list(const std::string& text) {
  Vector out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    out.push_back(std::stod(cell, &used));
    if (used != cell.size()) throw std::invalid_argument("not a number: '" + cell + "'");
  }
  if (out.empty()) throw std::invalid_argument("empty vector");
  return out;
}

// key=value parameters of the `bound` subcommand.
class Params {
 public:
  explicit Params(const std::vector<std::string>& args) {
    for (const auto& a : args) {
      const auto eq = a.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw std::invalid_argument("expected key=value, got '" + a + "'");
      }
      values_[a.substr(0, eq)] = a.substr(eq + 1);
    }
  }

  double real(const std::string& key) {
    used_.push_back(key);
    const auto it = values_.find(key);
    if (it == values_.end()) throw std::invalid_argument("missing parameter '" + key + "'");
    std::size_t n = 0;
    const double x = std::stod(it->second, &n);
    if (n != it->second.size()) throw std::invalid_argument("parameter '" + key + "' is not a number");
    return x;
  }

  double real(const std::string& key, double fallback) {
    return values_.count(key) ? real(key) : (used_.push_back(key), fallback);
  }

  std::size_t count(const std::string& key) {
    const double x = real(key);
    if (x < 0 || x != static_cast<double>(static_cast<std::size_t>(x))) {
      throw std::invalid_argument("parameter '" + key + "' must be a nonnegative integer");
    }
    return static_cast<std::size_t>(x);
  }

  void done() const {
    for (const auto& [k, v] : values_) {
      if (std::find(used_.begin(), used_.end(), k) == used_.end()) {
        throw std::invalid_argument("unknown parameter '" + k + "'");
      }
    }
  }

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::string> used_;
};

const char* kFamilies =
    "projected       d eta alpha m U u1\n"
    "fixed_share     d eta alpha m U u1\n"
    "tuned           d m0 U0\n"
    "adaptive        d tau0\n"
    "small_loss      d m0 U0 L0\n"
    "bw              d eta alpha m n U u1 T [C=1] [Zmax=min(d,T)]\n"
    "bw_max          d T eta alpha m n\n"
    "bw_decayed      d T eta alpha m0 n0\n"
    "decreasing      d T\n"
    "decreasing_adaptive d T tau0\n";

void print_bound(const std::string& family, const std::vector<std::string>& args) {
  Params p(args);
  if (family == "projected" || family == "fixed_share") {
    BoundInputs in{.d = p.count("d"), .eta = p.real("eta"), .alpha = p.real("alpha")};
    const double m = p.real("m"), u = p.real("U"), u1 = p.real("u1");
    p.done();
    const double b = family == "projected" ? bound_projected(in, m, u, u1)
                                           : bound_fixed_share(in, m, u, u1);
    std::cout << "bound " << fmt(b) << "\n";
  } else if (family == "tuned") {
    const auto d = p.count("d");
    const double m0 = p.real("m0"), u0 = p.real("U0");
    p.done();
    const auto t = tune_fixed_share(d, m0, u0);
    std::cout << "bound " << fmt(t.bound) << "\nrelaxed " << fmt(fixed_share_relaxed_bound(d, m0, u0))
              << "\n";
  } else if (family == "adaptive") {
    const auto d = p.count("d");
    const auto tau0 = p.count("tau0");
    p.done();
    const auto b = bound_adaptive(d, tau0);
    std::cout << "bound " << fmt(b.exact) << "\nrelaxed " << fmt(b.relaxed) << "\n";
  } else if (family == "small_loss") {
    const auto d = p.count("d");
    const double m0 = p.real("m0"), u0 = p.real("U0"), l0 = p.real("L0");
    p.done();
    std::cout << "bound " << fmt(tune_small_loss(d, m0, u0, l0).bound) << "\n";
  } else if (family == "bw") {
    const auto d = p.count("d");
    const auto horizon = p.count("T");
    BoundInputs in{.d = d, .eta = p.real("eta"), .alpha = p.real("alpha"), .c = p.real("C", 1.0),
                   .z_max = p.real("Zmax", static_cast<double>(std::min(d, horizon)))};
    const double m = p.real("m"), n = p.real("n"), u = p.real("U"), u1 = p.real("u1");
    p.done();
    std::cout << "bound " << fmt(bound_bw(in, m, n, u, u1, horizon)) << "\n";
  } else if (family == "bw_max") {
    const auto d = p.count("d");
    const auto horizon = p.count("T");
    const double eta = p.real("eta"), alpha = p.real("alpha"), m = p.real("m"), n = p.real("n");
    p.done();
    std::cout << "bound " << fmt(bound_bw_max_corollary(d, horizon, eta, alpha, m, n)) << "\n";
  } else if (family == "bw_decayed") {
    const auto d = p.count("d");
    const auto horizon = p.count("T");
    const double eta = p.real("eta"), alpha = p.real("alpha"), m0 = p.real("m0"), n0 = p.real("n0");
    p.done();
    std::cout << "gamma " << fmt(bw_decay_rate(m0, n0, horizon)) << "\nbound "
              << fmt(bound_bw_decayed_corollary(d, horizon, eta, alpha, m0, n0)) << "\n";
  } else if (family == "decreasing") {
    const auto d = p.count("d");
    const auto horizon = p.count("T");
    p.done();
    std::cout << "bound " << fmt(corollary7_bound(d, horizon)) << "\n";
  } else if (family == "decreasing_adaptive") {
    const auto d = p.count("d");
    const auto horizon = p.count("T");
    const auto tau0 = p.count("tau0");
    p.done();
    const TimeVarying rule = corollary7_rule(d);
    std::cout << "bound " << fmt(bound_time_varying_adaptive(d, horizon, rule.eta, rule.alpha, tau0))
              << "\n";
  } else {
    throw std::invalid_argument("unknown bound family '" + family + "'; families:\n" + kFamilies);
  }
}

int run_config(const std::string& path, const std::string& output, bool timing, bool certify_only) {
  const ExperimentSpec spec = load_experiment(path);
  const auto rows = run_experiment(spec, thread_cap());
  const std::string target = output.empty() ? spec.csv_path : output;
  if (target.empty() || target == "-") {
    write_report_csv(std::cout, rows, timing);
  } else {
    std::ofstream out(target);
    if (!out) throw std::runtime_error("cannot open '" + target + "' for writing");
    write_report_csv(out, rows, timing);
    if (!out) throw std::runtime_error("write to '" + target + "' failed");
  }
  const auto worst = worst_case_summary(rows);
  if (certify_only) {
    std::size_t failed = 0;
    for (const auto& r : rows) failed += r.pass ? 0 : 1;
    std::cerr << (failed == 0 ? "PASS" : "FAIL") << ": " << rows.size() - failed << "/"
              << rows.size() << " runs certified; worst regret " << fmt(worst.regret)
              << " vs bound " << fmt(worst.bound) << "\n";
    return failed == 0 ? 0 : 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized share forecasters: regret certification toolkit"};
  app.require_subcommand(1);

  std::string config, output;
  bool no_timing = false;
  auto* run = app.add_subcommand("run", "Run an experiment config and write the report CSV");
  run->add_option("config", config, "Experiment JSON")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", output, "Report CSV path ('-' for stdout)");
  run->add_flag("--no-timing", no_timing, "Write wall_ms as 0 for byte-reproducible reports");

  auto* cert = app.add_subcommand("certify", "Run a config; exit 1 if any verdict fails");
  cert->add_option("config", config, "Experiment JSON")->required()->check(CLI::ExistingFile);
  cert->add_option("-o,--output", output, "Report CSV path ('-' for stdout)");
  cert->add_flag("--no-timing", no_timing, "Write wall_ms as 0");

  std::size_t d = 0;
  double m0 = 0, u0 = 0, l0 = -1;
  auto* tune = app.add_subcommand("tune", "Tuned fixed-share (or small-loss with --L0) parameters");
  tune->add_option("--d", d, "Number of experts")->required();
  tune->add_option("--m0", m0, "Budget on ||u_1|| + m")->required();
  tune->add_option("--U0", u0, "Budget on sum_t ||u_t||")->required();
  tune->add_option("--L0", l0, "Budget on the comparator's cumulative loss");

  double alpha = 0;
  std::string v;
  auto* project = app.add_subcommand("project", "KL projection onto { q : q_i >= alpha/d }");
  project->add_option("--alpha", alpha, "Share parameter in [0,1]")->required();
  project->add_option("--v", v, "Comma-separated positive weights")->required();

  std::string family;
  std::vector<std::string> params;
  auto* bound = app.add_subcommand("bound", std::string("Evaluate a regret bound. Families:\n") + kFamilies);
  bound->add_option("family", family, "Bound family")->required();
  bound->add_option("params", params, "key=value parameters");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_config(config, output, !no_timing, false);
    if (*cert) return run_config(config, output, !no_timing, true);
    if (*tune) {
      const Tuning t = l0 >= 0 ? tune_small_loss(d, m0, u0, l0) : tune_fixed_share(d, m0, u0);
      std::cout << "eta " << fmt(t.eta) << "\nalpha " << fmt(t.alpha) << "\nbound " << fmt(t.bound)
                << "\n";
    } else if (*project) {
      Vector w = parse_list(v);
      const Vector out = kl_project_clipped(w, alpha);
      for (std::size_t i = 0; i < out.size(); ++i) std::cout << (i ? "," : "") << fmt(out[i]);
      std::cout << "\n";
    } else if (*bound) {
      print_bound(family, params);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
