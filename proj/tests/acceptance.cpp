// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "genshare/bounds.hpp"
#include "genshare/convex.hpp"
#include "genshare/environments.hpp"
#include "genshare/experiment.hpp"
#include "genshare/forecasters.hpp"
#include "genshare/regret.hpp"
#include "genshare/simplex.hpp"
#include "test_support.hpp"

using namespace genshare;
using genshare::testing::grid_projection;
using genshare::testing::naive_kl;
using genshare::testing::random_distribution;
using genshare::testing::random_losses;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Tally {
  std::size_t checks = 0;
  std::size_t failures = 0;
  double worst = -std::numeric_limits<double>::infinity();  // largest (lhs - rhs)

  void add(double lhs, double rhs, double tol = 0.0) {
    ++checks;
    worst = std::max(worst, lhs - rhs);
    if (!(lhs <= rhs + tol)) ++failures;
  }
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

std::vector<Vector> iid_losses(Rng& rng, std::size_t d, std::size_t horizon) {
  std::vector<Vector> out;
  out.reserve(horizon);
  for (std::size_t t = 0; t < horizon; ++t) out.push_back(random_losses(rng, d));
  return out;
}

ComparatorSequence corner_sequence(std::size_t d, const std::vector<std::size_t>& lengths,
                                   const std::vector<std::size_t>& corners) {
  ComparatorSpec c{.kind = ComparatorKind::kPiecewiseCorner, .d = d};
  c.segment_lengths = lengths;
  c.corners = corners;
  c.horizon = 0;
  for (auto l : lengths) c.horizon += l;
  return gen_comparator(c).u;
}

// 1. Exponential-weights certificate at every round.
Outcome per_round_certificates() {
  const std::size_t dims[] = {2, 5, 50};
  const double etas[] = {0.1, 1.0, 3.0};
  Rng rng(derive_seed(1, 0));
  Tally tally;
  for (int config = 0; config < 50; ++config) {
    const std::size_t d = dims[config % 3];
    const double eta = etas[(config / 3) % 3];
    const double alpha = 0.2 * rng.uniform();
    MixingRule rule;
    switch (config % 5) {
      case 0: rule = FixedShare{alpha}; break;
      case 1: rule = Projected{alpha}; break;
      case 2: rule = BWMax{alpha}; break;
      case 3: rule = BWDecayed{alpha, 0.05 + rng.uniform()}; break;
      default:
        rule = TimeVarying{[eta](std::size_t t) { return eta / std::sqrt(static_cast<double>(t)); },
                           [](std::size_t t) { return 1.0 / static_cast<double>(t + 1); }};
    }
    const auto losses = iid_losses(rng, d, 200);
    const auto tr = run_forecaster(rule, eta, losses);
    const bool varying = std::holds_alternative<TimeVarying>(rule);
    for (std::size_t t = 0; t < losses.size(); ++t) {
      for (int k = 0; k < 50; ++k) {
        const Vector q = random_distribution(rng, d);
        // Varying learning rates use the matching per-round inequality.
        const double slack =
            varying ? time_varying_slack(tr.p[t], tr.v_next[t], losses[t], q, tr.eta[t], tr.eta_prev[t])
                    : exp_weights_slack(tr.p[t], tr.v_next[t], losses[t], q, eta);
        tally.add(-slack, 1e-9);
      }
    }
  }
  return {tally.failures == 0,
          fmt("%.0f inequalities, min slack %.3g", static_cast<double>(tally.checks), -tally.worst)};
}

EnvironmentSpec switching_environment(std::uint64_t seed) {
  EnvironmentSpec env{.kind = EnvironmentKind::kPiecewiseStationary, .d = 10, .horizon = 1000,
                      .seed = seed};
  env.segments = best_arm_segments(10, {250, 250, 250, 250}, {0, 3, 6, 9}, 0.2, 0.8);
  return env;
}

// 2. and 3. Shifting regret against the piecewise best corner.
Outcome shifting_certification(bool projected) {
  const double m0 = 4.0, u0 = 1000.0;
  const Tuning tuned = tune_fixed_share(10, m0, u0);
  const double closed_form =
      std::sqrt(u0 * (m0 * std::log(10.0) + u0 * binary_entropy(m0 / u0)) / 2.0);
  Tally tally;
  bool stats_ok = std::abs(closed_form - tuned.bound) <= 1e-9 * closed_form;
  double bound_used = 0.0;
  for (std::uint64_t run = 0; run < 100; ++run) {
    const auto env = switching_environment(derive_seed(2, run));
    const auto losses = gen_losses(env);
    const auto u = gen_comparator(piecewise_best_comparator(env)).u;
    const auto stats = comparator_stats(u);
    stats_ok = stats_ok && stats.u1_norm + stats.m == m0 && stats.u_sum == u0;
    const MixingRule rule =
        projected ? MixingRule{Projected{tuned.alpha}} : MixingRule{FixedShare{tuned.alpha}};
    const auto tr = run_forecaster(rule, tuned.eta, losses);
    const double regret = generalized_shifting_regret(tr.realized, losses, u);
    bound_used = projected ? bound_projected({.d = 10, .eta = tuned.eta, .alpha = tuned.alpha},
                                             stats.m, stats.u_sum, stats.u1_norm)
                           : tuned.bound;
    tally.add(regret, bound_used);
  }
  return {tally.failures == 0 && stats_ok,
          fmt("100 runs, worst regret - bound = %.2f (bound %.2f)", tally.worst, bound_used)};
}

Outcome projection_oracle() {
  Rng rng(derive_seed(3, 0));
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 2 + static_cast<std::size_t>(trial % 2);
    const double alpha = 0.95 * rng.uniform();
    Vector v = random_distribution(rng, d);
    for (auto& x : v) x = std::max(x, 1e-4);
    normalize(v);
    const double ours = naive_kl(kl_project_clipped(v, alpha), v);
    const auto grid = grid_projection(v, alpha, 1e-3, 3);
    worst = std::max(worst, std::abs(ours - grid.kl));
  }
  return {worst <= 1e-6, fmt("200 cases, max |KL - grid KL| = %.2e", worst)};
}

// 4. Interval regret.
Outcome adaptive_certification() {
  Tally fixed_share;
  for (std::size_t tau0 : {8u, 32u}) {
    const Tuning tuned = tune_fixed_share(2, 1.0, static_cast<double>(tau0));
    const double bound = bound_adaptive(2, tau0).exact;
    for (std::uint64_t run = 0; run < 50; ++run) {
      const EnvironmentSpec env{.kind = EnvironmentKind::kAdversarialFlip, .d = 2, .horizon = 256,
                                .seed = derive_seed(4, run)};
      std::vector<Vector> losses;
      const auto tr = run_forecaster_online(FixedShare{tuned.alpha}, tuned.eta, 2, 256,
                                            make_adversary(env), losses);
      fixed_share.add(adaptive_regret(tr.realized, losses, tau0).value, bound);
    }
  }

  Tally varying;
  const std::size_t d = 5, horizon = 500;
  const double bound = corollary7_bound(d, horizon);
  const TimeVarying rule = corollary7_rule(d);
  for (std::uint64_t run = 0; run < 20; ++run) {
    std::vector<Vector> losses;
    Trajectory tr;
    if (run % 2 == 0) {
      const EnvironmentSpec env{.kind = EnvironmentKind::kAdversarialFlip, .d = d,
                                .horizon = horizon, .seed = derive_seed(41, run)};
      tr = run_forecaster_online(rule, 1.0, d, horizon, make_adversary(env), losses);
    } else {
      EnvironmentSpec env{.kind = EnvironmentKind::kPiecewiseStationary, .d = d,
                          .horizon = horizon, .seed = derive_seed(42, run)};
      env.segments = best_arm_segments(d, {100, 100, 100, 100, 100}, {0, 4, 1, 3, 2}, 0.0, 1.0);
      losses = gen_losses(env);
      tr = run_forecaster(rule, 1.0, losses);
    }
    varying.add(adaptive_regret(tr.realized, losses, horizon).value, bound);
  }
  return {fixed_share.failures == 0 && varying.failures == 0,
          fmt("fixed share worst regret - bound = %.3f; decreasing schedules %.2f (bound %.2f)",
              fixed_share.worst, varying.worst, bound)};
}

// 5. Discounted regret with monotone ramps.
Outcome discounted_certification() {
  Tally tally;
  for (std::uint64_t run = 0; run < 50; ++run) {
    const bool up = run % 2 == 0;
    const auto env = switching_environment(derive_seed(5, run));
    const auto losses = gen_losses(env);
    const DiscountSchedule sched = linear_ramp(env.horizon, up);
    double u0 = 0.0;
    for (double b : sched.betas) u0 += b;
    const double m0 = monotone_discount_regularity(sched.betas);
    const Tuning tuned = tune_fixed_share(env.d, m0, u0);
    const auto tr = run_forecaster(FixedShare{tuned.alpha}, tuned.eta, losses);
    tally.add(discounted_regret(tr.realized, losses, sched).value, tuned.bound);
  }
  return {tally.failures == 0, fmt("50 runs, worst regret - bound = %.2f", tally.worst)};
}

// 6. Mixing toward past weights against a sparse comparator.
Outcome sparse_certification() {
  const std::size_t d = 200, horizon = 100;
  std::vector<std::size_t> lengths(10, 10), corners;
  for (std::size_t k = 0; k < 10; ++k) corners.push_back(k % 2);
  const auto u = corner_sequence(d, lengths, corners);
  const auto stats = comparator_stats(u);
  const double m = stats.m, n = stats.n;
  const double T = static_cast<double>(horizon);

  const double alpha = m / (T - 1.0);
  const double numerator = n * std::log(static_cast<double>(d)) + m * std::log(T / alpha) -
                           (T - m - 1.0) * std::log1p(-alpha);
  const double eta = std::sqrt(8.0 * numerator / T);
  const double gamma = bw_decay_rate(m, n, horizon);
  const double max_bound = bound_bw_max_corollary(d, horizon, eta, alpha, m, n);
  const double decayed_bound = bound_bw_decayed_corollary(d, horizon, eta, alpha, m, n);

  Tally tally;
  bool conditions = true;
  for (std::uint64_t run = 0; run < 20; ++run) {
    EnvironmentSpec env{.kind = EnvironmentKind::kPiecewiseStationary, .d = d, .horizon = horizon,
                        .seed = derive_seed(6, run)};
    env.segments = best_arm_segments(d, lengths, corners, 0.1, 0.9);
    const auto losses = gen_losses(env);
    for (const bool decayed : {false, true}) {
      const MixingRule rule =
          decayed ? MixingRule{BWDecayed{alpha, gamma}} : MixingRule{BWMax{alpha}};
      const double c = decayed ? std::exp(gamma) : 1.0;
      Forecaster f(rule, eta, d);
      std::vector<double> realized;
      for (const auto& loss : losses) {
        const Vector v(f.pre_weights().begin(), f.pre_weights().end());
        const Vector w(f.shared_weights().begin(), f.shared_weights().end());
        realized.push_back(f.step(loss).realized_loss);
        conditions = conditions && bw_conditions_hold(v, w, f.shared_weights(), c);
      }
      tally.add(generalized_shifting_regret(realized, losses, u), decayed ? decayed_bound : max_bound);
    }
  }
  const bool ordered = decayed_bound < max_bound;
  return {tally.failures == 0 && conditions && ordered && m == 9.0 && n == 2.0,
          fmt("worst regret - bound = %.2f; decayed bound %.2f < max bound %.2f", tally.worst,
              decayed_bound, max_bound)};
}

// 7. Small comparator loss.
Outcome small_loss_certification() {
  const std::size_t d = 10, horizon = 1000;
  const double m0 = 1.0, u0 = 1000.0, l0 = 10.0;
  const Tuning tuned = tune_small_loss(d, m0, u0, l0);
  Vector means(d, 0.6);
  means[3] = 0.003;
  Tally tally;
  bool small = true;
  for (std::uint64_t run = 0; run < 50; ++run) {
    const EnvironmentSpec env{.kind = EnvironmentKind::kIidBernoulli, .d = d, .horizon = horizon,
                              .seed = derive_seed(7, run), .means = means};
    const auto losses = gen_losses(env);
    const auto u = corner_sequence(d, {horizon}, {3});
    small = small && comparator_loss(losses, u) <= l0;
    const auto tr = run_forecaster(FixedShare{tuned.alpha}, tuned.eta, losses);
    tally.add(generalized_shifting_regret(tr.realized, losses, u), tuned.bound);
  }
  return {tally.failures == 0 && small,
          fmt("50 runs, worst regret - bound = %.2f (bound %.2f)", tally.worst, tuned.bound)};
}

// 8. Equivalences against direct definitions.
Outcome equivalences() {
  Rng rng(derive_seed(8, 0));
  double tv_gap = 0.0;
  {
    const auto losses = iid_losses(rng, 6, 500);
    const auto fs = run_forecaster(FixedShare{0.02}, 0.7, losses);
    const auto tv = run_forecaster(
        TimeVarying{[](std::size_t) { return 0.7; }, [](std::size_t) { return 0.02; }}, 0.7, losses);
    for (std::size_t t = 0; t < fs.p.size(); ++t) {
      for (std::size_t i = 0; i < 6; ++i) tv_gap = std::max(tv_gap, std::abs(fs.p[t][i] - tv.p[t][i]));
    }
  }

  double decay_gap = 0.0;
  {
    const double gamma = 0.15;
    Forecaster f(BWDecayed{0.1, gamma}, 1.3, 5, {.keep_history = true});
    for (int t = 0; t < 200; ++t) {
      f.step(random_losses(rng, 5));
      const auto& hist = f.history();
      const double now = static_cast<double>(hist.size());
      for (std::size_t j = 0; j < 5; ++j) {
        double best = 0.0;
        for (std::size_t s = 1; s <= hist.size(); ++s) {
          best = std::max(best, std::exp(gamma * (static_cast<double>(s) - now)) * hist[s - 1][j]);
        }
        decay_gap = std::max(decay_gap, std::abs(best - f.shared_weights()[j]));
      }
    }
  }

  double scan_gap = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t horizon = 200, d = 3;
    const auto losses = iid_losses(rng, d, horizon);
    const auto tr = run_forecaster(FixedShare{0.05}, 1.0, losses);
    const std::size_t tau0 = 1 + rng.index(horizon);
    double brute = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 1; r <= horizon; ++r) {
      for (std::size_t s = r; s <= horizon && s + 1 - r <= tau0; ++s) {
        for (std::size_t j = 0; j < d; ++j) {
          double acc = 0.0;
          for (std::size_t t = r; t <= s; ++t) acc += tr.realized[t - 1] - losses[t - 1][j];
          brute = std::max(brute, acc);
        }
      }
    }
    scan_gap = std::max(scan_gap, std::abs(brute - adaptive_regret(tr.realized, losses, tau0).value));
  }

  bool convex_exact = true;
  {
    const auto losses = iid_losses(rng, 4, 300);
    const auto plain = run_forecaster(Projected{0.03}, 2.0, losses);
    Forecaster f(Projected{0.03}, 2.0, 4);
    for (std::size_t t = 0; t < losses.size(); ++t) {
      const Vector l = losses[t];
      const ConvexLoss linear{[l](std::span<const double> p) { return dot(p, l); },
                              [l](std::span<const double>) { return l; }};
      const auto step = step_convex(f, linear);
      convex_exact = convex_exact && step.realized_loss == plain.realized[t] &&
                     std::equal(f.weights().begin(), f.weights().end(), plain.p[t + 1].begin());
    }
  }

  const bool pass = tv_gap <= 1e-14 && decay_gap <= 1e-12 && scan_gap <= 1e-9 && convex_exact;
  return {pass, fmt("constant schedules %.1e, decayed max %.1e, interval scan %.1e", tv_gap,
                    decay_gap, scan_gap) +
                    (convex_exact ? ", convex reduction exact" : ", convex reduction differs")};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> body;
  };
  const std::vector<Criterion> criteria{
      {1, "per-round certificates", 10.0, per_round_certificates},
      {2, "fixed-share shifting regret", 30.0, [] { return shifting_certification(false); }},
      {3, "projected shifting regret + projection oracle", 60.0,
       [] {
         Outcome a = shifting_certification(true);
         Outcome b = projection_oracle();
         return Outcome{a.pass && b.pass, a.detail + "; " + b.detail};
       }},
      {4, "adaptive regret", 60.0, adaptive_certification},
      {5, "discounted regret", 60.0, discounted_certification},
      {6, "sparse comparator (past-weight mixing)", 60.0, sparse_certification},
      {7, "small-loss regret", 60.0, small_loss_certification},
      {8, "equivalence oracles", 60.0, equivalences},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.body();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = out.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("criterion %d %s: %s | %s | %.2f s (limit %.0f s)\n", c.id, c.name,
                pass ? "PASS" : "FAIL", out.detail.c_str(), secs, c.limit_s);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
