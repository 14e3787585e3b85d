#include "genshare/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace genshare {

namespace {

// coef * ln(arg) with the convention 0 * ln(anything) = 0.
double coef_log(double coef, double arg) { return coef == 0.0 ? 0.0 : coef * std::log(arg); }

// coef * ln(1/(1-alpha)), same convention.
double coef_log_share(double coef, double alpha) {
  return coef == 0.0 ? 0.0 : -coef * std::log1p(-alpha);
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::domain_error(msg);
}

void check_common(const BoundInputs& in, const char* who) {
  require(in.d >= 1, std::string(who) + ": d must be >= 1");
  require(in.eta > 0.0 && std::isfinite(in.eta), std::string(who) + ": eta must be positive");
  require(in.alpha >= 0.0 && in.alpha <= 1.0, std::string(who) + ": alpha outside [0,1]");
}

void check_stats(double m, double u_sum, double u1_norm, const char* who) {
  require(m >= 0.0 && u_sum >= 0.0 && u1_norm >= 0.0,
          std::string(who) + ": comparator statistics must be nonnegative");
}

double ln_d(std::size_t d) { return std::log(static_cast<double>(d)); }

}  // namespace

double bound_projected(const BoundInputs& in, double m, double u_sum, double u1_norm) {
  check_common(in, "bound_projected");
  check_stats(m, u_sum, u1_norm, "bound_projected");
  require(m == 0.0 || in.alpha > 0.0, "bound_projected: alpha must be > 0 when m > 0");
  const double d = static_cast<double>(in.d);
  return u1_norm * ln_d(in.d) / in.eta + coef_log(m, d / in.alpha) / in.eta +
         (in.eta / 8.0 + in.alpha) * u_sum;
}

double bound_fixed_share(const BoundInputs& in, double m, double u_sum, double u1_norm) {
  check_common(in, "bound_fixed_share");
  check_stats(m, u_sum, u1_norm, "bound_fixed_share");
  require(m == 0.0 || in.alpha > 0.0, "bound_fixed_share: alpha must be > 0 when m > 0");
  const double d = static_cast<double>(in.d);
  const double tail = std::max(0.0, u_sum - u1_norm - m);
  require(tail == 0.0 || in.alpha < 1.0,
          "bound_fixed_share: alpha must be < 1 unless m equals sum_{t>=2} ||u_t||");
  return u1_norm * ln_d(in.d) / in.eta + in.eta * u_sum / 8.0 + coef_log(m, d / in.alpha) / in.eta +
         coef_log_share(tail, in.alpha) / in.eta;
}

Tuning tune_fixed_share(std::size_t d, double m0, double u0) {
  require(d >= 2, "tune_fixed_share: d must be >= 2");
  require(m0 > 0.0 && u0 > 0.0, "tune_fixed_share: m0 and U0 must be positive");
  require(m0 <= u0, "tune_fixed_share: m0 must not exceed U0");
  Tuning out;
  out.alpha = m0 / u0;
  const double b = m0 * ln_d(d) + u0 * binary_entropy(out.alpha);
  out.eta = std::sqrt(8.0 * b / u0);
  out.bound = std::sqrt(u0 * b / 2.0);
  return out;
}

double fixed_share_relaxed_bound(std::size_t d, double m0, double u0) {
  require(d >= 1 && m0 > 0.0 && u0 > 0.0, "fixed_share_relaxed_bound: invalid arguments");
  return std::sqrt(u0 * m0 / 2.0 * (ln_d(d) + 1.0 + std::log(u0 / m0)));
}

AdaptiveBound bound_adaptive(std::size_t d, std::size_t tau0) {
  require(tau0 >= 1, "bound_adaptive: tau0 must be >= 1");
  require(d >= 2, "bound_adaptive: d must be >= 2");
  const double tau = static_cast<double>(tau0);
  AdaptiveBound out;
  out.exact = std::sqrt(tau / 2.0 * (tau * binary_entropy(1.0 / tau) + ln_d(d)));
  out.relaxed = std::sqrt(tau / 2.0 * (1.0 + ln_d(d) + std::log(tau)));
  return out;
}

Tuning tune_small_loss(std::size_t d, double m0, double u0, double l0) {
  require(d >= 1, "tune_small_loss: d must be >= 1");
  require(m0 > 0.0 && u0 > 0.0, "tune_small_loss: m0 and U0 must be positive");
  require(m0 <= u0, "tune_small_loss: m0 must not exceed U0");
  require(l0 >= 0.0, "tune_small_loss: L0 must be nonnegative");
  const double b = ln_d(d) + 1.0 + std::log(u0 / m0);
  Tuning out;
  out.alpha = m0 / u0;
  out.eta = l0 > 0.0 ? std::log1p(std::sqrt(2.0 * m0 * b / l0))
                     : std::numeric_limits<double>::infinity();
  out.bound = std::sqrt(l0 * m0 * b) + b;
  return out;
}

double bound_bw(const BoundInputs& in, double m, double n, double u_sum, double u1_norm,
                std::size_t horizon) {
  check_common(in, "bound_bw");
  check_stats(m, u_sum, u1_norm, "bound_bw");
  require(n >= 0.0, "bound_bw: n must be nonnegative");
  require(in.c >= 1.0, "bound_bw: C must be >= 1");
  require(in.z_max > 0.0, "bound_bw: Z_max must be positive");
  require(m == 0.0 || in.alpha > 0.0, "bound_bw: alpha must be > 0 when m > 0");
  const double tail = std::max(0.0, u_sum - u1_norm - m);
  require(tail == 0.0 || in.alpha < 1.0, "bound_bw: alpha must be < 1");
  return n * ln_d(in.d) / in.eta +
         coef_log(n * static_cast<double>(horizon), in.c) / in.eta + in.eta * u_sum / 8.0 +
         coef_log(m, in.z_max / in.alpha) / in.eta + coef_log_share(tail, in.alpha) / in.eta;
}

double bound_bw_max_corollary(std::size_t d, std::size_t horizon, double eta, double alpha,
                              double m, double n) {
  require(eta > 0.0 && alpha > 0.0 && alpha < 1.0, "bound_bw_max_corollary: invalid eta/alpha");
  const double T = static_cast<double>(horizon);
  return n * ln_d(d) / eta + eta * T / 8.0 + m * std::log(T / alpha) / eta -
         (T - m - 1.0) * std::log1p(-alpha) / eta;
}

double bw_decay_rate(double m0, double n0, std::size_t horizon) {
  require(m0 > 0.0 && n0 > 0.0 && horizon >= 1, "bw_decay_rate: invalid arguments");
  return m0 / (n0 * static_cast<double>(horizon));
}

double bound_bw_decayed_corollary(std::size_t d, std::size_t horizon, double eta, double alpha,
                                  double m0, double n0) {
  require(eta > 0.0 && alpha > 0.0 && alpha < 1.0,
          "bound_bw_decayed_corollary: invalid eta/alpha");
  require(m0 > 0.0 && n0 > 0.0, "bound_bw_decayed_corollary: m0 and n0 must be positive");
  const double T = static_cast<double>(horizon);
  const double cap = std::min(static_cast<double>(d), n0 * T / m0);
  return n0 * ln_d(d) / eta + m0 / eta * (1.0 + std::log(cap)) + eta * T / 8.0 +
         m0 * std::log(1.0 / alpha) / eta - (T - m0 - 1.0) * std::log1p(-alpha) / eta;
}

namespace {

struct SampledSchedules {
  std::vector<double> eta;    // eta_0 .. eta_T with eta_0 = eta_1
  std::vector<double> alpha;  // alpha_0 .. alpha_T (alpha_0 unused)
};

SampledSchedules sample(const Schedule& eta, const Schedule& alpha, std::size_t horizon,
                        const char* who) {
  SampledSchedules s;
  s.eta.resize(horizon + 1);
  s.alpha.resize(horizon + 1);
  for (std::size_t t = 1; t <= horizon; ++t) {
    s.eta[t] = eta(t);
    s.alpha[t] = alpha(t);
    require(s.eta[t] > 0.0, std::string(who) + ": eta_t must be positive");
    require(s.alpha[t] >= 0.0 && s.alpha[t] <= 1.0, std::string(who) + ": alpha_t outside [0,1]");
    if (t >= 2) {
      require(s.eta[t] <= s.eta[t - 1],
              std::string(who) + ": eta schedule increases at t=" + std::to_string(t));
      require(s.alpha[t] <= s.alpha[t - 1],
              std::string(who) + ": alpha schedule increases at t=" + std::to_string(t));
    }
  }
  if (horizon >= 1) {
    s.eta[0] = s.eta[1];
    s.alpha[0] = s.alpha[1];
  }
  return s;
}

}  // namespace

double bound_time_varying(std::size_t d, const Schedule& eta, const Schedule& alpha, double m,
                          std::span<const double> u_norms) {
  require(d >= 1, "bound_time_varying: d must be >= 1");
  require(m >= 0.0, "bound_time_varying: m must be nonnegative");
  const std::size_t horizon = u_norms.size();
  if (horizon == 0) return 0.0;
  const auto s = sample(eta, alpha, horizon, "bound_time_varying");
  const double dd = static_cast<double>(d);

  double entry = u_norms[0] / s.eta[1];
  double share = 0.0;
  double variance = s.eta[0] / 8.0 * u_norms[0];
  for (std::size_t t = 2; t <= horizon; ++t) {
    const double u = u_norms[t - 1];
    entry += u * (1.0 / s.eta[t] - 1.0 / s.eta[t - 1]);
    share += coef_log_share(u, s.alpha[t]) / s.eta[t - 1];
    variance += s.eta[t - 1] / 8.0 * u;
  }
  const double a_T = s.alpha[horizon];
  const double shift = m == 0.0 ? 0.0 : m * std::log(dd * (1.0 - a_T) / a_T) / s.eta[horizon];
  return entry * std::log(dd) + shift + share + variance;
}

double bound_time_varying_adaptive(std::size_t d, std::size_t horizon, const Schedule& eta,
                                   const Schedule& alpha, std::size_t tau0) {
  require(d >= 1, "bound_time_varying_adaptive: d must be >= 1");
  require(tau0 >= 1 && tau0 <= horizon, "bound_time_varying_adaptive: tau0 outside [1, T]");
  const auto s = sample(eta, alpha, horizon, "bound_time_varying_adaptive");
  const double dd = static_cast<double>(d);
  const double log_d = std::log(dd);
  const double a_T = s.alpha[horizon];
  const double shift = std::log(dd * (1.0 - a_T) / a_T) / s.eta[horizon];

  // share_prefix[t] = sum_{k=2}^{t} ln(1/(1-alpha_k)) / eta_{k-1}
  // var_prefix[t]   = sum_{k=1}^{t} eta_{k-1} / 8
  std::vector<double> share_prefix(horizon + 1, 0.0);
  std::vector<double> var_prefix(horizon + 1, 0.0);
  for (std::size_t t = 1; t <= horizon; ++t) {
    share_prefix[t] = share_prefix[t - 1] + (t >= 2 ? coef_log_share(1.0, s.alpha[t]) / s.eta[t - 1] : 0.0);
    var_prefix[t] = var_prefix[t - 1] + s.eta[t - 1] / 8.0;
  }

  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 1; r <= horizon; ++r) {
    const std::size_t last = std::min(horizon, r + tau0 - 1);
    for (std::size_t e = r; e <= last; ++e) {
      // The entry term telescopes to 1/eta_e (r = 1) or 1/eta_e - 1/eta_{r-1}.
      double value;
      if (r == 1) {
        value = log_d / s.eta[e] + share_prefix[e] + var_prefix[e];
      } else {
        value = (1.0 / s.eta[e] - 1.0 / s.eta[r - 1]) * log_d + shift +
                (share_prefix[e] - share_prefix[r - 1]) + (var_prefix[e] - var_prefix[r - 1]);
      }
      best = std::max(best, value);
    }
  }
  return best;
}

ScheduleValue corollary7_schedules(std::size_t d, std::size_t t) {
  require(d >= 2, "corollary7_schedules: d must be >= 2");
  const double tau = static_cast<double>(std::max<std::size_t>(t, 3));
  ScheduleValue out;
  out.eta = std::sqrt(std::log(static_cast<double>(d) * tau) / tau);
  out.alpha = t == 0 ? 1.0 : 1.0 / static_cast<double>(t);
  return out;
}

TimeVarying corollary7_rule(std::size_t d) {
  corollary7_schedules(d, 1);  // validates d
  return TimeVarying{
      [d](std::size_t t) { return corollary7_schedules(d, t).eta; },
      [d](std::size_t t) { return corollary7_schedules(d, t).alpha; },
  };
}

double corollary7_bound(std::size_t d, std::size_t horizon) {
  require(d >= 2 && horizon >= 3, "corollary7_bound: needs d >= 2 and T >= 3");
  const double T = static_cast<double>(horizon);
  const double dd = static_cast<double>(d);
  return std::sqrt(2.0 * T * std::log(dd * T)) + std::sqrt(3.0 * std::log(3.0 * dd));
}

}  // namespace genshare
