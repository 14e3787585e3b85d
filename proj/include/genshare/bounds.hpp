#pragma once

#include <cstddef>
#include <span>

#include "genshare/forecasters.hpp"

namespace genshare {

/// Forecaster parameters that enter a regret bound.
struct BoundInputs {
  std::size_t d = 2;
  double eta = 1.0;
  double alpha = 0.0;
  /// Growth constant C >= 1 with C w_{t+1} >= w_t (BW rules).
  double c = 1.0;
  /// Upper bound on the BW normalizer Z_t.
  double z_max = 1.0;
};

/// Projection onto the clipped simplex:
/// u1 ln d / eta + m ln(d/alpha) / eta + (eta/8 + alpha) U.
double bound_projected(const BoundInputs& in, double m, double u_sum, double u1_norm);

/// Fixed share:
/// u1 ln d / eta + eta U / 8 + m ln(d/alpha) / eta + (U - u1 - m) ln(1/(1-alpha)) / eta.
double bound_fixed_share(const BoundInputs& in, double m, double u_sum, double u1_norm);

struct Tuning {
  double eta = 0.0;
  double alpha = 0.0;
  double bound = 0.0;
};

/// Parameters minimizing the fixed-share bound over all comparators with
/// ||u_1|| + m <= m0 and sum ||u_t|| <= U0:
/// alpha = m0/U0, B = m0 ln d + U0 h(m0/U0), eta = sqrt(8B/U0), bound = sqrt(U0 B / 2).
Tuning tune_fixed_share(std::size_t d, double m0, double u0);

/// sqrt(U0 m0 / 2 (ln d + ln(e U0 / m0))), the entropy-free relaxation of tune_fixed_share.
double fixed_share_relaxed_bound(std::size_t d, double m0, double u0);

struct AdaptiveBound {
  double exact = 0.0;    // sqrt(tau0/2 (tau0 h(1/tau0) + ln d))
  double relaxed = 0.0;  // sqrt(tau0/2 ln(e d tau0))
};

AdaptiveBound bound_adaptive(std::size_t d, std::size_t tau0);

/// Small-loss tuning. The returned bound is sqrt(L0 m0 B') + B' with
/// B' = ln d + ln(e U0/m0); eta = ln(1 + sqrt(2 m0 B' / L0)), alpha = m0/U0.
/// For L0 = 0 the learning rate is +infinity.
Tuning tune_small_loss(std::size_t d, double m0, double u0, double l0);

/// Mixing toward past pre-weights:
/// n ln d / eta + n T ln C / eta + eta U / 8 + m ln(Zmax/alpha) / eta
///   + (U - u1 - m) ln(1/(1-alpha)) / eta.
double bound_bw(const BoundInputs& in, double m, double n, double u_sum, double u1_norm,
                std::size_t horizon);

/// Running-max weights against distribution comparators (C = 1, Z_t <= T).
double bound_bw_max_corollary(std::size_t d, std::size_t horizon, double eta, double alpha,
                              double m, double n);

/// gamma = m0 / (n0 T), the decay that balances n0 T gamma against m0 ln(1/gamma).
double bw_decay_rate(double m0, double n0, std::size_t horizon);

/// Decayed-max weights with gamma = bw_decay_rate(m0, n0, T):
/// n0 ln d / eta + m0 (1 + ln min{d, n0 T / m0}) / eta + eta T / 8
///   + m0 ln(1/alpha) / eta + (T - m0 - 1) ln(1/(1-alpha)) / eta.
double bound_bw_decayed_corollary(std::size_t d, std::size_t horizon, double eta, double alpha,
                                  double m0, double n0);

/// Time-varying parameters, eta_0 = eta_1:
///   (u_1/eta_1 + sum_{t>=2} u_t (1/eta_t - 1/eta_{t-1})) ln d
///   + m ln(d (1 - alpha_T) / alpha_T) / eta_T
///   + sum_{t>=2} u_t ln(1/(1 - alpha_t)) / eta_{t-1}
///   + sum_{t>=1} eta_{t-1} u_t / 8.
/// `u_norms` holds ||u_t||_1 for t = 1..T. Throws if a schedule increases.
double bound_time_varying(std::size_t d, const Schedule& eta, const Schedule& alpha, double m,
                          std::span<const double> u_norms);

/// Largest time-varying bound over the window comparators u_t = q on [r, s]
/// (zero elsewhere) with s + 1 - r <= tau0.
double bound_time_varying_adaptive(std::size_t d, std::size_t horizon, const Schedule& eta,
                                   const Schedule& alpha, std::size_t tau0);

struct ScheduleValue {
  double eta = 0.0;
  double alpha = 0.0;
};

/// eta_t = sqrt(ln(d t) / t) for t >= 3 with eta_0 = eta_1 = eta_2 = eta_3,
/// alpha_t = 1/t (alpha_0 is reported as 1).
ScheduleValue corollary7_schedules(std::size_t d, std::size_t t);

/// The schedules above packaged for a TimeVarying rule.
TimeVarying corollary7_rule(std::size_t d);

/// sqrt(2 T ln(d T)) + sqrt(3 ln(3 d)), valid for T >= 3.
double corollary7_bound(std::size_t d, std::size_t horizon);

}  // namespace genshare
