#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "genshare/simplex.hpp"

namespace genshare {

/// Parameter schedule indexed by round t >= 1.
using Schedule = std::function<double(std::size_t)>;

/// p_{t+1} = alpha/d + (1 - alpha) v_{t+1}
struct FixedShare {
  double alpha = 0.0;
};

/// p_{t+1} = KL projection of v_{t+1} onto { q : q_i >= alpha/d }
struct Projected {
  double alpha = 0.0;
};

/// Mixing toward the running maximum w_{j,t} = max_{s<=t} v_{j,s}.
struct BWMax {
  double alpha = 0.0;
};

/// Mixing toward the decayed maximum w_{j,t} = max_{s<=t} e^{gamma(s-t)} v_{j,s}.
struct BWDecayed {
  double alpha = 0.0;
  double gamma = 1.0;
};

/// Fixed share with non-increasing learning-rate and share schedules.
/// The learning rate passed to the forecaster is ignored for this rule.
struct TimeVarying {
  Schedule eta;
  Schedule alpha;
};

using MixingRule = std::variant<FixedShare, Projected, BWMax, BWDecayed, TimeVarying>;

std::string rule_name(const MixingRule& rule);

/// Throws std::domain_error unless every entry is in [0,1] and the size is d.
void validate_loss(std::span<const double> loss, std::size_t d);

/// Exponential-weights loss update, computed in the log domain:
/// v_j proportional to p_j exp(-eta * loss_j).
Vector loss_update(std::span<const double> p, std::span<const double> loss, double eta);

Vector mix_fixed_share(std::span<const double> v, double alpha);

Vector mix_projected(std::span<const double> v, double alpha);

struct BWMixResult {
  Vector p;
  Vector w;   // updated auxiliary weights w_{t+1}
  double z;   // sum of w_{t+1}
};

/// Shared update toward past pre-weights. `w` holds w_t; it is first advanced
/// to w_{t+1} = max(decay * w_t, v_next) with decay = e^{-gamma} (or 1 when
/// gamma is empty) and then p = (1 - alpha) v_next + alpha w_{t+1} / Z.
BWMixResult mix_bw(std::span<const double> w, std::span<const double> v_next, double alpha,
                   std::optional<double> gamma);

struct TimeVaryingStep {
  Vector p_next;
  Vector v_next;
};

/// v_next proportional to p^{eta_t/eta_prev} exp(-eta_t loss);
/// p_next = alpha_t/d + (1 - alpha_t) v_next.
TimeVaryingStep step_time_varying(std::span<const double> p, std::span<const double> loss,
                                  double eta_t, double eta_prev, double alpha_t);

/// What happened during one round t.
struct RoundRecord {
  Vector p;              // p_t, the played weights
  Vector v_next;         // v_{t+1}
  double realized_loss;  // p_t . loss_t
  double eta;            // eta_t used by the loss update
  double eta_prev;       // eta_{t-1} (equal to eta for constant-rate rules)
  double z;              // Z_{t+1} for the BW rules, 1 otherwise
};

struct ForecasterOptions {
  /// Keep the d x (t+1) matrix of all pre-weights. Debug only.
  bool keep_history = false;
};

/// Single-owner state of the generalized share algorithm.
class Forecaster {
 public:
  Forecaster(MixingRule rule, double eta, std::size_t d, ForecasterOptions options = {});

  std::size_t dimension() const { return d_; }
  /// Index t of the next round to be played (starts at 1).
  std::size_t round() const { return t_; }
  std::span<const double> weights() const { return p_; }
  std::span<const double> pre_weights() const { return v_; }
  /// BW auxiliary weights w_t; empty for other rules.
  std::span<const double> shared_weights() const { return w_; }
  double eta() const { return eta_; }
  const MixingRule& rule() const { return rule_; }
  const std::vector<Vector>& history() const { return history_; }

  /// Plays p_t against `loss`, then applies the loss and shared updates.
  RoundRecord step(std::span<const double> loss);

 private:
  MixingRule rule_;
  double eta_;
  std::size_t d_;
  std::size_t t_ = 1;
  Vector p_;
  Vector v_;
  Vector w_;
  double eta_prev_ = 0.0;
  double alpha_prev_ = 0.0;
  ForecasterOptions options_;
  std::vector<Vector> history_;
};

struct Trajectory {
  std::size_t d = 0;
  /// p_1 .. p_{T+1}
  std::vector<Vector> p;
  /// v_2 .. v_{T+1}
  std::vector<Vector> v_next;
  /// p_t . loss_t for t = 1..T
  std::vector<double> realized;
  std::vector<double> eta;
  std::vector<double> eta_prev;
  /// Z_1 .. Z_{T+1} (all ones for non-BW rules)
  std::vector<double> z;

  std::size_t horizon() const { return realized.size(); }
};

/// Runs the forecaster over a fixed loss sequence. Throws on an empty sequence.
Trajectory run_forecaster(const MixingRule& rule, double eta, const std::vector<Vector>& losses);

/// Same, with the dimension given explicitly so that T = 0 is allowed.
Trajectory run_forecaster(const MixingRule& rule, double eta, const std::vector<Vector>& losses,
                          std::size_t d);

/// Loss source that sees the weights played at round t before choosing loss_t.
using Adversary = std::function<Vector(std::span<const double> p, std::size_t t)>;

/// Runs against an adaptive adversary; the generated losses are appended to `losses`.
Trajectory run_forecaster_online(const MixingRule& rule, double eta, std::size_t d,
                                 std::size_t horizon, const Adversary& adversary,
                                 std::vector<Vector>& losses);

// Per-round certificates. Each returns right side minus left side of the
// inequality; a valid run keeps every value >= 0 up to rounding.

/// (p - q).loss <= (1/eta) sum_i q_i ln(v_next_i / p_i) + eta/8
double exp_weights_slack(std::span<const double> p, std::span<const double> v_next,
                         std::span<const double> loss, std::span<const double> q, double eta);

/// ((1 - e^{-eta})/eta) p.loss - q.loss <= (1/eta) sum_i q_i ln(v_next_i / p_i)
double small_loss_slack(std::span<const double> p, std::span<const double> v_next,
                        std::span<const double> loss, std::span<const double> q, double eta);

/// Time-varying learning rate version:
/// (p - q).loss <= sum_i q_i ((1/eta_prev) ln(1/p_i) - (1/eta_t) ln(1/v_next_i))
///                 + (1/eta_t - 1/eta_prev) ln d + eta_prev/8
double time_varying_slack(std::span<const double> p, std::span<const double> v_next,
                          std::span<const double> loss, std::span<const double> q, double eta_t,
                          double eta_prev);

/// Checks v <= w <= 1 and c * w_next >= w (both up to `tol`).
bool bw_conditions_hold(std::span<const double> v, std::span<const double> w,
                        std::span<const double> w_next, double c, double tol = 1e-12);

}  // namespace genshare
