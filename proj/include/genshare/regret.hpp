#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "genshare/simplex.hpp"

namespace genshare {

/// Sequence u_1..u_T of nonnegative comparison vectors.
using ComparatorSequence = std::vector<Vector>;

/// m(u) = sum_{t>=2} total_variation(u_t, u_{t-1})
double regularity_m(const ComparatorSequence& u);

/// n(u) = sum_i max_t u_{i,t}
double sparsity_n(const ComparatorSequence& u);

/// Summary statistics of a comparator sequence that enter the regret bounds.
struct ComparatorStats {
  double u1_norm = 0.0;  // ||u_1||_1
  double m = 0.0;
  double n = 0.0;
  double u_sum = 0.0;    // sum_t ||u_t||_1
  Vector norms;          // ||u_t||_1 for t = 1..T
};

ComparatorStats comparator_stats(const ComparatorSequence& u);

/// sum_t ||u_t||_1 p_t.loss_t - sum_t u_t.loss_t, with compensated summation.
/// `realized` holds p_t.loss_t for t = 1..T.
double generalized_shifting_regret(std::span<const double> realized,
                                   const std::vector<Vector>& losses, const ComparatorSequence& u);

/// sum_t u_t.loss_t
double comparator_loss(const std::vector<Vector>& losses, const ComparatorSequence& u);

struct AdaptiveRegret {
  double value = 0.0;
  std::size_t first = 1;   // r
  std::size_t last = 1;    // s
  std::size_t corner = 0;  // best fixed expert on [r, s]
};

/// max over windows [r,s] with s + 1 - r <= tau0 of the window regret against
/// the best fixed corner. Each start r accumulates window sums forward, so the
/// cost is O(T tau0 d).
AdaptiveRegret adaptive_regret(std::span<const double> realized, const std::vector<Vector>& losses,
                               std::size_t tau0);

enum class Monotonicity { kNone, kNondecreasing, kNonincreasing };

struct DiscountSchedule {
  Vector betas;
  Monotonicity monotone = Monotonicity::kNone;
};

/// Validates entries in [0,1] and the declared monotonicity.
void validate_schedule(const DiscountSchedule& sched);

/// beta_t = t/T (increasing) or (T + 1 - t)/T (decreasing).
DiscountSchedule linear_ramp(std::size_t horizon, bool increasing);

struct DiscountedRegret {
  double value = 0.0;
  std::size_t corner = 0;
  double comparator_loss = 0.0;  // sum_t beta_t loss_{corner,t}
};

/// max_q sum_t beta_t (p_t.loss_t - q.loss_t); the maximizer is a corner.
DiscountedRegret discounted_regret(std::span<const double> realized,
                                   const std::vector<Vector>& losses,
                                   const DiscountSchedule& sched);

/// ||beta_1 q||_1 + m((beta_t q)_t) for any corner q, i.e.
/// beta_1 + sum_{t>=2} (beta_t - beta_{t-1})_+.
double discount_regularity(std::span<const double> betas);

/// max{beta_1, beta_T}; equals discount_regularity for monotone schedules.
double monotone_discount_regularity(std::span<const double> betas);

}  // namespace genshare
