#include "genshare/regret.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace genshare {

namespace {

std::size_t common_dimension(const ComparatorSequence& u) {
  if (u.empty()) throw std::invalid_argument("comparator sequence is empty");
  const std::size_t d = u.front().size();
  for (std::size_t t = 0; t < u.size(); ++t) {
    if (u[t].size() != d) {
      throw std::invalid_argument("comparator vector at round " + std::to_string(t + 1) +
                                  " has dimension " + std::to_string(u[t].size()) +
                                  ", expected " + std::to_string(d));
    }
  }
  return d;
}

void check_lengths(std::size_t realized, std::size_t losses, const char* who) {
  if (realized != losses) {
    throw std::invalid_argument(std::string(who) + ": trajectory has " + std::to_string(realized) +
                                " rounds but there are " + std::to_string(losses) +
                                " loss vectors");
  }
}

}  // namespace

double regularity_m(const ComparatorSequence& u) {
  common_dimension(u);
  double m = 0.0;
  for (std::size_t t = 1; t < u.size(); ++t) m += total_variation(u[t], u[t - 1]);
  return m;
}

double sparsity_n(const ComparatorSequence& u) {
  const std::size_t d = common_dimension(u);
  double n = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double top = 0.0;
    for (const auto& ut : u) top = std::max(top, ut[i]);
    n += top;
  }
  return n;
}

ComparatorStats comparator_stats(const ComparatorSequence& u) {
  ComparatorStats s;
  s.m = regularity_m(u);
  s.n = sparsity_n(u);
  s.norms.reserve(u.size());
  CompensatedSum total;
  for (const auto& ut : u) {
    s.norms.push_back(l1_norm(ut));
    total.add(s.norms.back());
  }
  s.u1_norm = s.norms.front();
  s.u_sum = total.value();
  return s;
}

double generalized_shifting_regret(std::span<const double> realized,
                                   const std::vector<Vector>& losses, const ComparatorSequence& u) {
  check_lengths(realized.size(), losses.size(), "generalized_shifting_regret");
  if (u.size() != losses.size()) {
    throw std::invalid_argument("generalized_shifting_regret: comparator length " +
                                std::to_string(u.size()) + " differs from horizon " +
                                std::to_string(losses.size()));
  }
  CompensatedSum acc;
  for (std::size_t t = 0; t < losses.size(); ++t) {
    const double norm = l1_norm(u[t]);
    if (norm == 0.0) continue;
    acc.add(norm * realized[t]);
    acc.add(-dot(u[t], losses[t]));
  }
  return acc.value();
}

double comparator_loss(const std::vector<Vector>& losses, const ComparatorSequence& u) {
  if (u.size() != losses.size()) {
    throw std::invalid_argument("comparator_loss: length mismatch");
  }
  CompensatedSum acc;
  for (std::size_t t = 0; t < losses.size(); ++t) acc.add(dot(u[t], losses[t]));
  return acc.value();
}

AdaptiveRegret adaptive_regret(std::span<const double> realized, const std::vector<Vector>& losses,
                               std::size_t tau0) {
  check_lengths(realized.size(), losses.size(), "adaptive_regret");
  const std::size_t horizon = losses.size();
  if (tau0 < 1 || tau0 > horizon) {
    throw std::out_of_range("adaptive_regret: tau0 must lie in [1, T]");
  }
  const std::size_t d = losses.front().size();

  AdaptiveRegret best;
  best.value = -std::numeric_limits<double>::infinity();
  Vector expert(d);
  for (std::size_t r = 0; r < horizon; ++r) {
    std::fill(expert.begin(), expert.end(), 0.0);
    double forecaster = 0.0;
    const std::size_t end = std::min(horizon, r + tau0);
    for (std::size_t s = r; s < end; ++s) {
      forecaster += realized[s];
      std::size_t arg = 0;
      for (std::size_t i = 0; i < d; ++i) {
        expert[i] += losses[s][i];
        if (expert[i] < expert[arg]) arg = i;
      }
      const double regret = forecaster - expert[arg];
      if (regret > best.value) best = {regret, r + 1, s + 1, arg};
    }
  }
  return best;
}

void validate_schedule(const DiscountSchedule& sched) {
  const auto& b = sched.betas;
  for (std::size_t t = 0; t < b.size(); ++t) {
    if (!(b[t] >= 0.0 && b[t] <= 1.0)) {
      throw std::domain_error("discount beta_" + std::to_string(t + 1) + " outside [0,1]");
    }
    if (t == 0) continue;
    if (sched.monotone == Monotonicity::kNondecreasing && b[t] < b[t - 1]) {
      throw std::domain_error("discount schedule declared nondecreasing decreases at round " +
                              std::to_string(t + 1));
    }
    if (sched.monotone == Monotonicity::kNonincreasing && b[t] > b[t - 1]) {
      throw std::domain_error("discount schedule declared nonincreasing increases at round " +
                              std::to_string(t + 1));
    }
  }
}

DiscountSchedule linear_ramp(std::size_t horizon, bool increasing) {
  DiscountSchedule s;
  s.monotone = increasing ? Monotonicity::kNondecreasing : Monotonicity::kNonincreasing;
  s.betas.resize(horizon);
  const double T = static_cast<double>(horizon);
  for (std::size_t t = 1; t <= horizon; ++t) {
    s.betas[t - 1] = increasing ? static_cast<double>(t) / T : (T + 1.0 - static_cast<double>(t)) / T;
  }
  return s;
}

DiscountedRegret discounted_regret(std::span<const double> realized,
                                   const std::vector<Vector>& losses,
                                   const DiscountSchedule& sched) {
  check_lengths(realized.size(), losses.size(), "discounted_regret");
  if (sched.betas.size() != losses.size()) {
    throw std::invalid_argument("discounted_regret: schedule length " +
                                std::to_string(sched.betas.size()) + " differs from horizon " +
                                std::to_string(losses.size()));
  }
  validate_schedule(sched);
  if (losses.empty()) return {};
  const std::size_t d = losses.front().size();

  DiscountedRegret best;
  best.value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d; ++i) {
    CompensatedSum regret;
    CompensatedSum expert;
    for (std::size_t t = 0; t < losses.size(); ++t) {
      const double beta = sched.betas[t];
      if (beta == 0.0) continue;
      regret.add(beta * realized[t]);
      regret.add(-beta * losses[t][i]);
      expert.add(beta * losses[t][i]);
    }
    if (regret.value() > best.value) best = {regret.value(), i, expert.value()};
  }
  return best;
}

double discount_regularity(std::span<const double> betas) {
  if (betas.empty()) return 0.0;
  double total = betas[0];
  for (std::size_t t = 1; t < betas.size(); ++t) total += std::max(0.0, betas[t] - betas[t - 1]);
  return total;
}

double monotone_discount_regularity(std::span<const double> betas) {
  if (betas.empty()) return 0.0;
  return std::max(betas.front(), betas.back());
}

}  // namespace genshare
