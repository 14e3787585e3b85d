#include "genshare/forecasters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace genshare {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_alpha(double alpha, const char* who) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::domain_error(std::string(who) + ": alpha outside [0,1]");
  }
}

void check_eta(double eta, const char* who) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw std::domain_error(std::string(who) + ": learning rate must be positive");
  }
}

// Exponentiates log-weights after subtracting their maximum, then normalizes.
Vector softmax(Vector logw) {
  double top = -std::numeric_limits<double>::infinity();
  for (double x : logw) top = std::max(top, x);
  if (!std::isfinite(top)) throw std::domain_error("loss update: all weights vanished");
  for (double& x : logw) x = std::exp(x - top);
  normalize(logw);
  return logw;
}

void validate_rule(const MixingRule& rule) {
  std::visit(Overloaded{
                 [](const FixedShare& r) { check_alpha(r.alpha, "FixedShare"); },
                 [](const Projected& r) { check_alpha(r.alpha, "Projected"); },
                 [](const BWMax& r) { check_alpha(r.alpha, "BWMax"); },
                 [](const BWDecayed& r) {
                   check_alpha(r.alpha, "BWDecayed");
                   if (!(r.gamma > 0.0)) throw std::domain_error("BWDecayed: gamma must be > 0");
                 },
                 [](const TimeVarying& r) {
                   if (!r.eta || !r.alpha) {
                     throw std::invalid_argument("TimeVarying: both schedules are required");
                   }
                 },
             },
             rule);
}

double log_ratio(double num, double den) { return std::log(num) - std::log(den); }

}  // namespace

std::string rule_name(const MixingRule& rule) {
  return std::visit(Overloaded{
                        [](const FixedShare&) { return std::string("fixed_share"); },
                        [](const Projected&) { return std::string("projected"); },
                        [](const BWMax&) { return std::string("bw_max"); },
                        [](const BWDecayed&) { return std::string("bw_decayed"); },
                        [](const TimeVarying&) { return std::string("time_varying"); },
                    },
                    rule);
}

void validate_loss(std::span<const double> loss, std::size_t d) {
  if (loss.size() != d) {
    throw std::invalid_argument("loss vector has dimension " + std::to_string(loss.size()) +
                                ", expected " + std::to_string(d));
  }
  for (std::size_t j = 0; j < d; ++j) {
    if (!(loss[j] >= 0.0 && loss[j] <= 1.0)) {
      throw std::domain_error("loss entry " + std::to_string(j) + " outside [0,1]");
    }
  }
}

Vector loss_update(std::span<const double> p, std::span<const double> loss, double eta) {
  check_eta(eta, "loss_update");
  validate_loss(loss, p.size());
  Vector logw(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) logw[j] = std::log(p[j]) - eta * loss[j];
  return softmax(std::move(logw));
}

Vector mix_fixed_share(std::span<const double> v, double alpha) {
  check_alpha(alpha, "mix_fixed_share");
  const double share = alpha / static_cast<double>(v.size());
  Vector p(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) p[j] = share + (1.0 - alpha) * v[j];
  return p;
}

Vector mix_projected(std::span<const double> v, double alpha) {
  return kl_project_clipped(v, alpha);
}

BWMixResult mix_bw(std::span<const double> w, std::span<const double> v_next, double alpha,
                   std::optional<double> gamma) {
  check_alpha(alpha, "mix_bw");
  if (w.size() != v_next.size()) throw std::invalid_argument("mix_bw: dimension mismatch");
  if (gamma && !(*gamma > 0.0)) throw std::domain_error("mix_bw: gamma must be > 0");
  const double decay = gamma ? std::exp(-*gamma) : 1.0;

  BWMixResult out{Vector(w.size()), Vector(w.size()), 0.0};
  for (std::size_t j = 0; j < w.size(); ++j) {
    out.w[j] = std::max(decay * w[j], v_next[j]);
    out.z += out.w[j];
  }
  for (std::size_t j = 0; j < w.size(); ++j) {
    out.p[j] = (1.0 - alpha) * v_next[j] + alpha * out.w[j] / out.z;
  }
  return out;
}

TimeVaryingStep step_time_varying(std::span<const double> p, std::span<const double> loss,
                                  double eta_t, double eta_prev, double alpha_t) {
  check_eta(eta_t, "step_time_varying");
  check_eta(eta_prev, "step_time_varying");
  check_alpha(alpha_t, "step_time_varying");
  if (eta_t > eta_prev) {
    throw std::domain_error("step_time_varying: learning rate increased (eta_t > eta_{t-1})");
  }
  validate_loss(loss, p.size());
  const double power = eta_t / eta_prev;
  Vector logw(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) logw[j] = power * std::log(p[j]) - eta_t * loss[j];
  TimeVaryingStep out;
  out.v_next = softmax(std::move(logw));
  out.p_next = mix_fixed_share(out.v_next, alpha_t);
  return out;
}

Forecaster::Forecaster(MixingRule rule, double eta, std::size_t d, ForecasterOptions options)
    : rule_(std::move(rule)), eta_(eta), d_(d), options_(options) {
  if (d == 0) throw std::invalid_argument("Forecaster: dimension must be positive");
  validate_rule(rule_);
  if (std::holds_alternative<TimeVarying>(rule_)) {
    eta_ = std::get<TimeVarying>(rule_).eta(1);
  }
  check_eta(eta_, "Forecaster");
  eta_prev_ = eta_;
  p_ = uniform(d);
  v_ = p_;
  if (std::holds_alternative<BWMax>(rule_) || std::holds_alternative<BWDecayed>(rule_)) w_ = v_;
  if (options_.keep_history) history_.push_back(v_);
}

RoundRecord Forecaster::step(std::span<const double> loss) {
  validate_loss(loss, d_);
  RoundRecord rec;
  rec.p = p_;
  rec.realized_loss = dot(p_, loss);
  rec.z = 1.0;

  std::visit(Overloaded{
                 [&](const FixedShare& r) {
                   rec.eta = rec.eta_prev = eta_;
                   rec.v_next = loss_update(p_, loss, eta_);
                   p_ = mix_fixed_share(rec.v_next, r.alpha);
                 },
                 [&](const Projected& r) {
                   rec.eta = rec.eta_prev = eta_;
                   rec.v_next = loss_update(p_, loss, eta_);
                   p_ = mix_projected(rec.v_next, r.alpha);
                 },
                 [&](const BWMax& r) {
                   rec.eta = rec.eta_prev = eta_;
                   rec.v_next = loss_update(p_, loss, eta_);
                   auto mixed = mix_bw(w_, rec.v_next, r.alpha, std::nullopt);
                   p_ = std::move(mixed.p);
                   w_ = std::move(mixed.w);
                   rec.z = mixed.z;
                 },
                 [&](const BWDecayed& r) {
                   rec.eta = rec.eta_prev = eta_;
                   rec.v_next = loss_update(p_, loss, eta_);
                   auto mixed = mix_bw(w_, rec.v_next, r.alpha, r.gamma);
                   p_ = std::move(mixed.p);
                   w_ = std::move(mixed.w);
                   rec.z = mixed.z;
                 },
                 [&](const TimeVarying& r) {
                   // eta_0 = eta_1 by convention
                   const double eta_t = r.eta(t_);
                   const double eta_prev = t_ == 1 ? eta_t : eta_prev_;
                   const double alpha_t = r.alpha(t_);
                   if (t_ > 1 && alpha_t > alpha_prev_) {
                     throw std::domain_error("TimeVarying: share schedule increased at round " +
                                             std::to_string(t_));
                   }
                   auto next = step_time_varying(p_, loss, eta_t, eta_prev, alpha_t);
                   rec.eta = eta_t;
                   rec.eta_prev = eta_prev;
                   rec.v_next = std::move(next.v_next);
                   p_ = std::move(next.p_next);
                   eta_prev_ = eta_t;
                   alpha_prev_ = alpha_t;
                   eta_ = eta_t;
                 },
             },
             rule_);

  v_ = rec.v_next;
  if (options_.keep_history) history_.push_back(v_);
  ++t_;
  return rec;
}

Trajectory run_forecaster(const MixingRule& rule, double eta, const std::vector<Vector>& losses) {
  if (losses.empty()) throw std::invalid_argument("run_forecaster: empty loss sequence");
  return run_forecaster(rule, eta, losses, losses.front().size());
}

namespace {

void record(Trajectory& traj, RoundRecord rec, std::span<const double> p_next) {
  traj.realized.push_back(rec.realized_loss);
  traj.eta.push_back(rec.eta);
  traj.eta_prev.push_back(rec.eta_prev);
  traj.z.push_back(rec.z);
  traj.v_next.push_back(std::move(rec.v_next));
  traj.p.emplace_back(p_next.begin(), p_next.end());
}

}  // namespace

Trajectory run_forecaster(const MixingRule& rule, double eta, const std::vector<Vector>& losses,
                          std::size_t d) {
  Forecaster f(rule, eta, d);
  Trajectory traj;
  traj.d = d;
  traj.p.push_back(uniform(d));
  traj.z.push_back(1.0);
  for (std::size_t t = 0; t < losses.size(); ++t) {
    if (losses[t].size() != d) {
      throw std::invalid_argument("run_forecaster: loss vector at round " + std::to_string(t + 1) +
                                  " has dimension " + std::to_string(losses[t].size()) +
                                  ", expected " + std::to_string(d));
    }
    RoundRecord rec = f.step(losses[t]);
    record(traj, std::move(rec), f.weights());
  }
  return traj;
}

Trajectory run_forecaster_online(const MixingRule& rule, double eta, std::size_t d,
                                 std::size_t horizon, const Adversary& adversary,
                                 std::vector<Vector>& losses) {
  Forecaster f(rule, eta, d);
  Trajectory traj;
  traj.d = d;
  traj.p.push_back(uniform(d));
  traj.z.push_back(1.0);
  for (std::size_t t = 1; t <= horizon; ++t) {
    losses.push_back(adversary(f.weights(), t));
    RoundRecord rec = f.step(losses.back());
    record(traj, std::move(rec), f.weights());
  }
  return traj;
}

double exp_weights_slack(std::span<const double> p, std::span<const double> v_next,
                         std::span<const double> loss, std::span<const double> q, double eta) {
  double lhs = dot(p, loss) - dot(q, loss);
  double rhs = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] > 0.0) rhs += q[i] * log_ratio(v_next[i], p[i]);
  }
  rhs = rhs / eta + eta / 8.0;
  return rhs - lhs;
}

double small_loss_slack(std::span<const double> p, std::span<const double> v_next,
                        std::span<const double> loss, std::span<const double> q, double eta) {
  double lhs = -std::expm1(-eta) / eta * dot(p, loss) - dot(q, loss);
  double rhs = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] > 0.0) rhs += q[i] * log_ratio(v_next[i], p[i]);
  }
  return rhs / eta - lhs;
}

double time_varying_slack(std::span<const double> p, std::span<const double> v_next,
                          std::span<const double> loss, std::span<const double> q, double eta_t,
                          double eta_prev) {
  double lhs = dot(p, loss) - dot(q, loss);
  double rhs = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] > 0.0) rhs += q[i] * (-std::log(p[i]) / eta_prev + std::log(v_next[i]) / eta_t);
  }
  rhs += (1.0 / eta_t - 1.0 / eta_prev) * std::log(static_cast<double>(p.size())) + eta_prev / 8.0;
  return rhs - lhs;
}

bool bw_conditions_hold(std::span<const double> v, std::span<const double> w,
                        std::span<const double> w_next, double c, double tol) {
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (v[j] > w[j] + tol || w[j] > 1.0 + tol) return false;
    if (c * w_next[j] < w[j] - tol) return false;
  }
  return true;
}

}  // namespace genshare
