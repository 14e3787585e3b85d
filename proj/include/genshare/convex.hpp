#pragma once

#include <functional>
#include <span>

#include "genshare/forecasters.hpp"

namespace genshare {

/// Convex loss on the simplex with a subgradient oracle. The oracle must
/// already return entries in [0,1]; any affine rescaling is the caller's job,
/// since it changes the effective learning rate.
struct ConvexLoss {
  std::function<double(std::span<const double>)> value;
  std::function<Vector(std::span<const double>)> subgradient;
};

struct ConvexStep {
  double realized_loss = 0.0;  // loss(p_t)
  Vector subgradient;          // g_t, fed to the forecaster as the loss vector
  RoundRecord round;
};

/// Plays p_t, queries g_t in the subdifferential at p_t and advances the
/// forecaster with g_t. Throws std::domain_error if g_t leaves [0,1]^d.
ConvexStep step_convex(Forecaster& forecaster, const ConvexLoss& loss);

/// (||u|| p - u).g - ||u|| (loss(p) - loss(u/||u||)); nonnegative by convexity.
/// Zero for u = 0.
double domination_slack(std::span<const double> p, std::span<const double> g,
                        const ConvexLoss& loss, std::span<const double> u);

}  // namespace genshare
