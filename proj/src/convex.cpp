#include "genshare/convex.hpp"

#include <stdexcept>

namespace genshare {

ConvexStep step_convex(Forecaster& forecaster, const ConvexLoss& loss) {
  const Vector p(forecaster.weights().begin(), forecaster.weights().end());
  ConvexStep out;
  out.realized_loss = loss.value(p);
  out.subgradient = loss.subgradient(p);
  if (out.subgradient.size() != p.size()) {
    throw std::invalid_argument("step_convex: subgradient has wrong dimension");
  }
  for (double g : out.subgradient) {
    if (!(g >= 0.0 && g <= 1.0)) {
      throw std::domain_error("step_convex: subgradient entry outside [0,1]; rescale the loss");
    }
  }
  out.round = forecaster.step(out.subgradient);
  return out;
}

double domination_slack(std::span<const double> p, std::span<const double> g,
                        const ConvexLoss& loss, std::span<const double> u) {
  const double norm = l1_norm(u);
  if (norm == 0.0) return 0.0;
  Vector q(u.begin(), u.end());
  for (double& x : q) x /= norm;
  double linear = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) linear += (norm * p[i] - u[i]) * g[i];
  return linear - norm * (loss.value(p) - loss.value(q));
}

}  // namespace genshare
