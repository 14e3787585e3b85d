#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "genshare/convex.hpp"
#include "genshare/regret.hpp"
#include "test_support.hpp"

using namespace genshare;
using genshare::testing::random_distribution;
using genshare::testing::random_losses;

namespace {

// f(p) = ||p - target||^2 / 4 has gradient (p - target)/2 in [-1/2, 1/2]; the
// oracle adds 1/2 to every coordinate, which changes neither the forecaster
// nor (||u|| p - u).g.
ConvexLoss quadratic(Vector target) {
  ConvexLoss loss;
  loss.value = [target](std::span<const double> p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += (p[i] - target[i]) * (p[i] - target[i]);
    return 0.25 * acc;
  };
  loss.subgradient = [target](std::span<const double> p) {
    Vector g(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) g[i] = 0.5 * (p[i] - target[i] + 1.0);
    return g;
  };
  return loss;
}

ConvexLoss linear(Vector l) {
  return {[l](std::span<const double> p) { return dot(p, l); },
          [l](std::span<const double>) { return l; }};
}

}  // namespace

TEST_CASE("linear losses reproduce the plain run") {
  Rng rng(8);
  std::vector<Vector> losses;
  for (int t = 0; t < 50; ++t) losses.push_back(random_losses(rng, 4));
  const auto plain = run_forecaster(FixedShare{0.05}, 1.2, losses);
  Forecaster f(FixedShare{0.05}, 1.2, 4);
  for (std::size_t t = 0; t < losses.size(); ++t) {
    const auto step = step_convex(f, linear(losses[t]));
    CHECK(step.realized_loss == doctest::Approx(plain.realized[t]).epsilon(1e-15));
  }
}

TEST_CASE("constant loss leaves the weights uniform") {
  Forecaster f(Projected{0.1}, 2.0, 3);
  const ConvexLoss flat{[](std::span<const double>) { return 0.7; },
                        [](std::span<const double> p) { return Vector(p.size(), 0.0); }};
  for (int t = 0; t < 10; ++t) step_convex(f, flat);
  for (double x : f.weights()) CHECK(x == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("subgradient oracle matches finite differences") {
  Rng rng(12);
  const auto loss = quadratic({0.7, 0.2, 0.1});
  for (int trial = 0; trial < 100; ++trial) {
    const Vector p = random_distribution(rng, 3);
    const Vector g = loss.subgradient(p);
    const double h = 1e-6;
    for (std::size_t i = 0; i < 3; ++i) {
      Vector up = p, down = p;
      up[i] += h;
      down[i] -= h;
      const double fd = (loss.value(up) - loss.value(down)) / (2.0 * h);
      CHECK(std::abs(fd - (g[i] - 0.5)) < 1e-7);
    }
  }
}

TEST_CASE("linearized loss dominates the convex loss") {
  Rng rng(14);
  const auto loss = quadratic({0.1, 0.1, 0.8});
  Forecaster f(FixedShare{0.02}, 1.0, 3);
  for (int t = 0; t < 100; ++t) {
    const Vector p(f.weights().begin(), f.weights().end());
    const auto step = step_convex(f, loss);
    Vector u = random_distribution(rng, 3);
    const double scale = rng.uniform();
    for (auto& x : u) x *= scale;
    CHECK(domination_slack(p, step.subgradient, loss, u) >= -1e-12);
  }
  CHECK(domination_slack(Vector{0.5, 0.5}, Vector{0.1, 0.2}, quadratic({0.5, 0.5}),
                         Vector{0.0, 0.0}) == 0.0);
}

TEST_CASE("out-of-range subgradients are rejected") {
  Forecaster f(FixedShare{0.1}, 1.0, 2);
  const ConvexLoss bad{[](std::span<const double>) { return 0.0; },
                       [](std::span<const double>) { return Vector{1.5, 0.0}; }};
  CHECK_THROWS_AS(step_convex(f, bad), std::domain_error);
  CHECK(f.round() == 1);
}
