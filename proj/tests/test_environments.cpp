#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "genshare/environments.hpp"
#include "genshare/regret.hpp"

using namespace genshare;

TEST_CASE("seeding") {
  std::uint64_t state = 0;
  CHECK(splitmix64(state) == 0xe220a8397b1dcdafULL);
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  Rng c(1);
  for (int i = 0; i < 1000; ++i) CHECK(c.index(7) < 7);
}

TEST_CASE("iid Bernoulli losses") {
  EnvironmentSpec env{.kind = EnvironmentKind::kIidBernoulli, .d = 3, .horizon = 4000, .seed = 9,
                      .means = {0.0, 0.5, 1.0}};
  const auto losses = gen_losses(env);
  REQUIRE(losses.size() == 4000);
  double mid = 0.0;
  for (const auto& l : losses) {
    CHECK(l[0] == 0.0);
    CHECK(l[2] == 1.0);
    CHECK((l[1] == 0.0 || l[1] == 1.0));
    mid += l[1];
  }
  CHECK(std::abs(mid / 4000.0 - 0.5) < 0.05);
  CHECK(gen_losses(env) == losses);
  env.seed = 10;
  CHECK(gen_losses(env) != losses);
  env.means = {0.1, 0.2};
  CHECK_THROWS_AS(gen_losses(env), std::invalid_argument);
  env.means = {0.1, 0.2, 1.2};
  CHECK_THROWS_AS(gen_losses(env), std::invalid_argument);
}

TEST_CASE("piecewise stationary losses") {
  EnvironmentSpec env{.kind = EnvironmentKind::kPiecewiseStationary, .d = 2, .horizon = 6};
  env.segments = {{2, {1.0, 0.0}}, {4, {0.0, 1.0}}};
  const auto losses = gen_losses(env);
  CHECK(losses[1] == Vector{1.0, 0.0});
  CHECK(losses[2] == Vector{0.0, 1.0});
  env.segments[1].length = 3;
  CHECK_THROWS_AS(gen_losses(env), std::invalid_argument);

  const auto segs = best_arm_segments(3, {5, 5}, {2, 0}, 0.1, 0.9);
  CHECK(segs[0].means == Vector{0.9, 0.9, 0.1});
  CHECK(segs[1].means == Vector{0.1, 0.9, 0.9});
  CHECK_THROWS(best_arm_segments(3, {5, 5}, {3, 0}, 0.1, 0.9));
}

TEST_CASE("adversarial flip") {
  EnvironmentSpec env{.kind = EnvironmentKind::kAdversarialFlip, .d = 2, .horizon = 10, .seed = 3};
  CHECK_THROWS_AS(gen_losses(env), std::invalid_argument);
  const Adversary adv = make_adversary(env);
  CHECK(adv(Vector{0.3, 0.7}, 1) == Vector{0.0, 1.0});
  CHECK(adv(Vector{0.9, 0.1}, 2) == Vector{1.0, 0.0});
  // Ties go to a seeded random coordinate.
  const Adversary again = make_adversary(env);
  const Adversary other = make_adversary(env);
  for (std::size_t t = 1; t <= 20; ++t) CHECK(again(Vector{0.5, 0.5}, t) == other(Vector{0.5, 0.5}, t));
}

TEST_CASE("loss CSV") {
  const std::vector<Vector> losses{{0.0, 1.0, 0.125}, {0.1, 0.2, 0.30000000000000004}};
  std::stringstream buf;
  write_loss_csv(buf, losses);
  CHECK(read_loss_csv(buf) == losses);

  std::istringstream crlf("0.5,0.5\r\n1,0\r\n");
  CHECK(read_loss_csv(crlf).size() == 2);
  std::istringstream ragged("0.5,0.5\n1\n");
  CHECK_THROWS_AS(read_loss_csv(ragged), std::invalid_argument);
  std::istringstream range("0.5,1.5\n");
  CHECK_THROWS_AS(read_loss_csv(range), std::invalid_argument);
  std::istringstream junk("0.5,abc\n");
  CHECK_THROWS_AS(read_loss_csv(junk), std::invalid_argument);
  CHECK_THROWS(load_loss_csv("/nonexistent/losses.csv"));
}

TEST_CASE("comparator generators declare their statistics") {
  SUBCASE("piecewise corner") {
    ComparatorSpec c{.kind = ComparatorKind::kPiecewiseCorner, .d = 4, .horizon = 10,
                     .segment_lengths = {3, 3, 4}, .corners = {0, 2, 0}};
    const auto g = gen_comparator(c);
    const auto s = comparator_stats(g.u);
    CHECK(*g.declared_m == s.m);
    CHECK(*g.declared_n == s.n);
    CHECK(*g.declared_u1 == s.u1_norm);
    CHECK(s.m == 2.0);
    CHECK(s.n == 2.0);
  }
  SUBCASE("adaptive window") {
    ComparatorSpec c{.kind = ComparatorKind::kAdaptiveWindow, .d = 3, .horizon = 10, .first = 4,
                     .last = 6, .corner = 1};
    const auto g = gen_comparator(c);
    const auto s = comparator_stats(g.u);
    CHECK(s.u_sum == 3.0);
    CHECK(s.m == 1.0);
    CHECK(s.u1_norm == 0.0);
    CHECK(*g.declared_m == s.m);
    c.last = 11;
    CHECK_THROWS(gen_comparator(c));
  }
  SUBCASE("discounted") {
    ComparatorSpec c{.kind = ComparatorKind::kDiscounted, .d = 2, .horizon = 5, .corner = 1,
                     .schedule = linear_ramp(5, false)};
    const auto g = gen_comparator(c);
    const auto s = comparator_stats(g.u);
    CHECK(s.u1_norm + s.m == doctest::Approx(discount_regularity(c.schedule.betas)));
    CHECK(*g.declared_m == doctest::Approx(s.m));
  }
  SUBCASE("scaled arbitrary") {
    ComparatorSpec c{.kind = ComparatorKind::kScaledArbitrary, .d = 5, .horizon = 50, .seed = 4};
    const auto g = gen_comparator(c);
    CHECK_FALSE(g.declared_m.has_value());
    for (const auto& u : g.u) {
      double norm = 0.0;
      for (double x : u) {
        CHECK(x >= 0.0);
        norm += x;
      }
      CHECK(norm <= 1.0 + 1e-12);
    }
    CHECK(gen_comparator(c).u == g.u);
  }
}

TEST_CASE("piecewise best comparator follows the lowest mean") {
  EnvironmentSpec env{.kind = EnvironmentKind::kPiecewiseStationary, .d = 3, .horizon = 9};
  env.segments = best_arm_segments(3, {3, 3, 3}, {1, 2, 1}, 0.2, 0.8);
  const auto c = piecewise_best_comparator(env);
  CHECK(c.corners == std::vector<std::size_t>{1, 2, 1});
  EnvironmentSpec adv{.kind = EnvironmentKind::kAdversarialFlip, .d = 2, .horizon = 5};
  CHECK_THROWS(piecewise_best_comparator(adv));
}
