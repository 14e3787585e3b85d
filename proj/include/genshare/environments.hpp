#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "genshare/forecasters.hpp"
#include "genshare/regret.hpp"

namespace genshare {

// Random source: std::mt19937_64 (its output sequence is fixed by the C++
// standard) seeded per stream through SplitMix64. Uniform draws use the top
// 53 bits directly instead of std::uniform_real_distribution, whose output is
// implementation-defined.

/// One SplitMix64 step: advances `state` and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state);

/// Independent seed for stream `stream` of a run seeded with `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [0, 1).
  double uniform();
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

enum class EnvironmentKind { kIidBernoulli, kPiecewiseStationary, kAdversarialFlip, kFromFile };

struct Segment {
  std::size_t length = 0;
  Vector means;
};

struct EnvironmentSpec {
  EnvironmentKind kind = EnvironmentKind::kIidBernoulli;
  std::size_t d = 2;
  std::size_t horizon = 1;
  std::uint64_t seed = 0;
  /// Per-arm Bernoulli means (iid_bernoulli).
  Vector means;
  /// Consecutive stationary segments (piecewise_stationary); lengths sum to T.
  std::vector<Segment> segments;
  /// Loss CSV (from_file).
  std::string path;
};

/// Throws std::invalid_argument describing the first bad field.
void validate(const EnvironmentSpec& spec);

/// Pre-generated loss sequence. Not available for adversarial_flip, which
/// depends on the forecaster's weights; use make_adversary instead.
std::vector<Vector> gen_losses(const EnvironmentSpec& spec);

/// Loss 1 on the heaviest coordinate of p_t and 0 elsewhere. Ties are broken
/// uniformly at random from the spec's seed.
Adversary make_adversary(const EnvironmentSpec& spec);

/// Segments of length `lengths[k]` in which arm `best[k]` has mean `low`
/// and every other arm has mean `high`.
std::vector<Segment> best_arm_segments(std::size_t d, const std::vector<std::size_t>& lengths,
                                       const std::vector<std::size_t>& best, double low,
                                       double high);

/// CSV: one row per round, d comma-separated reals in [0,1], no header.
std::vector<Vector> read_loss_csv(std::istream& in);
std::vector<Vector> load_loss_csv(const std::string& path);
void write_loss_csv(std::ostream& out, const std::vector<Vector>& losses);

enum class ComparatorKind { kPiecewiseCorner, kAdaptiveWindow, kDiscounted, kScaledArbitrary };

struct ComparatorSpec {
  ComparatorKind kind = ComparatorKind::kPiecewiseCorner;
  std::size_t d = 2;
  std::size_t horizon = 1;
  /// piecewise_corner: corner k is held for segment_lengths[k] rounds.
  std::vector<std::size_t> segment_lengths;
  std::vector<std::size_t> corners;
  /// adaptive_window: u_t = e_corner on [first, last] (1-based), zero elsewhere.
  std::size_t first = 1;
  std::size_t last = 1;
  /// adaptive_window and discounted.
  std::size_t corner = 0;
  /// discounted: u_t = beta_t e_corner.
  DiscountSchedule schedule;
  /// scaled_arbitrary: random distributions scaled by random factors in [0,1].
  std::uint64_t seed = 0;
};

struct GeneratedComparator {
  ComparatorSequence u;
  /// Closed-form values known from the construction; empty for scaled_arbitrary.
  std::optional<double> declared_m;
  std::optional<double> declared_n;
  std::optional<double> declared_u1;
};

void validate(const ComparatorSpec& spec);

GeneratedComparator gen_comparator(const ComparatorSpec& spec);

/// Piecewise corner comparator following the lowest-mean arm of each segment.
ComparatorSpec piecewise_best_comparator(const EnvironmentSpec& env);

}  // namespace genshare
