#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "genshare/bounds.hpp"
#include "genshare/environments.hpp"
#include "genshare/forecasters.hpp"
#include "genshare/regret.hpp"

namespace genshare {

/// Invalid configuration; the message starts with the dotted path of the
/// offending field, e.g. "forecaster.alpha: must lie in [0,1]".
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class RegretKind { kShifting, kAdaptive, kDiscounted };

std::string to_string(RegretKind kind);

struct RegretSpec {
  RegretKind kind = RegretKind::kShifting;
  std::size_t tau0 = 1;
  DiscountSchedule schedule;
};

struct ForecasterSpec {
  MixingRule rule;
  double eta = 1.0;
  /// Set when (eta, alpha) came from a tuner.
  std::optional<Tuning> tuning;
};

struct ExperimentSpec {
  EnvironmentSpec environment;
  std::optional<ComparatorSpec> comparator;
  ForecasterSpec forecaster;
  RegretSpec regret;
  std::size_t repetitions = 1;
  std::string csv_path;
};

struct RegretReport {
  std::string run_id;
  std::uint64_t seed = 0;
  std::size_t horizon = 0;
  std::size_t d = 0;
  RegretKind regret_kind = RegretKind::kShifting;
  double regret = 0.0;
  double m = 0.0;
  double n = 0.0;
  double u_sum = 0.0;
  double l_sum = 0.0;
  double bound = 0.0;
  bool pass = false;
  double wall_ms = 0.0;
};

/// regret <= bound + 1e-6 max(1, |bound|)
bool certify(double regret, double bound);

ExperimentSpec parse_experiment(const nlohmann::json& config);
ExperimentSpec load_experiment(const std::string& path);

/// Bound of the rule's regret theorem for a comparator with the given statistics.
double rule_bound(const MixingRule& rule, double eta, std::size_t d, std::size_t horizon,
                  const ComparatorStats& stats);

/// Largest rule_bound over window comparators of length at most tau0.
double rule_adaptive_bound(const MixingRule& rule, double eta, std::size_t d, std::size_t horizon,
                           std::size_t tau0);

/// One repetition; `rep` selects the derived seed.
RegretReport run_repetition(const ExperimentSpec& spec, std::size_t rep);

/// All repetitions (spread over `threads` workers), in repetition order.
std::vector<RegretReport> run_experiment(const ExperimentSpec& spec, unsigned threads = 1);

/// The row with the largest excess regret - bound; passes iff every row passes.
RegretReport worst_case_summary(const std::vector<RegretReport>& rows);

/// Header plus one row per report and the summary row. Reals use 17
/// significant digits; wall_ms is written as 0 when `timing` is false.
void write_report_csv(std::ostream& out, const std::vector<RegretReport>& rows, bool timing = true);

}  // namespace genshare
