#include "genshare/environments.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace genshare {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t state = base;
  const std::uint64_t mixed = splitmix64(state);
  state = mixed ^ (stream * 0xd1b54a32d192ed03ULL);
  return splitmix64(state);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t Rng::index(std::size_t n) {
  // Rejection sampling keeps the draw unbiased and portable.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

namespace {

void check_means(const Vector& means, std::size_t d, const std::string& where) {
  if (means.size() != d) {
    throw std::invalid_argument(where + ": expected " + std::to_string(d) + " means, got " +
                                std::to_string(means.size()));
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (!(means[i] >= 0.0 && means[i] <= 1.0)) {
      throw std::invalid_argument(where + "[" + std::to_string(i) + "]: mean outside [0,1]");
    }
  }
}

Vector bernoulli_row(Rng& rng, const Vector& means) {
  Vector row(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) row[i] = rng.uniform() < means[i] ? 1.0 : 0.0;
  return row;
}

}  // namespace

void validate(const EnvironmentSpec& spec) {
  if (spec.d == 0) throw std::invalid_argument("environment.d: must be >= 1");
  switch (spec.kind) {
    case EnvironmentKind::kIidBernoulli:
      if (spec.horizon == 0) throw std::invalid_argument("environment.T: must be >= 1");
      check_means(spec.means, spec.d, "environment.means");
      break;
    case EnvironmentKind::kPiecewiseStationary: {
      if (spec.segments.empty()) {
        throw std::invalid_argument("environment.segments: at least one segment required");
      }
      std::size_t total = 0;
      for (std::size_t k = 0; k < spec.segments.size(); ++k) {
        const std::string where = "environment.segments[" + std::to_string(k) + "]";
        if (spec.segments[k].length == 0) {
          throw std::invalid_argument(where + ".length: must be >= 1");
        }
        check_means(spec.segments[k].means, spec.d, where + ".means");
        total += spec.segments[k].length;
      }
      if (total != spec.horizon) {
        throw std::invalid_argument("environment.segments: lengths sum to " +
                                    std::to_string(total) + " but T = " +
                                    std::to_string(spec.horizon));
      }
      break;
    }
    case EnvironmentKind::kAdversarialFlip:
      if (spec.horizon == 0) throw std::invalid_argument("environment.T: must be >= 1");
      break;
    case EnvironmentKind::kFromFile:
      if (spec.path.empty()) throw std::invalid_argument("environment.path: missing");
      break;
  }
}

std::vector<Vector> gen_losses(const EnvironmentSpec& spec) {
  validate(spec);
  std::vector<Vector> losses;
  Rng rng(derive_seed(spec.seed, 0));
  switch (spec.kind) {
    case EnvironmentKind::kIidBernoulli:
      losses.reserve(spec.horizon);
      for (std::size_t t = 0; t < spec.horizon; ++t) losses.push_back(bernoulli_row(rng, spec.means));
      break;
    case EnvironmentKind::kPiecewiseStationary:
      losses.reserve(spec.horizon);
      for (const auto& seg : spec.segments) {
        for (std::size_t t = 0; t < seg.length; ++t) losses.push_back(bernoulli_row(rng, seg.means));
      }
      break;
    case EnvironmentKind::kAdversarialFlip:
      throw std::invalid_argument(
          "adversarial_flip reacts to the forecaster; use make_adversary instead");
    case EnvironmentKind::kFromFile:
      losses = load_loss_csv(spec.path);
      if (!losses.empty() && losses.front().size() != spec.d) {
        throw std::invalid_argument("environment.path: file has " +
                                    std::to_string(losses.front().size()) + " columns, d = " +
                                    std::to_string(spec.d));
      }
      break;
  }
  return losses;
}

Adversary make_adversary(const EnvironmentSpec& spec) {
  validate(spec);
  if (spec.kind != EnvironmentKind::kAdversarialFlip) {
    throw std::invalid_argument("make_adversary: environment is not adversarial_flip");
  }
  auto rng = std::make_shared<Rng>(derive_seed(spec.seed, 1));
  return [rng](std::span<const double> p, std::size_t) {
    const double top = *std::max_element(p.begin(), p.end());
    std::vector<std::size_t> heaviest;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] == top) heaviest.push_back(i);
    }
    Vector loss(p.size(), 0.0);
    loss[heaviest.size() == 1 ? heaviest.front() : heaviest[rng->index(heaviest.size())]] = 1.0;
    return loss;
  };
}

std::vector<Segment> best_arm_segments(std::size_t d, const std::vector<std::size_t>& lengths,
                                       const std::vector<std::size_t>& best, double low,
                                       double high) {
  if (lengths.size() != best.size()) {
    throw std::invalid_argument("best_arm_segments: one best arm per segment required");
  }
  std::vector<Segment> out;
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    if (best[k] >= d) throw std::invalid_argument("best_arm_segments: arm index out of range");
    Segment seg{lengths[k], Vector(d, high)};
    seg.means[best[k]] = low;
    out.push_back(std::move(seg));
  }
  return out;
}

std::vector<Vector> read_loss_csv(std::istream& in) {
  std::vector<Vector> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Vector row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double x;
      try {
        x = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("loss CSV line " + std::to_string(lineno) +
                                    ": not a number: '" + cell + "'");
      }
      if (cell.find_first_not_of(" \t", used) != std::string::npos) {
        throw std::invalid_argument("loss CSV line " + std::to_string(lineno) +
                                    ": trailing characters in '" + cell + "'");
      }
      if (!(x >= 0.0 && x <= 1.0)) {
        throw std::invalid_argument("loss CSV line " + std::to_string(lineno) +
                                    ": value outside [0,1]");
      }
      row.push_back(x);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::invalid_argument("loss CSV line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(rows.front().size()) + " columns, got " +
                                  std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<Vector> load_loss_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open loss file '" + path + "'");
  return read_loss_csv(in);
}

void write_loss_csv(std::ostream& out, const std::vector<Vector>& losses) {
  const auto old = out.precision(17);
  for (const auto& row : losses) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  out.precision(old);
}

void validate(const ComparatorSpec& spec) {
  if (spec.d == 0) throw std::invalid_argument("comparator.d: must be >= 1");
  if (spec.horizon == 0) throw std::invalid_argument("comparator.T: must be >= 1");
  switch (spec.kind) {
    case ComparatorKind::kPiecewiseCorner: {
      if (spec.segment_lengths.empty() || spec.segment_lengths.size() != spec.corners.size()) {
        throw std::invalid_argument(
            "comparator.segment_lengths/corners: need one corner per segment");
      }
      std::size_t total = 0;
      for (std::size_t k = 0; k < spec.corners.size(); ++k) {
        if (spec.corners[k] >= spec.d) {
          throw std::invalid_argument("comparator.corners[" + std::to_string(k) +
                                      "]: index out of range");
        }
        if (spec.segment_lengths[k] == 0) {
          throw std::invalid_argument("comparator.segment_lengths[" + std::to_string(k) +
                                      "]: must be >= 1");
        }
        total += spec.segment_lengths[k];
      }
      if (total != spec.horizon) {
        throw std::invalid_argument("comparator.segment_lengths: sum " + std::to_string(total) +
                                    " differs from T = " + std::to_string(spec.horizon));
      }
      break;
    }
    case ComparatorKind::kAdaptiveWindow:
      if (spec.first < 1 || spec.first > spec.last || spec.last > spec.horizon) {
        throw std::invalid_argument("comparator window [" + std::to_string(spec.first) + ", " +
                                    std::to_string(spec.last) + "] outside [1, T]");
      }
      if (spec.corner >= spec.d) throw std::invalid_argument("comparator.corner: out of range");
      break;
    case ComparatorKind::kDiscounted:
      if (spec.corner >= spec.d) throw std::invalid_argument("comparator.corner: out of range");
      if (spec.schedule.betas.size() != spec.horizon) {
        throw std::invalid_argument("comparator.schedule: length differs from T");
      }
      validate_schedule(spec.schedule);
      break;
    case ComparatorKind::kScaledArbitrary:
      break;
  }
}

GeneratedComparator gen_comparator(const ComparatorSpec& spec) {
  validate(spec);
  GeneratedComparator out;
  const std::size_t d = spec.d;
  const std::size_t T = spec.horizon;
  out.u.assign(T, Vector(d, 0.0));

  switch (spec.kind) {
    case ComparatorKind::kPiecewiseCorner: {
      std::size_t t = 0;
      std::vector<bool> used(d, false);
      double switches = 0.0;
      for (std::size_t k = 0; k < spec.corners.size(); ++k) {
        if (k > 0 && spec.corners[k] != spec.corners[k - 1]) switches += 1.0;
        used[spec.corners[k]] = true;
        for (std::size_t j = 0; j < spec.segment_lengths[k]; ++j) out.u[t++][spec.corners[k]] = 1.0;
      }
      out.declared_m = switches;
      out.declared_n = static_cast<double>(std::count(used.begin(), used.end(), true));
      out.declared_u1 = 1.0;
      break;
    }
    case ComparatorKind::kAdaptiveWindow:
      for (std::size_t t = spec.first; t <= spec.last; ++t) out.u[t - 1][spec.corner] = 1.0;
      out.declared_u1 = spec.first == 1 ? 1.0 : 0.0;
      out.declared_m = spec.first == 1 ? 0.0 : 1.0;
      out.declared_n = 1.0;
      break;
    case ComparatorKind::kDiscounted: {
      const auto& b = spec.schedule.betas;
      for (std::size_t t = 0; t < T; ++t) out.u[t][spec.corner] = b[t];
      out.declared_u1 = b.front();
      out.declared_n = *std::max_element(b.begin(), b.end());
      // For monotone schedules u1 + m = max{beta_1, beta_T}.
      if (spec.schedule.monotone != Monotonicity::kNone) {
        out.declared_m = monotone_discount_regularity(b) - b.front();
      } else {
        out.declared_m = discount_regularity(b) - b.front();
      }
      break;
    }
    case ComparatorKind::kScaledArbitrary: {
      Rng rng(derive_seed(spec.seed, 2));
      for (auto& ut : out.u) {
        double total = 0.0;
        for (auto& x : ut) {
          x = rng.uniform();
          total += x;
        }
        const double scale = rng.uniform() / total;
        for (auto& x : ut) x *= scale;
      }
      break;
    }
  }
  return out;
}

ComparatorSpec piecewise_best_comparator(const EnvironmentSpec& env) {
  if (env.kind != EnvironmentKind::kPiecewiseStationary && env.kind != EnvironmentKind::kIidBernoulli) {
    throw std::invalid_argument(
        "piecewise_best_comparator: needs an iid_bernoulli or piecewise_stationary environment");
  }
  validate(env);
  ComparatorSpec spec;
  spec.kind = ComparatorKind::kPiecewiseCorner;
  spec.d = env.d;
  spec.horizon = env.horizon;
  auto argmin = [](const Vector& v) {
    return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
  };
  if (env.kind == EnvironmentKind::kIidBernoulli) {
    spec.segment_lengths = {env.horizon};
    spec.corners = {argmin(env.means)};
  } else {
    for (const auto& seg : env.segments) {
      spec.segment_lengths.push_back(seg.length);
      spec.corners.push_back(argmin(seg.means));
    }
  }
  return spec;
}

}  // namespace genshare
