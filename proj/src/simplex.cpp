#include "genshare/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace genshare {

namespace {

void check_same_size(std::span<const double> x, std::span<const double> y, const char* what) {
  if (x.size() != y.size()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(x.size()) + " vs " + std::to_string(y.size()) +
                                ")");
  }
}

}  // namespace

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

double total_variation(std::span<const double> x, std::span<const double> y) {
  check_same_size(x, y, "total_variation");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= y[i]) acc += x[i] - y[i];
  }
  return acc;
}

double kl_divergence(std::span<const double> x, std::span<const double> y) {
  check_same_size(x, y, "kl_divergence");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0) continue;
    if (y[i] <= 0.0) {
      throw std::domain_error("kl_divergence: x_" + std::to_string(i) +
                              " > 0 outside the support of y");
    }
    acc += x[i] * std::log(x[i] / y[i]);
  }
  // Rounding can leave tiny negative values for x == y up to normalization.
  return std::max(acc, 0.0);
}

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error("binary_entropy: argument outside [0,1]");
  }
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log(x) - (1.0 - x) * std::log1p(-x);
}

Vector kl_project_clipped(std::span<const double> v, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::domain_error("kl_project_clipped: alpha outside [0,1]");
  }
  const std::size_t d = v.size();
  if (d == 0) throw std::invalid_argument("kl_project_clipped: empty vector");
  for (double x : v) {
    if (!(x > 0.0)) {
      throw std::domain_error("kl_project_clipped: entries must be strictly positive");
    }
  }
  const double floor = alpha / static_cast<double>(d);
  if (alpha == 1.0) return uniform(d);

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });

  // suffix_mass[k] = mass of the d-k largest entries
  std::vector<double> suffix_mass(d + 1, 0.0);
  for (std::size_t k = d; k-- > 0;) suffix_mass[k] = suffix_mass[k + 1] + v[order[k]];

  std::size_t floored = 0;
  double scale = 1.0 / suffix_mass[0];
  for (; floored < d; ++floored) {
    const double free_mass = 1.0 - static_cast<double>(floored) * floor;
    scale = free_mass / suffix_mass[floored];
    if (v[order[floored]] * scale >= floor) break;
  }

  Vector out(d);
  for (std::size_t k = 0; k < d; ++k) {
    out[order[k]] = k < floored ? floor : v[order[k]] * scale;
  }
  normalize(out);
  // Renormalization may nudge floored entries a rounding unit below alpha/d.
  for (double& x : out) x = std::max(x, floor);
  return out;
}

void normalize(Vector& w) {
  double total = 0.0;
  for (double x : w) total += x;
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw std::domain_error("normalize: weights must have positive finite mass");
  }
  for (double& x : w) x /= total;
}

Vector uniform(std::size_t d) {
  if (d == 0) throw std::invalid_argument("uniform: dimension must be positive");
  return Vector(d, 1.0 / static_cast<double>(d));
}

bool is_distribution(std::span<const double> x, double tol) {
  if (x.empty()) return false;
  double total = 0.0;
  for (double v : x) {
    if (!(v >= 0.0)) return false;
    total += v;
  }
  return std::abs(total - 1.0) <= tol;
}

double l1_norm(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += std::abs(v);
  return acc;
}

double dot(std::span<const double> x, std::span<const double> y) {
  check_same_size(x, y, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

}  // namespace genshare
