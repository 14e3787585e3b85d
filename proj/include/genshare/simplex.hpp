#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace genshare {

using Vector = std::vector<double>;

/// Tolerance on the unit-sum and floor invariants of a distribution.
inline constexpr double kSimplexTol = 1e-12;

/// Asymmetric shift distance on the nonnegative orthant:
/// sum over coordinates with x_i >= y_i of (x_i - y_i).
/// For two distributions this is half the L1 distance.
double total_variation(std::span<const double> x, std::span<const double> y);

/// Kullback-Leibler divergence sum_i x_i ln(x_i / y_i) with 0 ln 0 = 0.
/// Throws std::domain_error when x_i > 0 while y_i == 0.
double kl_divergence(std::span<const double> x, std::span<const double> y);

/// -x ln x - (1-x) ln(1-x), zero at both endpoints.
double binary_entropy(double x);

/// KL projection of a positive distribution onto the clipped simplex
/// { q in simplex : q_i >= alpha/d }.
///
/// The minimizer floors the k smallest entries at alpha/d and rescales the
/// rest proportionally; k is the smallest count for which every rescaled
/// entry stays above the floor. O(d log d).
Vector kl_project_clipped(std::span<const double> v, double alpha);

/// Divides by the exact sum. Throws if the sum is not positive and finite.
void normalize(Vector& w);

Vector uniform(std::size_t d);

/// True when entries are nonnegative and sum to one within `tol`.
bool is_distribution(std::span<const double> x, double tol = kSimplexTol);

double l1_norm(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace genshare
