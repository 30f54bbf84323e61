#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace acd::objective {

inline constexpr double kMaxEps = 1.0 / 18.0;

// The function family
//   f(x) = L * [ (1-eps)/2 * sum_i x_i^2 + eps/2 * (sum_i x_i)^2 ]
// with step divisor gamma used by the coordinate updates.
struct Params {
  std::int64_t n = 2;
  double eps = kMaxEps;
  double gamma = 1.0;
  double lmax_scale = 1.0;
};

// Throws PreconditionError naming the first violated field. Any eps in
// [0, 1) gives a strongly convex function and is accepted here.
void validate(const Params& p);

// Additionally requires 0 < eps <= 1/18, as the stalling construction does.
void validate_stalling(const Params& p);

using Point = std::vector<double>;

// x^0: coordinates with odd 1-based index are -1, even 1-based index +1,
// i.e. (-1, +1, -1, +1, ...). Zero-based index i has value -1 iff i is even.
Point initial_point(std::int64_t n);
inline double initial_value(std::int64_t i) { return (i % 2 == 0) ? -1.0 : 1.0; }

double eval(const Params& p, std::span<const double> x);

// O(1) value from the maintained sums sum_i x_i^2 and sum_i x_i.
inline double eval_from_sums(const Params& p, double sum_sq, double sum) {
  return p.lmax_scale * (0.5 * (1.0 - p.eps) * sum_sq + 0.5 * p.eps * sum * sum);
}

// Zero-based coordinate index j.
double partial_gradient(const Params& p, std::span<const double> x, std::size_t j);

// The gradient only depends on x_j and sum_i x_i.
inline double partial_gradient_from_sum(const Params& p, double xj, double sum) {
  return p.lmax_scale * ((1.0 - p.eps) * xj + p.eps * sum);
}

std::vector<double> gradient(const Params& p, std::span<const double> x);

struct LipschitzReport {
  double lmax = 0.0;
  double lres = 0.0;
  double lresbar = 0.0;
  double mu = 0.0;  // strong convexity parameter
};

LipschitzReport lipschitz_parameters(const Params& p);

// Inverse of lresbar = sqrt(1 + (n-1) eps^2), with the admissibility verdict
// for the stalling construction:
//   37/2 * gamma < ratio   and   eps <= 1/18.
struct RatioInversion {
  double eps = 0.0;
  bool admissible = false;
  bool above_lower_band = false;
  bool eps_within_limit = false;
  // The literal upper band ratio <= sqrt(n-1)/18, reported only; it excludes
  // eps = 1/18 itself because lresbar = sqrt(1 + (n-1)/324).
  bool literal_upper_band = false;
  std::string reason;
};

// Throws PreconditionError for ratio < 1 or n < 2.
RatioInversion epsilon_for_ratio(double ratio, std::int64_t n, double gamma = 1.0);

// f(y) - f(x) - <grad f(x), y - x> - mu/2 |y - x|^2. Non-negative for all x, y.
double strong_convexity_residual(const Params& p, std::span<const double> x,
                                 std::span<const double> y);

// Independent estimate of the Lipschitz parameters from gradient differences
// at random points. Each estimate is a maximum of observed difference
// quotients and so lower-bounds the true value (up to rounding).
LipschitzReport sampled_lipschitz_oracle(const Params& p, std::int64_t samples,
                                         std::uint64_t seed);

}  // namespace acd::objective
