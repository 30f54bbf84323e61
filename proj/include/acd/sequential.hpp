#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "acd/objective.hpp"

namespace acd::sequential {

// C1: coordinates starting at +1; C-1: coordinates starting at -1.
//   S1 = sum_{C1} x_j,  Sm1 = sum_{C-1} (-x_j),  S = S1 + Sm1.
struct Trajectory {
  std::vector<double> f_values;
  std::vector<double> s_values;
  std::vector<double> s1_values;
  std::vector<double> sm1_values;
};

// Full recompute of the maintained sums happens every 2^16 steps.
inline constexpr std::int64_t kRecomputeInterval = std::int64_t{1} << 16;

// Coordinate drawn at step t (1-based) of trial `trial`; a pure function of
// (seed, trial, t).
std::int64_t coordinate_at(std::int64_t n, std::uint64_t seed, std::uint64_t trial,
                           std::int64_t t);

// Sequential stochastic coordinate descent from x^0 with exact gradients.
Trajectory run_sequential(const objective::Params& p, std::int64_t steps,
                          std::uint64_t seed, std::uint64_t trial = 0);

// Same dynamics driven by an explicit coordinate sequence.
Trajectory run_with_choices(const objective::Params& p,
                            std::span<const std::int64_t> coords);

// E[S(t)] = n (1 - L(1-eps)/(n gamma))^t for t = 0..steps.
std::vector<double> expected_sum_curve(const objective::Params& p, std::int64_t steps);

struct Bounds {
  std::vector<double> lower;  // (1 - 2 mu/(n gamma))^t f(x^0)
  std::vector<double> upper;  // (1 - mu/(3 n gamma))^t f(x^0)
};

Bounds rate_bounds(const objective::Params& p, std::int64_t steps);

struct MeanTrajectory {
  std::int64_t trials = 0;
  std::vector<double> f_mean, f_se;
  std::vector<double> s_mean, s_se;
  std::vector<double> s1_mean, sm1_mean;
};

// Mean over independent trials. Trials are grouped into fixed-size blocks that
// are merged in block order, so results do not depend on `threads`.
MeanTrajectory monte_carlo_sequential(const objective::Params& p, std::int64_t trials,
                                      std::int64_t steps, std::uint64_t seed,
                                      unsigned threads = 1);

struct SandwichVerdict {
  bool sandwich_ok = true;
  bool expected_sum_ok = true;
  std::int64_t first_sandwich_violation = -1;
  std::int64_t first_sum_violation = -1;
  double worst_sum_z = 0.0;  // max |mean S - E S| / SE over t with SE > 0
};

// mean f within [lower - k SE, upper + k SE] and mean S within k SE of E[S].
SandwichVerdict check_sandwich(const objective::Params& p, const MeanTrajectory& mc,
                               double k_se = 4.0);

// CSV columns: t,f,S,S1,Sm1,lower_bound,upper_bound
void write_csv(std::ostream& out, const objective::Params& p, const Trajectory& traj);
// Adds f_se,S_se,S_expected.
void write_csv(std::ostream& out, const objective::Params& p, const MeanTrajectory& mc);

}  // namespace acd::sequential
