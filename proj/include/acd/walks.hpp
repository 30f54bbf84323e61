#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace acd::walks {

inline constexpr int kMaxPosition = 200;

// Probability masses over positions 0..c_max at one time. Mass pushed past
// c_max is moved to `lost` so totals stay auditable.
struct WalkDistribution {
  std::int64_t time = 0;
  std::vector<double> masses;
  double lost = 0.0;

  double at(std::int64_t c) const;
  double tail(std::int64_t c) const;  // mass at positions >= c, plus lost
  double total() const;               // includes lost
};

// Balance walk observed at even times:
//   p0' = p0/2 + p1/2 + p2/4
//   p1' = p0/2 + p1/4 + p2/4 + p3/4
//   pc' = (p(c-1) + pc + p(c+1) + p(c+2))/4   for c >= 2
class YWalk {
 public:
  explicit YWalk(int c_max = kMaxPosition);
  const WalkDistribution& current() const { return dist_; }
  void advance();  // two time steps
  // Distribution one step later (odd time): 0 -> 1, c -> c +- 1 evenly.
  WalkDistribution half_step() const;

 private:
  WalkDistribution dist_;
  std::vector<double> next_;
};

// Distributions at even times 0, 2, ..., 2 t_half.
std::vector<WalkDistribution> y_walk_distribution(std::int64_t t_half, int c_max = kMaxPosition);

struct BoundReport {
  bool ok = true;
  std::int64_t time = 0;
  std::int64_t first_bad = -1;  // offending position
  double worst_margin = 0.0;    // max of (lhs - rhs); <= tol when ok
};

// p0 >= p1 and pc >= 2 p(c+1) for c >= 1, within tol.
BoundReport y_walk_monotonicity_check(const WalkDistribution& even, double tol = 1e-12);
// pc + lost <= 2^-c for 1 <= c <= c_limit.
BoundReport y_walk_tail_check(const WalkDistribution& even, int c_limit, double tol = 1e-12);
// At odd time: P(Y >= c + 1) <= 2^-c for 1 <= c <= c_limit.
BoundReport y_walk_odd_tail_check(const WalkDistribution& odd, int c_limit, double tol = 1e-12);

// Deviation walk. From i >= 6: +1 with prob 3a/5, -4 with prob 2a/5 and -2
// with prob 1 - a. Anything that lands below 6 is placed at 6, the worst
// case allowed for the unconstrained low region.
class RWalk {
 public:
  static constexpr int kFloor = 6;
  explicit RWalk(int c_max = kMaxPosition);
  const WalkDistribution& current() const { return dist_; }
  void advance(double a);

 private:
  WalkDistribution dist_;
  std::vector<double> next_;
};

// Distributions at times 0..T driven by a_seq[0..T-1].
std::vector<WalkDistribution> r_walk_distribution(std::int64_t steps, std::span<const double> a_seq,
                                                  int c_max = kMaxPosition);

// p_i + lost <= (2/3)^(i-6) and tail(i) <= 3 (2/3)^(i-6) for 6 <= i <= i_limit.
BoundReport r_walk_tail_check(const WalkDistribution& d, int i_limit, double tol = 1e-12);

enum class S2Policy { zeros, random_nonpositive, adversary_replay };
const char* to_string(S2Policy p);
S2Policy parse_s2_policy(const std::string& s);

struct CoupledPath {
  std::vector<std::int64_t> x_path;  // X at times 0, 2, 4, ...
  std::vector<std::int64_t> y_path;
  std::vector<std::int64_t> s1;
  std::vector<std::int64_t> s2;
};

// Y' = max(Y + s1, 0); X' = max(max(X + s1, 0) + s2, 0) with s1 uniform on
// {+1, 0, -1, -2}. adversary_replay derives s2 from the real balance dynamics
// on `replay_n` coordinates: s2 = min(0, real two-step move - s1).
CoupledPath coupled_walk_trial(std::int64_t t_half, std::uint64_t seed, S2Policy policy,
                               std::uint64_t trial = 0, std::int64_t replay_n = 64);

// Throws PreconditionError on a positive s2 term; returns #{t : x > y}.
std::int64_t coupling_violations(const CoupledPath& path);

struct CouplingReport {
  std::int64_t trials = 0;
  std::int64_t violations = 0;  // trials with at least one violation
  std::int64_t max_y = 0;
};

CouplingReport coupling_monte_carlo(std::int64_t trials, std::int64_t t_half, std::uint64_t seed,
                                    S2Policy policy, unsigned threads = 1);

// Balance-gap tail: runs rules (A)/(B) on counts only, starting balanced.
struct TailEstimate {
  std::int64_t n = 0;
  double c = 1.0;
  double b1 = 0.0;
  std::int64_t horizon = 0;
  std::int64_t trials = 0;
  std::int64_t exceedances = 0;  // trials with max_t |u - d| > b1
  std::int64_t max_gap = 0;
  double p_hat = 0.0;
  double lo = 0.0;  // Wilson interval, z = 1.96
  double hi = 0.0;
  double budget = 0.0;  // (1/3) n^(-2c)
  bool ok = false;      // hi <= 10 budget
};

TailEstimate x_walk_tail_estimate(std::int64_t n, double c, std::int64_t trials, std::uint64_t seed,
                                  std::int64_t horizon, unsigned threads = 1);

// Characters equal to one seen earlier in the string.
std::int64_t count_reappearing(std::span<const std::int64_t> s);

struct ReappearingRow {
  double gamma = 0.0;
  std::int64_t hits = 0;  // trials with >= gamma + 1 reappearing characters
  double empirical = 0.0;
  double se = 0.0;
  double bound = 0.0;  // e^-gamma
  bool ok = false;     // empirical <= bound + 4 se
};

struct ReappearingReport {
  std::int64_t n = 0;
  std::int64_t length = 0;
  std::int64_t trials = 0;
  std::vector<ReappearingRow> rows;
  bool ok() const;
};

ReappearingReport reappearing_char_mc(std::int64_t n, std::int64_t length, std::span<const double> gammas,
                                      std::int64_t trials, std::uint64_t seed, unsigned threads = 1);

// t,position,mass rows for nonzero masses, one final `lost` row per time.
void write_csv(std::ostream& out, const std::vector<WalkDistribution>& dists);
// gamma,empirical,bound,trials
void write_csv(std::ostream& out, const ReappearingReport& r);

}  // namespace acd::walks
