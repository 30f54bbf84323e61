#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "acd/objective.hpp"
#include "acd/schedule.hpp"

namespace acd::adversary {

enum class Mode { paper, explore };

const char* to_string(Mode m);
Mode parse_mode(const std::string& s);

double lg(double x);

// Smallest multiple of 8 that is >= x.
std::int64_t round_up_to_8(double x);

struct ConstantsInput {
  std::int64_t n = 0;
  double eps = objective::kMaxEps;
  double gamma = 1.0;
  double c = 1.0;
  Mode mode = Mode::paper;
  std::optional<std::int64_t> qbar_override;
};

struct Check {
  std::string name;
  bool ok = true;
  bool enforced = true;
  std::string detail;
};

struct AdversaryConstants {
  std::int64_t n = 0;
  double eps = 0.0;
  double gamma = 1.0;
  double c = 1.0;
  Mode mode = Mode::paper;

  double alpha = 0.0;   // (1-eps)/gamma
  double nu = 0.0;      // 3 eps alpha / (gamma - 6 eps)
  double b1 = 0.0;      // 1 + lg 3 + 2c lg n
  double b2 = 0.0;      // 2 + (lg 9 + 2c lg n) / (3 lg 1.5)
  double b3 = 0.0;      // 1 + ln 3 + 2c ln n
  double lambda = 0.0;  // 1/16 - (b1 + b3)/qbar
  std::int64_t qbar = 0;

  double lresbar = 0.0;
  // ceil(74 gamma sqrt(n)/lresbar + 96c log n + 435) with log = lg and ln.
  std::int64_t qbar_formula_lg = 0;
  std::int64_t qbar_formula_ln = 0;
  double constraint_lhs = 0.0;  // (1/2) lambda qbar eps alpha
  double constraint_rhs = 0.0;  // 2(1-eps) + nu + 2 gamma nu + eps alpha (b1/2 + (nu/alpha) b2)
  double tau = 0.0;             // 3 qbar / 4
  double failure_budget = 0.0;  // (1/3) n^(-2c), per failure type and step

  std::vector<Check> checks;

  std::int64_t block() const { return qbar / 4; }
  // q/16 - b1 - b3: guaranteed available moving updates of each direction.
  double min_available() const { return static_cast<double>(qbar) / 16.0 - b1 - b3; }
  bool enforced_ok() const;
  std::string failed_checks() const;
};

// Computes every constant and check. In paper mode qbar is the lg-form
// formula rounded up to a multiple of 8 (an override must not be smaller);
// in explore mode qbar_override is required and rounded up. When `enforce`
// is set, failing enforced checks throw PreconditionError naming each one.
AdversaryConstants derive_constants(const ConstantsInput& in, bool enforce = true);

// First occurrence of a coordinate is fast, repeats are slow.
std::vector<schedule::UpdateClass> classify_initial_block(std::span<const std::int64_t> coords);

// Bookkeeping for the construction. C+ (initial value +1) is the set of odd
// zero-based coordinates. A coordinate is up iff it is in C+ with ideal value
// 1 or in C- with ideal value -(1-alpha).
struct StallState {
  std::int64_t n = 0;
  double alpha = 0.0;
  double nu = 0.0;
  std::vector<double> x;
  std::vector<std::uint8_t> far;       // ideal value is +-1
  std::vector<std::int8_t> perturbed;  // 0, +1 (D+) or -1 (D-)
  std::int64_t up = 0;                 // u-hat
  std::int64_t down = 0;               // d-hat
  std::int64_t far_count = 0;
  double delta_sum = 0.0;  // sum of x_j - ideal_j
  double sum_x = 0.0;
  double sum_sq = 0.0;

  static StallState initial(std::int64_t n, double alpha, double nu);

  static bool in_c_plus(std::int64_t j) { return j % 2 == 1; }
  double ideal(std::int64_t j) const;
  bool is_up(std::int64_t j) const {
    return in_c_plus(j) == (far[static_cast<std::size_t>(j)] != 0);
  }
  double delta(std::int64_t j) const { return x[static_cast<std::size_t>(j)] - ideal(j); }
  // Equals (alpha/2)(u-hat - d-hat).
  double ideal_sum() const { return 0.5 * alpha * static_cast<double>(up - down); }
};

struct Recount {
  std::int64_t up = 0, down = 0, far_count = 0;
  double ideal_sum = 0.0, delta_sum = 0.0, sum_x = 0.0, sum_sq = 0.0;
};

// Full O(n) recomputation of every maintained aggregate.
Recount recount(const StallState& s);

enum class Move { moving, stay_still };

// Rule (A) at odd t, rule (B) at even t; fast updates always move.
Move decide_move(const StallState& s, std::int64_t t, std::int64_t k, bool fast);

struct DeltaTarget {
  double lo = 0.0;
  double hi = 0.0;
  int sign = -1;  // -1 for D-, +1 for D+
};

// Delta >= 0 sends the updated coordinate to D-, otherwise to D+.
DeltaTarget decide_delta_sign(const StallState& s);

// Ideal value the update aims for.
double target_ideal(const StallState& s, std::int64_t k, Move move);

// One readable update: reading it shifts the read sum by `shift`.
struct Candidate {
  std::int64_t index = 0;
  std::int64_t coord = 0;
  double shift = 0.0;
};

struct Selection {
  std::vector<Candidate> reads;
  double value = 0.0;
  bool landed = false;
  int direction = 0;  // +1 read increasing updates, -1 decreasing, 0 none
};

// Written value x_k - g/gamma with g = (1-eps) read_xk + eps read_sum.
inline double written_value(double eps, double gamma, double current_xk, double read_xk,
                            double read_sum) {
  return current_xk - ((1.0 - eps) * read_xk + eps * read_sum) / gamma;
}

// Greedy read selection. Starting from the baseline read vector (read_xk,
// baseline_sum), reads increasing candidates while the written value is above
// [lo, hi] or decreasing ones while below, in the order the generators yield
// them. A generator is called as next(Candidate&) -> bool.
template <class NextIncreasing, class NextDecreasing>
Selection select_reads(double eps, double gamma, double current_xk, double read_xk,
                       double baseline_sum, double lo, double hi, NextIncreasing&& next_inc,
                       NextDecreasing&& next_dec) {
  Selection sel;
  double sum = baseline_sum;
  double w = written_value(eps, gamma, current_xk, read_xk, sum);
  Candidate cand;
  if (w > hi) {
    sel.direction = 1;
    while (w > hi && next_inc(cand)) {
      sel.reads.push_back(cand);
      sum += cand.shift;
      w = written_value(eps, gamma, current_xk, read_xk, sum);
    }
  } else if (w < lo) {
    sel.direction = -1;
    while (w < lo && next_dec(cand)) {
      sel.reads.push_back(cand);
      sum += cand.shift;
      w = written_value(eps, gamma, current_xk, read_xk, sum);
    }
  }
  sel.value = w;
  sel.landed = w >= lo && w <= hi;
  return sel;
}

struct WriteResult {
  double old_value = 0.0;
  double new_value = 0.0;
  schedule::UpdateKind kind = schedule::UpdateKind::stay_still;
};

// Writes coordinate k, flipping its ideal value if `move` is moving, and
// updates every aggregate.
WriteResult apply_write(StallState& s, std::int64_t k, double value, Move move);

// Value set of the stalling regime: ideal, or ideal +- [2nu/3, nu].
bool in_value_set(const StallState& s, std::int64_t k, double tol = 1e-12);

enum class FailureType { repeats = 1, ideal_sum = 2, delta_sum = 3 };
const char* to_string(FailureType f);

struct FailureRecord {
  std::int64_t time = 0;
  FailureType type = FailureType::repeats;
  double measured = 0.0;
  double bound = 0.0;
};

// repeats: b_{I_t}, or empty before the first full window.
std::optional<FailureRecord> detect_failure(const StallState& s, const AdversaryConstants& k,
                                            std::int64_t t, std::optional<std::int64_t> repeats);

std::int64_t far_coordinate_count(const StallState& s);

struct StallOptions {
  std::int64_t steps = 0;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  // Stop at the first statistical or construction failure (paper mode).
  bool stop_on_failure = true;
  std::int64_t samples = 1000;  // number of (t, f ratio, far count) samples
  std::int64_t check_interval = std::int64_t{1} << 16;
  schedule::Trace* trace = nullptr;
};

struct Sample {
  std::int64_t t = 0;
  double f_ratio = 0.0;
  std::int64_t far_count = 0;
};

struct StallReport {
  std::int64_t steps_requested = 0;
  std::int64_t steps_run = 0;
  std::optional<FailureRecord> first_failure;
  std::vector<FailureRecord> failures;  // first occurrence of each type
  std::int64_t failure_steps = 0;       // steps at which some failure condition held
  std::optional<std::int64_t> first_construction_failure;
  std::int64_t construction_failures = 0;
  std::int64_t value_set_violations = 0;
  std::int64_t invariant1_violations = 0;
  std::int64_t invariant5_violations = 0;
  std::int64_t min_available_increasing = -1;
  std::int64_t min_available_decreasing = -1;
  std::int64_t fast_updates = 0;
  std::int64_t slow_updates = 0;
  std::int64_t moving_updates = 0;
  std::int64_t max_reads = 0;
  double mean_reads = 0.0;
  double min_f_ratio = 1.0;
  double final_f_ratio = 1.0;
  std::int64_t far_count_final = 0;
  double far_count_mean = 0.0;
  double max_recount_drift = 0.0;
  std::int64_t recount_mismatches = 0;  // checkpoints with drift above 1e-9
  std::int64_t max_abs_ideal_gap = 0;   // max |u-hat - d-hat|
  double max_abs_delta_sum = 0.0;
  std::vector<Sample> samples;

  bool stalled() const { return !first_failure && construction_failures == 0; }
};

// Drives the construction for opts.steps updates. Requires lmax_scale = 1 and
// constants derived for the same n, eps and gamma.
StallReport run_stall_experiment(const objective::Params& p, const AdversaryConstants& k,
                                 const StallOptions& opts);

}  // namespace acd::adversary
