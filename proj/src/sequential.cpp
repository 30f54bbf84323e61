#include "acd/sequential.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "acd/errors.hpp"
#include "acd/parallel.hpp"
#include "acd/rng.hpp"
#include "acd/stats.hpp"

namespace acd::sequential {

namespace {

constexpr std::int64_t kTrialsPerBlock = 16;

// Coordinates in C1 (initial value +1) have odd zero-based index.
bool in_c1(std::int64_t j) { return j % 2 == 1; }

class SumState {
 public:
  explicit SumState(const objective::Params& p) : p_(p), x_(objective::initial_point(p.n)) {
    recompute();
  }

  void step(std::int64_t j) {
    auto& xj = x_[static_cast<std::size_t>(j)];
    const double g = objective::partial_gradient_from_sum(p_, xj, sum_);
    const double next = xj - g / p_.gamma;
    const double d = next - xj;
    sum_ += d;
    sum_sq_ += next * next - xj * xj;
    if (in_c1(j)) {
      s1_ += d;
    } else {
      sm1_ -= d;
    }
    xj = next;
    if (++since_recompute_ == kRecomputeInterval) recompute();
  }

  void record(Trajectory& t) const {
    t.f_values.push_back(objective::eval_from_sums(p_, sum_sq_, sum_));
    t.s1_values.push_back(s1_);
    t.sm1_values.push_back(sm1_);
    t.s_values.push_back(s1_ + sm1_);
  }

 private:
  void recompute() {
    CompensatedSum sum, sq, s1, sm1;
    for (std::size_t j = 0; j < x_.size(); ++j) {
      const double v = x_[j];
      sum.add(v);
      sq.add(v * v);
      if (in_c1(static_cast<std::int64_t>(j))) {
        s1.add(v);
      } else {
        sm1.add(-v);
      }
    }
    sum_ = sum.value();
    sum_sq_ = sq.value();
    s1_ = s1.value();
    sm1_ = sm1.value();
    since_recompute_ = 0;
  }

  const objective::Params& p_;
  objective::Point x_;
  double sum_ = 0.0, sum_sq_ = 0.0, s1_ = 0.0, sm1_ = 0.0;
  std::int64_t since_recompute_ = 0;
};

void reserve(Trajectory& t, std::int64_t steps) {
  const auto len = static_cast<std::size_t>(steps + 1);
  t.f_values.reserve(len);
  t.s_values.reserve(len);
  t.s1_values.reserve(len);
  t.sm1_values.reserve(len);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::int64_t coordinate_at(std::int64_t n, std::uint64_t seed, std::uint64_t trial,
                           std::int64_t t) {
  const CounterRng rng(seed, trial, Stream::coordinates);
  return static_cast<std::int64_t>(
      CounterRng::below_from(rng.at(static_cast<std::uint64_t>(t)), static_cast<std::uint64_t>(n)));
}

Trajectory run_sequential(const objective::Params& p, std::int64_t steps,
                          std::uint64_t seed, std::uint64_t trial) {
  objective::validate(p);
  if (steps < 0) throw PreconditionError("steps must be non-negative");
  Trajectory traj;
  reserve(traj, steps);
  SumState state(p);
  state.record(traj);
  for (std::int64_t t = 1; t <= steps; ++t) {
    state.step(coordinate_at(p.n, seed, trial, t));
    state.record(traj);
  }
  return traj;
}

Trajectory run_with_choices(const objective::Params& p,
                            std::span<const std::int64_t> coords) {
  objective::validate(p);
  Trajectory traj;
  reserve(traj, static_cast<std::int64_t>(coords.size()));
  SumState state(p);
  state.record(traj);
  for (auto j : coords) {
    if (j < 0 || j >= p.n) throw PreconditionError("coordinate out of range");
    state.step(j);
    state.record(traj);
  }
  return traj;
}

std::vector<double> expected_sum_curve(const objective::Params& p, std::int64_t steps) {
  const double n = static_cast<double>(p.n);
  const double base = 1.0 - p.lmax_scale * (1.0 - p.eps) / (n * p.gamma);
  std::vector<double> out(static_cast<std::size_t>(steps + 1));
  for (std::int64_t t = 0; t <= steps; ++t) {
    out[static_cast<std::size_t>(t)] = n * std::pow(base, static_cast<double>(t));
  }
  return out;
}

Bounds rate_bounds(const objective::Params& p, std::int64_t steps) {
  const double n = static_cast<double>(p.n);
  const double mu = objective::lipschitz_parameters(p).mu;
  const double f0 = objective::eval(p, objective::initial_point(p.n));
  const double lo = 1.0 - 2.0 * mu / (n * p.gamma);
  const double hi = 1.0 - mu / (3.0 * n * p.gamma);
  Bounds b;
  b.lower.resize(static_cast<std::size_t>(steps + 1));
  b.upper.resize(static_cast<std::size_t>(steps + 1));
  for (std::int64_t t = 0; t <= steps; ++t) {
    const auto i = static_cast<std::size_t>(t);
    b.lower[i] = std::pow(lo, static_cast<double>(t)) * f0;
    b.upper[i] = std::pow(hi, static_cast<double>(t)) * f0;
  }
  return b;
}

MeanTrajectory monte_carlo_sequential(const objective::Params& p, std::int64_t trials,
                                      std::int64_t steps, std::uint64_t seed,
                                      unsigned threads) {
  objective::validate(p);
  if (trials < 2) throw PreconditionError("monte carlo needs at least 2 trials for a standard error");
  if (steps < 0) throw PreconditionError("steps must be non-negative");

  const auto len = static_cast<std::size_t>(steps + 1);
  struct Block {
    std::vector<RunningStats> f, s, s1, sm1;
  };
  const auto blocks = static_cast<std::size_t>((trials + kTrialsPerBlock - 1) / kTrialsPerBlock);
  std::vector<Block> partial(blocks);

  parallel_for(blocks, threads, [&](std::size_t b) {
    Block& blk = partial[b];
    blk.f.resize(len);
    blk.s.resize(len);
    blk.s1.resize(len);
    blk.sm1.resize(len);
    const std::int64_t first = static_cast<std::int64_t>(b) * kTrialsPerBlock;
    const std::int64_t last = std::min(trials, first + kTrialsPerBlock);
    for (std::int64_t trial = first; trial < last; ++trial) {
      const auto traj = run_sequential(p, steps, seed, static_cast<std::uint64_t>(trial));
      for (std::size_t t = 0; t < len; ++t) {
        blk.f[t].add(traj.f_values[t]);
        blk.s[t].add(traj.s_values[t]);
        blk.s1[t].add(traj.s1_values[t]);
        blk.sm1[t].add(traj.sm1_values[t]);
      }
    }
  });

  Block total{std::vector<RunningStats>(len), std::vector<RunningStats>(len),
              std::vector<RunningStats>(len), std::vector<RunningStats>(len)};
  for (const auto& blk : partial) {
    for (std::size_t t = 0; t < len; ++t) {
      total.f[t].merge(blk.f[t]);
      total.s[t].merge(blk.s[t]);
      total.s1[t].merge(blk.s1[t]);
      total.sm1[t].merge(blk.sm1[t]);
    }
  }

  MeanTrajectory mc;
  mc.trials = trials;
  for (std::size_t t = 0; t < len; ++t) {
    mc.f_mean.push_back(total.f[t].mean());
    mc.f_se.push_back(total.f[t].standard_error());
    mc.s_mean.push_back(total.s[t].mean());
    mc.s_se.push_back(total.s[t].standard_error());
    mc.s1_mean.push_back(total.s1[t].mean());
    mc.sm1_mean.push_back(total.sm1[t].mean());
  }
  return mc;
}

SandwichVerdict check_sandwich(const objective::Params& p, const MeanTrajectory& mc,
                               double k_se) {
  const auto steps = static_cast<std::int64_t>(mc.f_mean.size()) - 1;
  const auto bounds = rate_bounds(p, steps);
  const auto expected = expected_sum_curve(p, steps);
  SandwichVerdict v;
  for (std::int64_t t = 0; t <= steps; ++t) {
    const auto i = static_cast<std::size_t>(t);
    // Relative floor for t = 0, where every trial is identical and SE = 0.
    const double f_slack = k_se * mc.f_se[i] + 1e-12 * bounds.upper[i];
    if (mc.f_mean[i] < bounds.lower[i] - f_slack || mc.f_mean[i] > bounds.upper[i] + f_slack) {
      if (v.sandwich_ok) v.first_sandwich_violation = t;
      v.sandwich_ok = false;
    }
    const double diff = std::abs(mc.s_mean[i] - expected[i]);
    if (mc.s_se[i] > 0.0) v.worst_sum_z = std::max(v.worst_sum_z, diff / mc.s_se[i]);
    if (diff > k_se * mc.s_se[i] + 1e-12 * expected[i]) {
      if (v.expected_sum_ok) v.first_sum_violation = t;
      v.expected_sum_ok = false;
    }
  }
  return v;
}

void write_csv(std::ostream& out, const objective::Params& p, const Trajectory& traj) {
  const auto steps = static_cast<std::int64_t>(traj.f_values.size()) - 1;
  const auto b = rate_bounds(p, steps);
  out << "t,f,S,S1,Sm1,lower_bound,upper_bound\n";
  for (std::int64_t t = 0; t <= steps; ++t) {
    const auto i = static_cast<std::size_t>(t);
    out << t << ',' << num(traj.f_values[i]) << ',' << num(traj.s_values[i]) << ','
        << num(traj.s1_values[i]) << ',' << num(traj.sm1_values[i]) << ',' << num(b.lower[i])
        << ',' << num(b.upper[i]) << '\n';
  }
}

void write_csv(std::ostream& out, const objective::Params& p, const MeanTrajectory& mc) {
  const auto steps = static_cast<std::int64_t>(mc.f_mean.size()) - 1;
  const auto b = rate_bounds(p, steps);
  const auto e = expected_sum_curve(p, steps);
  out << "t,f,S,S1,Sm1,lower_bound,upper_bound,f_se,S_se,S_expected\n";
  for (std::int64_t t = 0; t <= steps; ++t) {
    const auto i = static_cast<std::size_t>(t);
    out << t << ',' << num(mc.f_mean[i]) << ',' << num(mc.s_mean[i]) << ','
        << num(mc.s1_mean[i]) << ',' << num(mc.sm1_mean[i]) << ',' << num(b.lower[i]) << ','
        << num(b.upper[i]) << ',' << num(mc.f_se[i]) << ',' << num(mc.s_se[i]) << ','
        << num(e[i]) << '\n';
  }
}

}  // namespace acd::sequential
