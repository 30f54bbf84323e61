#include "acd/walks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "acd/errors.hpp"
#include "acd/parallel.hpp"
#include "acd/rng.hpp"
#include "acd/stats.hpp"

namespace acd::walks {

namespace {

constexpr std::int64_t kTrialsPerBlock = 16;

void check_c_max(int c_max) {
  if (c_max < 8) throw PreconditionError("c_max must be at least 8");
}

WalkDistribution point_mass(int c_max, std::int64_t at) {
  WalkDistribution d;
  d.masses.assign(static_cast<std::size_t>(c_max) + 1, 0.0);
  d.masses[static_cast<std::size_t>(at)] = 1.0;
  return d;
}

// Adds m at position c, or to the lost ledger past the end.
void deposit(std::vector<double>& v, double& lost, std::int64_t c, double m) {
  if (c >= static_cast<std::int64_t>(v.size())) {
    lost += m;
  } else {
    v[static_cast<std::size_t>(c)] += m;
  }
}

template <class Body>
void for_blocks(std::int64_t trials, unsigned threads, Body&& body) {
  const auto blocks = static_cast<std::size_t>((trials + kTrialsPerBlock - 1) / kTrialsPerBlock);
  parallel_for(blocks, threads, [&](std::size_t b) {
    const std::int64_t first = static_cast<std::int64_t>(b) * kTrialsPerBlock;
    body(b, first, std::min(trials, first + kTrialsPerBlock));
  });
}

}  // namespace

double WalkDistribution::at(std::int64_t c) const {
  if (c < 0 || c >= static_cast<std::int64_t>(masses.size())) return 0.0;
  return masses[static_cast<std::size_t>(c)];
}

double WalkDistribution::tail(std::int64_t c) const {
  double s = lost;
  for (auto i = static_cast<std::size_t>(std::max<std::int64_t>(c, 0)); i < masses.size(); ++i) s += masses[i];
  return s;
}

double WalkDistribution::total() const {
  CompensatedSum s;
  for (double m : masses) s.add(m);
  s.add(lost);
  return s.value();
}

YWalk::YWalk(int c_max) {
  check_c_max(c_max);
  dist_ = point_mass(c_max, 0);
  next_.resize(dist_.masses.size());
}

void YWalk::advance() {
  const auto& p = dist_.masses;
  const auto size = static_cast<std::int64_t>(p.size());
  std::fill(next_.begin(), next_.end(), 0.0);
  double lost = dist_.lost;
  // Scatter form of the recurrences; every column sums to one.
  next_[0] += 0.5 * p[0];
  next_[1] += 0.5 * p[0];
  next_[0] += 0.5 * p[1];
  next_[1] += 0.25 * p[1];
  next_[2] += 0.25 * p[1];
  for (std::int64_t c = 2; c < size; ++c) {
    const double q = 0.25 * p[static_cast<std::size_t>(c)];
    if (q == 0.0) continue;
    next_[static_cast<std::size_t>(c - 2)] += q;
    next_[static_cast<std::size_t>(c - 1)] += q;
    next_[static_cast<std::size_t>(c)] += q;
    deposit(next_, lost, c + 1, q);
  }
  dist_.masses.swap(next_);
  dist_.lost = lost;
  dist_.time += 2;
}

WalkDistribution YWalk::half_step() const {
  WalkDistribution d;
  d.time = dist_.time + 1;
  d.masses.assign(dist_.masses.size(), 0.0);
  d.lost = dist_.lost;
  const auto size = static_cast<std::int64_t>(dist_.masses.size());
  deposit(d.masses, d.lost, 1, dist_.masses[0]);
  for (std::int64_t c = 1; c < size; ++c) {
    const double q = 0.5 * dist_.masses[static_cast<std::size_t>(c)];
    d.masses[static_cast<std::size_t>(c - 1)] += q;
    deposit(d.masses, d.lost, c + 1, q);
  }
  return d;
}

std::vector<WalkDistribution> y_walk_distribution(std::int64_t t_half, int c_max) {
  if (t_half < 0) throw PreconditionError("t_half must be non-negative");
  YWalk w(c_max);
  std::vector<WalkDistribution> out;
  out.reserve(static_cast<std::size_t>(t_half) + 1);
  out.push_back(w.current());
  for (std::int64_t i = 0; i < t_half; ++i) {
    w.advance();
    out.push_back(w.current());
  }
  return out;
}

namespace {

void note(BoundReport& r, std::int64_t pos, double margin, double tol) {
  r.worst_margin = std::max(r.worst_margin, margin);
  if (margin > tol && r.ok) {
    r.ok = false;
    r.first_bad = pos;
  }
}

}  // namespace

BoundReport y_walk_monotonicity_check(const WalkDistribution& d, double tol) {
  BoundReport r;
  r.time = d.time;
  r.worst_margin = -1.0;
  note(r, 0, d.at(1) - d.at(0), tol);
  for (std::int64_t c = 1; c + 1 < static_cast<std::int64_t>(d.masses.size()); ++c) {
    note(r, c, 2.0 * d.at(c + 1) - d.at(c), tol);
  }
  return r;
}

BoundReport y_walk_tail_check(const WalkDistribution& d, int c_limit, double tol) {
  BoundReport r;
  r.time = d.time;
  r.worst_margin = -1.0;
  for (int c = 1; c <= c_limit; ++c) note(r, c, d.at(c) + d.lost - std::ldexp(1.0, -c), tol);
  return r;
}

BoundReport y_walk_odd_tail_check(const WalkDistribution& d, int c_limit, double tol) {
  BoundReport r;
  r.time = d.time;
  r.worst_margin = -1.0;
  for (int c = 1; c <= c_limit; ++c) note(r, c, d.tail(c + 1) - std::ldexp(1.0, -c), tol);
  return r;
}

RWalk::RWalk(int c_max) {
  check_c_max(c_max);
  dist_ = point_mass(c_max, kFloor);
  next_.resize(dist_.masses.size());
}

void RWalk::advance(double a) {
  if (!(a >= 0.0 && a <= 1.0)) throw PreconditionError("a must lie in [0, 1]");
  const auto& p = dist_.masses;
  const auto size = static_cast<std::int64_t>(p.size());
  std::fill(next_.begin(), next_.end(), 0.0);
  double lost = dist_.lost;
  auto put = [&](std::int64_t i, double m) { deposit(next_, lost, std::max<std::int64_t>(i, kFloor), m); };
  for (std::int64_t i = kFloor; i < size; ++i) {
    const double m = p[static_cast<std::size_t>(i)];
    if (m == 0.0) continue;
    put(i + 1, 0.6 * a * m);
    put(i - 4, 0.4 * a * m);
    put(i - 2, (1.0 - a) * m);
  }
  dist_.masses.swap(next_);
  dist_.lost = lost;
  dist_.time += 1;
}

std::vector<WalkDistribution> r_walk_distribution(std::int64_t steps, std::span<const double> a_seq, int c_max) {
  if (steps < 0 || static_cast<std::int64_t>(a_seq.size()) < steps) {
    throw PreconditionError("a_seq must have at least `steps` entries");
  }
  RWalk w(c_max);
  std::vector<WalkDistribution> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(w.current());
  for (std::int64_t t = 0; t < steps; ++t) {
    w.advance(a_seq[static_cast<std::size_t>(t)]);
    out.push_back(w.current());
  }
  return out;
}

BoundReport r_walk_tail_check(const WalkDistribution& d, int i_limit, double tol) {
  BoundReport r;
  r.time = d.time;
  r.worst_margin = -1.0;
  for (int i = RWalk::kFloor; i <= i_limit; ++i) {
    const double bound = std::pow(2.0 / 3.0, i - RWalk::kFloor);
    note(r, i, d.at(i) + d.lost - bound, tol);
    note(r, i, d.tail(i) - 3.0 * bound, tol);
  }
  return r;
}

const char* to_string(S2Policy p) {
  switch (p) {
    case S2Policy::zeros: return "zeros";
    case S2Policy::random_nonpositive: return "random_nonpositive";
    case S2Policy::adversary_replay: return "adversary_replay";
  }
  return "?";
}

S2Policy parse_s2_policy(const std::string& s) {
  if (s == "zeros") return S2Policy::zeros;
  if (s == "random_nonpositive") return S2Policy::random_nonpositive;
  if (s == "adversary_replay") return S2Policy::adversary_replay;
  throw PreconditionError("unknown s2 policy '" + s + "'");
}

namespace {

// Rules (A)/(B) on the up count alone. Returns the new up count.
std::int64_t balance_step(std::int64_t up, std::int64_t n, std::int64_t t, CounterRng& rng) {
  const bool chose_up = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n))) < up;
  const std::int64_t down = n - up;
  if (t % 2 == 1 || (up > down && chose_up) || (up < down && !chose_up)) return chose_up ? up - 1 : up + 1;
  return up;
}

// Runs one coupled trial; fills `path` when given. Returns (violations, max y).
std::pair<std::int64_t, std::int64_t> run_coupled(std::int64_t t_half, std::uint64_t seed, S2Policy policy,
                                                  std::uint64_t trial, std::int64_t replay_n,
                                                  CoupledPath* path) {
  CounterRng r1(seed, trial, Stream::coupling_s1);
  CounterRng r2(seed, trial, Stream::coupling_s2);
  std::int64_t x = 0, y = 0, violations = 0, max_y = 0;
  std::int64_t up = replay_n / 2;  // real balance walk for adversary_replay
  auto gap = [&] { return std::abs(2 * up - replay_n) / 2; };
  if (path) {
    path->x_path.assign(1, 0);
    path->y_path.assign(1, 0);
    path->s1.clear();
    path->s2.clear();
  }
  for (std::int64_t t = 1; t <= t_half; ++t) {
    const std::int64_t s1 = 1 - static_cast<std::int64_t>(r1.below(4));
    std::int64_t s2 = 0;
    if (policy == S2Policy::random_nonpositive) {
      s2 = -static_cast<std::int64_t>(r2.below(3));
    } else if (policy == S2Policy::adversary_replay) {
      const std::int64_t before = gap();
      up = balance_step(up, replay_n, 2 * t - 1, r2);
      up = balance_step(up, replay_n, 2 * t, r2);
      s2 = std::min<std::int64_t>(0, gap() - before - s1);
    }
    y = std::max<std::int64_t>(y + s1, 0);
    x = std::max<std::int64_t>(std::max<std::int64_t>(x + s1, 0) + s2, 0);
    if (x > y) ++violations;
    max_y = std::max(max_y, y);
    if (path) {
      path->s1.push_back(s1);
      path->s2.push_back(s2);
      path->x_path.push_back(x);
      path->y_path.push_back(y);
    }
  }
  return {violations, max_y};
}

}  // namespace

CoupledPath coupled_walk_trial(std::int64_t t_half, std::uint64_t seed, S2Policy policy, std::uint64_t trial,
                               std::int64_t replay_n) {
  if (t_half < 1) throw PreconditionError("t_half must be positive");
  if (replay_n < 2 || replay_n % 2 != 0) throw PreconditionError("replay_n must be even and at least 2");
  CoupledPath path;
  run_coupled(t_half, seed, policy, trial, replay_n, &path);
  return path;
}

std::int64_t coupling_violations(const CoupledPath& path) {
  for (auto s : path.s2) {
    if (s > 0) throw PreconditionError("s2 terms must be non-positive");
  }
  std::int64_t v = 0;
  for (std::size_t i = 0; i < path.x_path.size(); ++i) v += path.x_path[i] > path.y_path[i] ? 1 : 0;
  return v;
}

CouplingReport coupling_monte_carlo(std::int64_t trials, std::int64_t t_half, std::uint64_t seed,
                                    S2Policy policy, unsigned threads) {
  if (trials < 1 || t_half < 1) throw PreconditionError("trials and t_half must be positive");
  const auto blocks = static_cast<std::size_t>((trials + kTrialsPerBlock - 1) / kTrialsPerBlock);
  std::vector<CouplingReport> part(blocks);
  for_blocks(trials, threads, [&](std::size_t b, std::int64_t first, std::int64_t last) {
    for (std::int64_t i = first; i < last; ++i) {
      const auto [v, my] = run_coupled(t_half, seed, policy, static_cast<std::uint64_t>(i), 64, nullptr);
      part[b].violations += v > 0 ? 1 : 0;
      part[b].max_y = std::max(part[b].max_y, my);
    }
  });
  CouplingReport out;
  out.trials = trials;
  for (const auto& p : part) {
    out.violations += p.violations;
    out.max_y = std::max(out.max_y, p.max_y);
  }
  return out;
}

TailEstimate x_walk_tail_estimate(std::int64_t n, double c, std::int64_t trials, std::uint64_t seed,
                                  std::int64_t horizon, unsigned threads) {
  if (n < 2 || n % 2 != 0) throw PreconditionError("n must be even and at least 2");
  if (!(c >= 1.0)) throw PreconditionError("c must be >= 1");
  if (trials < 1 || horizon < 1) throw PreconditionError("trials and horizon must be positive");
  TailEstimate e;
  e.n = n;
  e.c = c;
  e.b1 = 1.0 + std::log2(3.0) + 2.0 * c * std::log2(static_cast<double>(n));
  e.horizon = horizon;
  e.trials = trials;
  e.budget = std::pow(static_cast<double>(n), -2.0 * c) / 3.0;

  const auto blocks = static_cast<std::size_t>((trials + kTrialsPerBlock - 1) / kTrialsPerBlock);
  std::vector<std::pair<std::int64_t, std::int64_t>> part(blocks, {0, 0});
  for_blocks(trials, threads, [&](std::size_t b, std::int64_t first, std::int64_t last) {
    for (std::int64_t i = first; i < last; ++i) {
      CounterRng rng(seed, static_cast<std::uint64_t>(i), Stream::walk);
      std::int64_t up = n / 2, worst = 0;
      for (std::int64_t t = 1; t <= horizon; ++t) {
        up = balance_step(up, n, t, rng);
        worst = std::max(worst, std::abs(2 * up - n));
      }
      if (static_cast<double>(worst) > e.b1) ++part[b].first;
      part[b].second = std::max(part[b].second, worst);
    }
  });
  for (const auto& [hits, worst] : part) {
    e.exceedances += hits;
    e.max_gap = std::max(e.max_gap, worst);
  }
  e.p_hat = static_cast<double>(e.exceedances) / static_cast<double>(trials);
  const auto ci = wilson_interval(e.exceedances, trials, 1.96);
  e.lo = ci.lo;
  e.hi = ci.hi;
  e.ok = e.hi <= 10.0 * e.budget;
  return e;
}

std::int64_t count_reappearing(std::span<const std::int64_t> s) {
  std::vector<std::int64_t> sorted(s.begin(), s.end());
  std::sort(sorted.begin(), sorted.end());
  const auto distinct = std::unique(sorted.begin(), sorted.end()) - sorted.begin();
  return static_cast<std::int64_t>(s.size()) - distinct;
}

bool ReappearingReport::ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const ReappearingRow& r) { return r.ok; });
}

ReappearingReport reappearing_char_mc(std::int64_t n, std::int64_t length, std::span<const double> gammas,
                                      std::int64_t trials, std::uint64_t seed, unsigned threads) {
  if (n < 9) throw PreconditionError("n must be at least 9");
  if (length < 1 || static_cast<double>(length) > std::sqrt(static_cast<double>(n))) {
    throw PreconditionError("string length must satisfy 1 <= length <= sqrt(n)");
  }
  for (double g : gammas) {
    if (!(g >= 4.0)) throw PreconditionError("each gamma must be >= 4");
  }
  if (trials < 2) throw PreconditionError("trials must be at least 2");

  const auto blocks = static_cast<std::size_t>((trials + kTrialsPerBlock - 1) / kTrialsPerBlock);
  std::vector<std::vector<std::int64_t>> part(blocks, std::vector<std::int64_t>(gammas.size(), 0));
  for_blocks(trials, threads, [&](std::size_t b, std::int64_t first, std::int64_t last) {
    // stamp[j] == trial + 1 marks character j as seen in this trial.
    std::vector<std::int64_t> stamp(static_cast<std::size_t>(n), 0);
    for (std::int64_t i = first; i < last; ++i) {
      CounterRng rng(seed, static_cast<std::uint64_t>(i), Stream::reappearing);
      std::int64_t repeats = 0;
      for (std::int64_t k = 0; k < length; ++k) {
        auto& s = stamp[rng.below(static_cast<std::uint64_t>(n))];
        if (s == i + 1) {
          ++repeats;
        } else {
          s = i + 1;
        }
      }
      for (std::size_t g = 0; g < gammas.size(); ++g) {
        if (static_cast<double>(repeats) >= gammas[g] + 1.0) ++part[b][g];
      }
    }
  });

  ReappearingReport rep;
  rep.n = n;
  rep.length = length;
  rep.trials = trials;
  for (std::size_t g = 0; g < gammas.size(); ++g) {
    ReappearingRow row;
    row.gamma = gammas[g];
    for (const auto& p : part) row.hits += p[g];
    row.empirical = static_cast<double>(row.hits) / static_cast<double>(trials);
    row.se = proportion_standard_error(row.hits, trials);
    row.bound = std::exp(-row.gamma);
    row.ok = row.empirical <= row.bound + 4.0 * row.se;
    rep.rows.push_back(row);
  }
  return rep;
}

void write_csv(std::ostream& out, const std::vector<WalkDistribution>& dists) {
  char buf[96];
  out << "t,position,mass\n";
  for (const auto& d : dists) {
    for (std::size_t c = 0; c < d.masses.size(); ++c) {
      if (d.masses[c] == 0.0) continue;
      std::snprintf(buf, sizeof buf, "%lld,%zu,%.17g\n", static_cast<long long>(d.time), c, d.masses[c]);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%lld,lost,%.17g\n", static_cast<long long>(d.time), d.lost);
    out << buf;
  }
}

void write_csv(std::ostream& out, const ReappearingReport& r) {
  char buf[128];
  out << "gamma,empirical,bound,trials\n";
  for (const auto& row : r.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%lld\n", row.gamma, row.empirical, row.bound,
                  static_cast<long long>(r.trials));
    out << buf;
  }
}

}  // namespace acd::walks
