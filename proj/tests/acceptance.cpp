// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.
// Usage: acceptance [criterion numbers...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "acd/adversary.hpp"
#include "acd/objective.hpp"
#include "acd/replay.hpp"
#include "acd/rng.hpp"
#include "acd/schedule.hpp"
#include "acd/sequential.hpp"
#include "acd/stats.hpp"
#include "acd/walks.hpp"

using namespace acd;

namespace {

constexpr double kEps = 1.0 / 18.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double limit_s;
  std::function<Outcome()> body;
};

unsigned threads() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome lipschitz_closed_forms() {
  CounterRng rng(101, 0, Stream::lipschitz);
  double worst_rel = 0.0, worst_identity = 0.0;
  bool above = false;
  for (int c = 0; c < 50; ++c) {
    objective::Params p;
    p.n = 2 * (1 + static_cast<std::int64_t>(rng.below(16)));
    p.eps = rng.uniform(0.0, 0.99);
    const auto exact = objective::lipschitz_parameters(p);
    const auto est = objective::sampled_lipschitz_oracle(p, 10'000, 7 + c);
    const double slack = 1e-12;
    for (auto [e, x] : {std::pair{est.lmax, exact.lmax}, {est.lres, exact.lres}, {est.lresbar, exact.lresbar}}) {
      if (e > x * (1.0 + slack)) above = true;
      worst_rel = std::max(worst_rel, (x - e) / x);
    }
    const double identity = 1.0 + (static_cast<double>(p.n) - 1.0) * p.eps * p.eps;
    worst_identity = std::max(worst_identity, std::abs(exact.lresbar * exact.lresbar - identity));
  }
  return {!above && worst_rel <= 0.01 && worst_identity <= 1e-12,
          fmt("estimates above closed form: %s, worst shortfall %.2e, identity error %.1e", above ? "yes" : "no",
              worst_rel, worst_identity)};
}

Outcome gradient_correctness() {
  CounterRng rng(202, 0, Stream::state);
  double worst = 0.0;
  for (int c = 0; c < 1000; ++c) {
    objective::Params p;
    p.n = 2 * (1 + static_cast<std::int64_t>(rng.below(32)));
    p.eps = rng.uniform(0.0, 0.99);
    p.lmax_scale = rng.uniform(0.5, 4.0);
    std::vector<double> x(static_cast<std::size_t>(p.n));
    for (auto& v : x) v = rng.uniform(-2.0, 2.0);
    const auto j = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(p.n)));
    const double h = 1e-5;
    auto xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const double fd = (objective::eval(p, xp) - objective::eval(p, xm)) / (2.0 * h);
    const double g = objective::partial_gradient(p, x, j);
    worst = std::max(worst, std::abs(g - fd) / std::max(1.0, std::abs(g)));
  }
  return {worst <= 1e-6, fmt("worst relative error %.2e over 1000 cases", worst)};
}

Outcome strong_convexity() {
  CounterRng rng(303, 0, Stream::state);
  double worst = std::numeric_limits<double>::infinity();
  for (int c = 0; c < 10'000; ++c) {
    objective::Params p{16, rng.uniform(0.0, 0.99), 1.0, rng.uniform(0.5, 4.0)};
    std::vector<double> x(16), y(16);
    for (auto& v : x) v = rng.uniform(-3.0, 3.0);
    for (auto& v : y) v = rng.uniform(-3.0, 3.0);
    worst = std::min(worst, objective::strong_convexity_residual(p, x, y));
  }
  return {worst >= -1e-9, fmt("smallest residual %.2e over 10^4 pairs", worst)};
}

Outcome sequential_sandwich() {
  const objective::Params p{100, kEps, 1.0, 1.0};
  const auto mc = sequential::monte_carlo_sequential(p, 200, 2000, 404, threads());
  const auto v = sequential::check_sandwich(p, mc, 4.0);
  return {v.sandwich_ok && v.expected_sum_ok,
          fmt("sandwich %s (first violation %lld), sum %s (worst |z| %.2f)", v.sandwich_ok ? "ok" : "violated",
              static_cast<long long>(v.first_sandwich_violation), v.expected_sum_ok ? "ok" : "violated",
              v.worst_sum_z)};
}

Outcome y_walk_tail() {
  walks::YWalk w;
  double worst_tail = -1.0, worst_mono = -1.0, worst_total = 0.0;
  std::int64_t bad = -1;
  for (std::int64_t t = 0; t <= 20'000; ++t) {
    const auto& d = w.current();
    const auto tail = walks::y_walk_tail_check(d, 60);
    const auto mono = walks::y_walk_monotonicity_check(d);
    worst_tail = std::max(worst_tail, tail.worst_margin);
    worst_mono = std::max(worst_mono, mono.worst_margin);
    worst_total = std::max(worst_total, std::abs(d.total() - 1.0));
    if ((!tail.ok || !mono.ok) && bad < 0) bad = t;
    w.advance();
  }
  return {bad < 0 && worst_total <= 1e-12,
          fmt("even times 0..40000: worst tail margin %.2e, worst monotonicity margin %.2e, |mass - 1| %.1e", worst_tail,
              worst_mono, worst_total)};
}

Outcome r_walk_tail() {
  const std::int64_t steps = 10'000;
  bool ok = true;
  double worst = -1.0;
  std::string bad;
  for (const std::string kind : {"all-0", "all-1", "alternating", "random"}) {
    CounterRng rng(505, 0, Stream::walk);
    walks::RWalk w;
    for (std::int64_t t = 0; t <= steps; ++t) {
      const auto r = walks::r_walk_tail_check(w.current(), 120);
      worst = std::max(worst, r.worst_margin);
      if (!r.ok && bad.empty()) bad = kind;
      ok = ok && r.ok && std::abs(w.current().total() - 1.0) <= 1e-12;
      double a = 0.0;
      if (kind == "all-1") a = 1.0;
      if (kind == "alternating") a = t % 2 ? 1.0 : 0.0;
      if (kind == "random") a = rng.uniform();
      w.advance(a);
    }
  }
  return {ok, fmt("four driving sequences, worst margin %.2e%s", worst, bad.empty() ? "" : (" first bad: " + bad).c_str())};
}

Outcome coupling_dominance() {
  std::int64_t violations = 0;
  std::string rows;
  for (auto pol : {walks::S2Policy::zeros, walks::S2Policy::random_nonpositive, walks::S2Policy::adversary_replay}) {
    const auto r = walks::coupling_monte_carlo(100'000, 500, 606, pol, threads());
    violations += r.violations;
    rows += fmt(" %s=%lld", walks::to_string(pol), static_cast<long long>(r.violations));
  }
  return {violations == 0, "10^5 trials per policy, violations:" + rows};
}

Outcome reappearing() {
  const std::vector<double> gammas{4, 5, 6, 7, 8};
  const auto r = walks::reappearing_char_mc(10'000, 100, gammas, 1'000'000, 707, threads());
  std::string rows;
  for (const auto& row : r.rows) rows += fmt(" g=%g:%.2e<=%.2e", row.gamma, row.empirical, row.bound + 4.0 * row.se);
  return {r.ok(), "10^6 trials," + rows};
}

adversary::StallReport stall(std::int64_t n, const adversary::AdversaryConstants& k, std::int64_t steps,
                             std::uint64_t seed, schedule::Trace* trace = nullptr) {
  adversary::StallOptions o;
  o.steps = steps;
  o.seed = seed;
  o.stop_on_failure = false;
  o.trace = trace;
  return adversary::run_stall_experiment({n, kEps, 1.0, 1.0}, k, o);
}

// Smallest multiple of 10^6 satisfying the paper-mode side conditions.
constexpr std::int64_t kPaperN = 4'000'000;

Outcome full_stall_run() {
  const auto k = adversary::derive_constants({kPaperN, kEps, 1.0, 1.0, adversary::Mode::paper, {}});
  bool ok = true;
  std::string detail = fmt("n=%lld qbar=%lld;", static_cast<long long>(kPaperN), static_cast<long long>(k.qbar));
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto r = stall(kPaperN, k, kPaperN, seed);
    const bool stat = !r.first_failure.has_value();
    const bool seed_ok = stat && r.construction_failures == 0 && r.value_set_violations == 0 && r.min_f_ratio >= 0.25;
    ok = ok && seed_ok;
    detail += fmt(" seed %llu: %s", static_cast<unsigned long long>(seed), seed_ok ? "ok" : "bad");
    if (r.first_failure)
      detail += fmt(" [%s failure at t=%lld, measured %.1f > %.2f]", adversary::to_string(r.first_failure->type),
                    static_cast<long long>(r.first_failure->time), r.first_failure->measured, r.first_failure->bound);
    detail += fmt(" cf=%lld vs=%lld minf=%.3f;", static_cast<long long>(r.construction_failures),
                  static_cast<long long>(r.value_set_violations), r.min_f_ratio);
  }
  RunningStats far;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) far.add(static_cast<double>(stall(kPaperN, k, 100'000, seed).far_count_final));
  const double floor = kPaperN / 2.0 - 1.0 - 4.0 * far.standard_error();
  const bool far_ok = far.mean() >= floor;
  detail += fmt(" far count over 20 seeds at T=1e5: %.1f >= %.1f %s", far.mean(), floor, far_ok ? "ok" : "bad");
  return {ok && far_ok, detail};
}

std::int64_t out_of_window_source(const schedule::TraceIndex& idx, std::int64_t t, const schedule::ReadSource& rd) {
  const auto legal = schedule::legal_read_sources(idx, t, rd.coord);
  if (!legal.contains(0)) return 0;
  for (auto u : idx.updates_to(rd.coord))
    if (!legal.contains(u)) return u;
  // No other update to this coordinate exists; take one long committed.
  return std::max<std::int64_t>(1, t - idx.trace().header.qbar);
}

Outcome trace_legality() {
  const auto k = adversary::derive_constants({kPaperN, kEps, 1.0, 1.0, adversary::Mode::paper, {}});
  schedule::Trace tr;
  stall(kPaperN, k, 100'000, 1, &tr);
  const auto qb = schedule::validate_q_bounded(tr, k.qbar);
  const auto reads = schedule::validate_reads(tr);
  std::vector<std::int64_t> with_reads;
  for (const auto& e : tr.events)
    if (!e.reads.reads.empty()) with_reads.push_back(e.update.index);
  int tried = 0, caught = 0;
  if (!with_reads.empty()) {
    const schedule::TraceIndex idx(tr);
    CounterRng rng(808, 0, Stream::state);
    for (int m = 0; m < 20; ++m) {
      const auto t = with_reads[rng.below(with_reads.size())];
      auto& rds = tr.events[t - 1].reads.reads;
      auto& rd = rds[rng.below(rds.size())];
      const auto saved = rd.source;
      rd.source = out_of_window_source(idx, t, rd);
      ++tried;
      caught += !schedule::validate_reads(tr).ok;
      rd.source = saved;
    }
  }
  return {qb.ok && reads.ok && tried > 0 && caught == tried,
          fmt("1e5-step paper-mode trace: q-bounded %s (max overlap %lld), reads %s (%lld checked); %d/%d mutations caught",
              qb.ok ? "ok" : "bad", static_cast<long long>(qb.max_overlap), reads.ok ? "ok" : "bad",
              static_cast<long long>(reads.checked), caught, tried)};
}

Outcome oracle_equivalence() {
  const auto k = adversary::derive_constants({256, kEps, 1.0, 1.0, adversary::Mode::explore, 256});
  schedule::Trace tr;
  const auto r = stall(256, k, 10'000, 1, &tr);
  const auto rp = replay::replay_trace(tr, 1e-9);
  return {rp.ok && rp.events == 10'000,
          fmt("%lld events replayed, max abs diff %.2e, max rel diff %.2e (engine saw %lld construction failures)",
              static_cast<long long>(rp.events), rp.max_abs_diff, rp.max_rel_diff,
              static_cast<long long>(r.construction_failures))};
}

Outcome contrast() {
  const std::int64_t n = 256, steps = 10'000;
  const objective::Params p{n, kEps, 1.0, 1.0};
  const auto seq = sequential::run_sequential(p, steps, 1);
  const double f0 = objective::eval(p, objective::initial_point(n));
  const double seq_final = seq.f_values.back() / f0;
  const auto k = adversary::derive_constants({n, kEps, 1.0, 1.0, adversary::Mode::explore, 256});
  const auto adv = stall(n, k, steps, 1);
  const bool stat_failed = adv.first_failure.has_value();

  std::ofstream csv("acceptance_contrast.csv");
  csv << "t,sequential_f_ratio,adversarial_f_ratio\n";
  for (const auto& s : adv.samples) csv << s.t << ',' << seq.f_values[s.t] / f0 << ',' << s.f_ratio << '\n';

  const bool seq_ok = seq_final < 0.01;
  const bool adv_ok = stat_failed || adv.min_f_ratio >= 0.2;
  return {seq_ok && adv_ok,
          fmt("sequential f/f0 at T: %.2e; adversarial min f/f0 %.3f, final %.3g, statistical failure %s; curves in "
              "acceptance_contrast.csv",
              seq_final, adv.min_f_ratio, adv.final_f_ratio,
              stat_failed ? fmt("at t=%lld (bound waived)", static_cast<long long>(adv.first_failure->time)).c_str()
                          : "none")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "lipschitz closed forms", 10, lipschitz_closed_forms},
      {2, "gradient correctness", 5, gradient_correctness},
      {3, "strong convexity", 5, strong_convexity},
      {4, "sequential sandwich", 60, sequential_sandwich},
      {5, "y-walk tail bound", 30, y_walk_tail},
      {6, "r-walk tail bound", 30, r_walk_tail},
      {7, "coupling dominance", 60, coupling_dominance},
      {8, "reappearing coordinates", 120, reappearing},
      {9, "full stall run", 600, full_stall_run},
      {10, "trace legality", 60, trace_legality},
      {11, "oracle equivalence", 60, oracle_equivalence},
      {12, "contrast experiment", 60, contrast},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::cout << "criterion " << c.id << ": " << (pass ? "PASS" : "FAIL") << "  " << c.title << "  (" << o.detail
              << "; " << fmt("%.1f s, limit %.0f s%s", secs, c.limit_s, in_time ? "" : ", over time") << ")"
              << std::endl;
  }
  std::cout << (failed ? "FAILED " : "PASSED ") << failed << " failing criteria" << std::endl;
  return failed ? 1 : 0;
}
