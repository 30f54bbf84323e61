#include "acd/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "acd/errors.hpp"
#include "acd/sequential.hpp"
#include "acd/stats.hpp"

namespace acd::adversary {

using schedule::UpdateClass;
using schedule::UpdateKind;

const char* to_string(FailureType f) {
  switch (f) {
    case FailureType::repeats: return "repeats";
    case FailureType::ideal_sum: return "ideal_sum";
    case FailureType::delta_sum: return "delta_sum";
  }
  return "?";
}

std::vector<UpdateClass> classify_initial_block(std::span<const std::int64_t> coords) {
  std::vector<UpdateClass> out;
  out.reserve(coords.size());
  std::unordered_set<std::int64_t> seen;
  for (auto j : coords) out.push_back(seen.insert(j).second ? UpdateClass::fast : UpdateClass::slow);
  return out;
}

StallState StallState::initial(std::int64_t n, double alpha, double nu) {
  StallState s;
  s.n = n;
  s.alpha = alpha;
  s.nu = nu;
  s.x = objective::initial_point(n);
  s.far.assign(static_cast<std::size_t>(n), 1);
  s.perturbed.assign(static_cast<std::size_t>(n), 0);
  s.up = n / 2;
  s.down = n / 2;
  s.far_count = n;
  s.sum_sq = static_cast<double>(n);
  return s;
}

double StallState::ideal(std::int64_t j) const {
  const double mag = far[static_cast<std::size_t>(j)] ? 1.0 : 1.0 - alpha;
  return in_c_plus(j) ? mag : -mag;
}

Recount recount(const StallState& s) {
  Recount r;
  CompensatedSum ideal, delta, sx, sq;
  for (std::int64_t j = 0; j < s.n; ++j) {
    const double v = s.x[static_cast<std::size_t>(j)];
    const double id = s.ideal(j);
    if (s.is_up(j)) {
      ++r.up;
    } else {
      ++r.down;
    }
    if (s.far[static_cast<std::size_t>(j)]) ++r.far_count;
    ideal.add(id);
    delta.add(v - id);
    sx.add(v);
    sq.add(v * v);
  }
  r.ideal_sum = ideal.value();
  r.delta_sum = delta.value();
  r.sum_x = sx.value();
  r.sum_sq = sq.value();
  return r;
}

Move decide_move(const StallState& s, std::int64_t t, std::int64_t k, bool fast) {
  if (fast || t % 2 == 1) return Move::moving;
  if (s.up == s.down) return Move::stay_still;
  if (s.up > s.down) return s.is_up(k) ? Move::moving : Move::stay_still;
  return s.is_up(k) ? Move::stay_still : Move::moving;
}

DeltaTarget decide_delta_sign(const StallState& s) {
  if (s.delta_sum >= 0.0) return {-s.nu, -2.0 * s.nu / 3.0, -1};
  return {2.0 * s.nu / 3.0, s.nu, 1};
}

double target_ideal(const StallState& s, std::int64_t k, Move move) {
  bool far = s.far[static_cast<std::size_t>(k)] != 0;
  if (move == Move::moving) far = !far;
  const double mag = far ? 1.0 : 1.0 - s.alpha;
  return StallState::in_c_plus(k) ? mag : -mag;
}

WriteResult apply_write(StallState& s, std::int64_t k, double value, Move move) {
  const auto j = static_cast<std::size_t>(k);
  WriteResult r;
  r.old_value = s.x[j];
  r.new_value = value;
  const double old_delta = s.delta(k);
  if (move == Move::moving) {
    const double old_ideal = s.ideal(k);
    const bool was_up = s.is_up(k);
    s.far[j] = s.far[j] ? 0 : 1;
    s.far_count += s.far[j] ? 1 : -1;
    if (was_up) {
      --s.up;
      ++s.down;
    } else {
      ++s.up;
      --s.down;
    }
    r.kind = s.ideal(k) > old_ideal ? UpdateKind::increasing : UpdateKind::decreasing;
  }
  s.x[j] = value;
  const double new_delta = s.delta(k);
  s.delta_sum += new_delta - old_delta;
  if (new_delta > 0.0) {
    s.perturbed[j] = 1;
  } else if (new_delta < 0.0) {
    s.perturbed[j] = -1;
  }
  s.sum_x += value - r.old_value;
  s.sum_sq += value * value - r.old_value * r.old_value;
  return r;
}

bool in_value_set(const StallState& s, std::int64_t k, double tol) {
  const double d = std::abs(s.delta(k));
  return d <= tol || (d >= 2.0 * s.nu / 3.0 - tol && d <= s.nu + tol);
}

std::optional<FailureRecord> detect_failure(const StallState& s, const AdversaryConstants& k,
                                            std::int64_t t, std::optional<std::int64_t> repeats) {
  if (repeats && static_cast<double>(*repeats) > k.b3) {
    return FailureRecord{t, FailureType::repeats, static_cast<double>(*repeats), k.b3};
  }
  const auto gap = std::abs(s.up - s.down);
  if (static_cast<double>(gap) > k.b1) {
    return FailureRecord{t, FailureType::ideal_sum, static_cast<double>(gap), k.b1};
  }
  if (std::abs(s.delta_sum) > k.nu * k.b2) {
    return FailureRecord{t, FailureType::delta_sum, std::abs(s.delta_sum), k.nu * k.b2};
  }
  return std::nullopt;
}

std::int64_t far_coordinate_count(const StallState& s) { return s.far_count; }

namespace {

struct Record {
  std::int64_t index = 0;
  std::int64_t coord = 0;
  double shift = 0.0;      // new value - previous value of the coordinate
  double old_value = 0.0;  // previous value in index order
  double new_value = 0.0;
  UpdateKind kind = UpdateKind::stay_still;
  std::int64_t next_same = 0;  // next in-window update to the same coordinate
};

// The most recent `block` updates, with per-coordinate first/last links so the
// available (first-in-window) update of each coordinate is known in O(1).
class Window {
 public:
  Window(std::int64_t n, std::int64_t block)
      : block_(block),
        ring_(static_cast<std::size_t>(block)),
        first_(static_cast<std::size_t>(n), 0),
        last_(static_cast<std::size_t>(n), 0) {}

  const Record& at(std::int64_t v) const { return ring_[static_cast<std::size_t>(v % block_)]; }
  Record& at(std::int64_t v) { return ring_[static_cast<std::size_t>(v % block_)]; }
  std::int64_t first(std::int64_t j) const { return first_[static_cast<std::size_t>(j)]; }
  std::int64_t distinct() const { return distinct_; }
  std::int64_t increasing() const { return available_[0]; }
  std::int64_t decreasing() const { return available_[1]; }

  void push(Record rec) {
    const auto j = static_cast<std::size_t>(rec.coord);
    rec.next_same = 0;
    const auto v = rec.index;
    if (last_[j] != 0) {
      at(last_[j]).next_same = v;
      last_[j] = v;
      at(v) = rec;
    } else {
      first_[j] = last_[j] = v;
      ++distinct_;
      at(v) = rec;
      count(rec.kind, 1);
    }
  }

  // v must be the oldest update in the window.
  void pop(std::int64_t v) {
    const Record& rec = at(v);
    const auto j = static_cast<std::size_t>(rec.coord);
    count(rec.kind, -1);
    if (rec.next_same != 0) {
      first_[j] = rec.next_same;
      count(at(rec.next_same).kind, 1);
    } else {
      first_[j] = last_[j] = 0;
      --distinct_;
    }
  }

 private:
  void count(UpdateKind kind, int d) {
    if (kind == UpdateKind::increasing) available_[0] += d;
    if (kind == UpdateKind::decreasing) available_[1] += d;
  }

  std::int64_t block_;
  std::vector<Record> ring_;
  std::vector<std::int64_t> first_, last_;
  std::int64_t distinct_ = 0;
  std::int64_t available_[2] = {0, 0};
};

class Engine {
 public:
  Engine(const objective::Params& p, const AdversaryConstants& k, const StallOptions& o)
      : p_(p), k_(k), o_(o), block_(k.block()),
        state_(StallState::initial(p.n, k.alpha, k.nu)), window_(p.n, block_) {
    report_.steps_requested = o.steps;
    f0_ = 0.5 * (1.0 - p.eps) * static_cast<double>(p.n);
    stride_ = std::max<std::int64_t>(1, o.steps / std::max<std::int64_t>(1, o.samples));
    if (o.trace) {
      o.trace->header = {p.n, k.qbar, p.eps, p.gamma, p.lmax_scale};
      o.trace->events.clear();
      o.trace->events.reserve(static_cast<std::size_t>(o.steps));
    }
  }

  StallReport run() {
    sample(0);
    run_block();
    for (std::int64_t t = block_ + 1; t <= o_.steps && !halted_; ++t) step(t);
    finish();
    return report_;
  }

 private:
  std::int64_t coord_at(std::int64_t t) const {
    return sequential::coordinate_at(p_.n, o_.seed, o_.trial, t);
  }

  double f_ratio() const {
    return (0.5 * (1.0 - p_.eps) * state_.sum_sq + 0.5 * p_.eps * state_.sum_x * state_.sum_x) / f0_;
  }

  void run_block() {
    const std::int64_t m = std::min(o_.steps, block_);
    if (m <= 0) return;
    std::vector<std::int64_t> coords(static_cast<std::size_t>(m));
    for (std::int64_t v = 1; v <= m; ++v) coords[static_cast<std::size_t>(v - 1)] = coord_at(v);
    const auto cls = classify_initial_block(coords);

    // Commit order: fast updates by start, then slow updates by start.
    std::vector<std::int64_t> fast, slow;
    for (std::int64_t v = 1; v <= m; ++v) {
      (cls[static_cast<std::size_t>(v - 1)] == UpdateClass::fast ? fast : slow).push_back(v);
    }
    order_ = fast;
    order_.insert(order_.end(), slow.begin(), slow.end());
    report_.fast_updates = static_cast<std::int64_t>(fast.size());
    report_.slow_updates = static_cast<std::int64_t>(slow.size());
    if (o_.trace) o_.trace->events.resize(static_cast<std::size_t>(m));

    std::vector<Record> recs(static_cast<std::size_t>(m));
    std::int64_t fast_inc = 0, fast_dec = 0;
    for (std::size_t slot = 0; slot < order_.size() && !halted_; ++slot) {
      const std::int64_t v = order_[slot];
      const std::int64_t k = coords[static_cast<std::size_t>(v - 1)];
      const bool is_fast = slot < fast.size();
      if (!is_fast && slot == fast.size()) {
        // Every slow update may read all fast updates.
        update_available_minimum(fast_inc, fast_dec);
        if (static_cast<double>(std::min(fast_inc, fast_dec)) < k_.min_available()) {
          report_.invariant5_violations += static_cast<std::int64_t>(slow.size());
        }
      }
      const Move move = decide_move(state_, v, k, is_fast);
      const double read_xk = objective::initial_value(k);
      Selection sel;
      if (is_fast) {
        sel.value = written_value(p_.eps, p_.gamma, state_.x[static_cast<std::size_t>(k)], read_xk, 0.0);
        sel.landed = true;
      } else {
        const double ideal = target_ideal(state_, k, move);
        const auto dt = decide_delta_sign(state_);
        std::size_t pos_inc = 0, pos_dec = 0;
        auto next = [&](std::size_t& pos, UpdateKind want, Candidate& c) {
          for (; pos < fast.size(); ++pos) {
            const auto& r = recs[static_cast<std::size_t>(fast[pos] - 1)];
            if (r.coord != k && r.kind == want) {
              c = {r.index, r.coord, r.shift};
              ++pos;
              return true;
            }
          }
          return false;
        };
        sel = select_reads(
            p_.eps, p_.gamma, state_.x[static_cast<std::size_t>(k)], read_xk, 0.0, ideal + dt.lo,
            ideal + dt.hi, [&](Candidate& c) { return next(pos_inc, UpdateKind::increasing, c); },
            [&](Candidate& c) { return next(pos_dec, UpdateKind::decreasing, c); });
      }
      const auto w = commit(v, k, move, sel, is_fast ? UpdateClass::fast : UpdateClass::slow,
                            schedule::slot_commit_x2(static_cast<std::int64_t>(slot) + 1, k_.qbar), 0);
      auto& r = recs[static_cast<std::size_t>(v - 1)];
      r = {v, k, w.new_value - w.old_value, w.old_value, w.new_value, w.kind, 0};
      if (is_fast) {
        if (w.kind == UpdateKind::increasing) ++fast_inc;
        if (w.kind == UpdateKind::decreasing) ++fast_dec;
      }
      after_update(v, std::nullopt);
    }
    if (halted_) return;
    for (const auto& r : recs) window_.push(r);
    const std::int64_t repeats = block_ - window_.distinct();
    if (m == block_ && static_cast<double>(repeats) > k_.b3) {
      record_failure({block_, FailureType::repeats, static_cast<double>(repeats), k_.b3});
      check_all_types(block_, repeats);
    }
  }

  void step(std::int64_t t) {
    const std::int64_t k = coord_at(t);
    update_available_minimum(window_.increasing(), window_.decreasing());
    if (!report_.first_failure &&
        static_cast<double>(std::min(window_.increasing(), window_.decreasing())) < k_.min_available()) {
      ++report_.invariant5_violations;
    }

    const Move move = decide_move(state_, t, k, false);
    const double ideal = target_ideal(state_, k, move);
    const auto dt = decide_delta_sign(state_);
    const std::int64_t first_k = window_.first(k);
    const double read_xk = first_k ? window_.at(first_k).old_value : state_.x[static_cast<std::size_t>(k)];

    // Window [t - block, t - 1] in commit order: initial-block updates in slot
    // order, then normal updates by index.
    const std::int64_t lo_idx = t - block_;
    struct Cursor {
      std::size_t slot = 0;
      std::int64_t idx = 0;
    };
    Cursor inc{0, std::max(lo_idx, block_ + 1)}, dec = inc;
    auto next = [&](Cursor& cur, UpdateKind want, Candidate& c) {
      if (lo_idx <= block_) {
        for (; cur.slot < order_.size(); ++cur.slot) {
          const std::int64_t v = order_[cur.slot];
          if (v >= lo_idx && usable(v, k, want)) {
            const auto& r = window_.at(v);
            c = {v, r.coord, r.shift};
            ++cur.slot;
            return true;
          }
        }
      }
      for (; cur.idx < t; ++cur.idx) {
        if (usable(cur.idx, k, want)) {
          const auto& r = window_.at(cur.idx);
          c = {cur.idx, r.coord, r.shift};
          ++cur.idx;
          return true;
        }
      }
      return false;
    };
    const Selection sel = select_reads(
        p_.eps, p_.gamma, state_.x[static_cast<std::size_t>(k)], read_xk, lag_sum_.value(), ideal + dt.lo,
        ideal + dt.hi, [&](Candidate& c) { return next(inc, UpdateKind::increasing, c); },
        [&](Candidate& c) { return next(dec, UpdateKind::decreasing, c); });

    const auto w = commit(t, k, move, sel, UpdateClass::normal, schedule::normal_commit_x2(t, k_.qbar),
                          t - block_ - 1);
    window_.pop(t - block_);
    const Record& gone = window_.at(t - block_);
    lag_sum_.add(gone.new_value);
    lag_sum_.add(-gone.old_value);
    window_.push({t, k, w.new_value - w.old_value, w.old_value, w.new_value, w.kind, 0});
    after_update(t, block_ - window_.distinct());
  }

  bool usable(std::int64_t v, std::int64_t k, UpdateKind want) const {
    const auto& r = window_.at(v);
    return r.coord != k && r.kind == want && window_.first(r.coord) == v;
  }

  WriteResult commit(std::int64_t t, std::int64_t k, Move move, const Selection& sel, UpdateClass cls,
                     schedule::Time2 commit_x2, std::int64_t snapshot) {
    if (!sel.landed) {
      ++report_.construction_failures;
      if (!report_.first_construction_failure) report_.first_construction_failure = t;
      if (o_.stop_on_failure) halted_ = true;
    }
    const auto w = apply_write(state_, k, sel.value, move);
    if (!in_value_set(state_, k)) ++report_.value_set_violations;
    if (move == Move::moving) ++report_.moving_updates;
    const auto nreads = static_cast<std::int64_t>(sel.reads.size());
    report_.max_reads = std::max(report_.max_reads, nreads);
    total_reads_ += nreads;
    if (o_.trace) {
      schedule::TraceEvent e;
      e.update = {t, k, 2 * t, commit_x2, cls, w.kind, w.new_value};
      e.reads.snapshot = snapshot;
      e.reads.reads.reserve(sel.reads.size());
      for (const auto& c : sel.reads) e.reads.reads.push_back({c.coord, c.index});
      auto& events = o_.trace->events;
      if (t <= static_cast<std::int64_t>(events.size())) {
        events[static_cast<std::size_t>(t - 1)] = std::move(e);
      } else {
        events.push_back(std::move(e));
      }
    }
    return w;
  }

  void after_update(std::int64_t t, std::optional<std::int64_t> repeats) {
    ++report_.steps_run;
    const bool clean = !report_.first_failure;
    if (auto f = detect_failure(state_, k_, t, repeats)) record_failure(*f);
    // The detector reports one type per step; log the first step of each.
    check_all_types(t, repeats);
    if (clean && !report_.first_failure) {
      const double bound = 0.5 * k_.alpha * k_.b1 + k_.nu * k_.b2;
      if (std::abs(state_.sum_x) > bound + 1e-9) ++report_.invariant1_violations;
    }
    report_.max_abs_ideal_gap = std::max(report_.max_abs_ideal_gap, std::abs(state_.up - state_.down));
    report_.max_abs_delta_sum = std::max(report_.max_abs_delta_sum, std::abs(state_.delta_sum));
    const double ratio = f_ratio();
    report_.min_f_ratio = std::min(report_.min_f_ratio, ratio);
    if (t >= block_ || t == o_.steps) {
      if (t % stride_ == 0) sample(t);
      if (o_.check_interval > 0 && t % o_.check_interval == 0) checkpoint();
    }
  }

  void check_all_types(std::int64_t t, std::optional<std::int64_t> repeats) {
    auto seen = [&](FailureType ft) {
      for (const auto& f : report_.failures) {
        if (f.type == ft) return true;
      }
      return false;
    };
    if (repeats && static_cast<double>(*repeats) > k_.b3 && !seen(FailureType::repeats)) {
      report_.failures.push_back({t, FailureType::repeats, static_cast<double>(*repeats), k_.b3});
    }
    const auto gap = std::abs(state_.up - state_.down);
    if (static_cast<double>(gap) > k_.b1 && !seen(FailureType::ideal_sum)) {
      report_.failures.push_back({t, FailureType::ideal_sum, static_cast<double>(gap), k_.b1});
    }
    if (std::abs(state_.delta_sum) > k_.nu * k_.b2 && !seen(FailureType::delta_sum)) {
      report_.failures.push_back({t, FailureType::delta_sum, std::abs(state_.delta_sum), k_.nu * k_.b2});
    }
  }

  void record_failure(const FailureRecord& f) {
    ++report_.failure_steps;
    if (!report_.first_failure) report_.first_failure = f;
    if (o_.stop_on_failure) halted_ = true;
  }

  void sample(std::int64_t t) {
    if (!report_.samples.empty() && report_.samples.back().t == t) return;
    report_.samples.push_back({t, f_ratio(), state_.far_count});
  }

  void checkpoint() {
    const Recount r = recount(state_);
    double drift = std::abs(r.sum_x - state_.sum_x);
    drift = std::max(drift, std::abs(r.delta_sum - state_.delta_sum));
    drift = std::max(drift, std::abs(r.ideal_sum - state_.ideal_sum()));
    const double sq_drift = std::abs(r.sum_sq - state_.sum_sq) / std::max(1.0, r.sum_sq);
    const bool counts_ok = r.up == state_.up && r.down == state_.down && r.far_count == state_.far_count;
    report_.max_recount_drift = std::max(report_.max_recount_drift, drift);
    if (drift > 1e-9 || sq_drift > 1e-9 || !counts_ok) ++report_.recount_mismatches;
    state_.sum_x = r.sum_x;
    state_.sum_sq = r.sum_sq;
    state_.delta_sum = r.delta_sum;
  }

  void finish() {
    const std::int64_t last = report_.steps_run;
    if (last > 0) sample(last);
    checkpoint();
    report_.final_f_ratio = f_ratio();
    report_.far_count_final = state_.far_count;
    RunningStats far;
    for (const auto& s : report_.samples) far.add(static_cast<double>(s.far_count));
    report_.far_count_mean = far.mean();
    report_.mean_reads = last > 0 ? static_cast<double>(total_reads_) / static_cast<double>(last) : 0.0;
    if (o_.trace) {
      // A halted initial block leaves unprocessed slots.
      auto& ev = o_.trace->events;
      ev.erase(std::remove_if(ev.begin(), ev.end(), [](const auto& e) { return e.update.index == 0; }),
               ev.end());
    }
  }

  void update_available_minimum(std::int64_t inc, std::int64_t dec) {
    auto& mi = report_.min_available_increasing;
    auto& md = report_.min_available_decreasing;
    mi = mi < 0 ? inc : std::min(mi, inc);
    md = md < 0 ? dec : std::min(md, dec);
  }

  const objective::Params& p_;
  const AdversaryConstants& k_;
  const StallOptions& o_;
  std::int64_t block_;
  StallState state_;
  Window window_;
  std::vector<std::int64_t> order_;  // initial block in commit order
  CompensatedSum lag_sum_;  // sum of x after updates <= t - block - 1
  double f0_ = 1.0;
  std::int64_t stride_ = 1;
  std::int64_t total_reads_ = 0;
  bool halted_ = false;
  StallReport report_;
};

}  // namespace

StallReport run_stall_experiment(const objective::Params& p, const AdversaryConstants& k,
                                 const StallOptions& opts) {
  objective::validate_stalling(p);
  if (p.lmax_scale != 1.0) {
    throw PreconditionError("the stalling construction runs on lmax_scale = 1 (scale the result instead)");
  }
  if (p.n != k.n || p.eps != k.eps || p.gamma != k.gamma) {
    throw PreconditionError("constants were derived for different n, eps or gamma");
  }
  schedule::check_qbar(k.qbar);
  if (opts.steps < 0) throw PreconditionError("steps must be non-negative");
  Engine engine(p, k, opts);
  return engine.run();
}

}  // namespace acd::adversary
