#include "acd/schedule.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include "acd/errors.hpp"

namespace acd::schedule {

const char* to_string(UpdateClass c) {
  switch (c) {
    case UpdateClass::fast: return "fast";
    case UpdateClass::slow: return "slow";
    case UpdateClass::normal: return "normal";
  }
  return "?";
}

const char* to_string(UpdateKind k) {
  switch (k) {
    case UpdateKind::increasing: return "increasing";
    case UpdateKind::decreasing: return "decreasing";
    case UpdateKind::stay_still: return "stay_still";
  }
  return "?";
}

UpdateClass parse_class(const std::string& s) {
  if (s == "fast") return UpdateClass::fast;
  if (s == "slow") return UpdateClass::slow;
  if (s == "normal") return UpdateClass::normal;
  throw PreconditionError("unknown update class '" + s + "'");
}

UpdateKind parse_kind(const std::string& s) {
  if (s == "increasing") return UpdateKind::increasing;
  if (s == "decreasing") return UpdateKind::decreasing;
  if (s == "stay_still") return UpdateKind::stay_still;
  throw PreconditionError("unknown update kind '" + s + "'");
}

void check_qbar(std::int64_t qbar) {
  if (qbar < 8 || qbar % 8 != 0) {
    throw PreconditionError("qbar must be a positive multiple of 8 (got " + std::to_string(qbar) + ")");
  }
}

std::vector<Time2> assign_commit_times(std::int64_t qbar, std::int64_t steps,
                                       const std::set<std::int64_t>& fast_indices) {
  check_qbar(qbar);
  if (steps < qbar) {
    throw PreconditionError("steps must be at least qbar");
  }
  const std::int64_t block = qbar / 4;
  for (auto i : fast_indices) {
    if (i < 1 || i > block) throw PreconditionError("fast index outside the initial block");
  }
  std::vector<Time2> commit(static_cast<std::size_t>(steps));
  std::int64_t slot = 0;
  for (auto i : fast_indices) commit[static_cast<std::size_t>(i - 1)] = slot_commit_x2(++slot, qbar);
  for (std::int64_t i = 1; i <= block; ++i) {
    if (!fast_indices.count(i)) commit[static_cast<std::size_t>(i - 1)] = slot_commit_x2(++slot, qbar);
  }
  for (std::int64_t t = block + 1; t <= steps; ++t) {
    commit[static_cast<std::size_t>(t - 1)] = normal_commit_x2(t, qbar);
  }
  return commit;
}

TraceIndex::TraceIndex(const Trace& trace) : trace_(trace) {
  const auto n = trace.header.n;
  if (n < 1) throw PreconditionError("trace header has no dimension");
  per_coord_.resize(static_cast<std::size_t>(n));
  by_commit_.reserve(trace.events.size());
  for (const auto& e : trace.events) {
    const auto& u = e.update;
    if (u.coord < 0 || u.coord >= n) {
      throw PreconditionError("update " + std::to_string(u.index) + " has coordinate out of range");
    }
    per_coord_[static_cast<std::size_t>(u.coord)].push_back(u.index);
    by_commit_.push_back(u.index);
    max_span_x2_ = std::max(max_span_x2_, u.commit_x2 - u.start_x2);
  }
  std::stable_sort(by_commit_.begin(), by_commit_.end(), [&](std::int64_t a, std::int64_t b) {
    return update(a).commit_x2 < update(b).commit_x2;
  });
}

const UpdateRecord& TraceIndex::update(std::int64_t t) const {
  return trace_.events[static_cast<std::size_t>(t - 1)].update;
}

const std::vector<std::int64_t>& TraceIndex::updates_to(std::int64_t j) const {
  return per_coord_[static_cast<std::size_t>(j)];
}

std::int64_t TraceIndex::available_source(std::int64_t t, std::int64_t j) const {
  const auto& list = updates_to(j);
  const Time2 bound = 2 * t + 1;
  auto it = std::lower_bound(list.begin(), list.end(), t);
  std::int64_t best = 0;
  Time2 best_commit = -1;
  while (it != list.begin()) {
    --it;
    const auto& u = update(*it);
    if (u.start_x2 + max_span_x2_ < best_commit) break;  // no earlier update commits later
    if (u.commit_x2 < bound && u.commit_x2 > best_commit) {
      best = *it;
      best_commit = u.commit_x2;
    }
  }
  return best;
}

std::int64_t TraceIndex::snapshot_source(std::int64_t s, std::int64_t j) const {
  const auto& list = updates_to(j);
  auto it = std::upper_bound(list.begin(), list.end(), s);
  return it == list.begin() ? 0 : *std::prev(it);
}

std::vector<std::int64_t> interfering_set(const TraceIndex& index, std::int64_t t) {
  const auto& u = index.update(t);
  const auto& order = index.by_commit();
  auto commit_of = [&](std::int64_t v) { return index.update(v).commit_x2; };
  auto lo = std::lower_bound(order.begin(), order.end(), u.start_x2,
                             [&](std::int64_t v, Time2 c) { return commit_of(v) < c; });
  std::vector<std::int64_t> out;
  for (auto it = lo; it != order.end() && commit_of(*it) < u.commit_x2; ++it) {
    if (*it != t) out.push_back(*it);
  }
  std::sort(out.begin(), out.end());
  return out;
}

QBoundReport validate_q_bounded(const Trace& trace, std::int64_t q) {
  QBoundReport rep;
  const auto total = static_cast<std::int64_t>(trace.events.size());
  std::vector<Time2> starts, commits;
  starts.reserve(trace.events.size());
  commits.reserve(trace.events.size());
  for (std::int64_t i = 0; i < total; ++i) {
    const auto& u = trace.events[static_cast<std::size_t>(i)].update;
    std::ostringstream why;
    if (u.index != i + 1) {
      why << "event " << i + 1 << " has index " << u.index;
    } else if (u.start_x2 != 2 * u.index) {
      why << "update " << u.index << " starts at " << u.start_x2 / 2.0 << ", not at its index";
    } else if (u.commit_x2 <= u.start_x2) {
      why << "update " << u.index << " commits at or before its start";
    }
    if (!why.str().empty()) {
      rep.ok = false;
      rep.first_violation = i + 1;
      rep.message = why.str();
      return rep;
    }
    starts.push_back(u.start_x2);
    commits.push_back(u.commit_x2);
  }
  std::sort(commits.begin(), commits.end());
  for (std::int64_t i = 0; i < total; ++i) {
    const auto& u = trace.events[static_cast<std::size_t>(i)].update;
    // Closed timespans [s, c] and [s', c'] overlap iff s' <= c and c' >= s.
    const auto started = std::upper_bound(starts.begin(), starts.end(), u.commit_x2) - starts.begin();
    const auto finished = std::lower_bound(commits.begin(), commits.end(), u.start_x2) - commits.begin();
    const std::int64_t overlap = static_cast<std::int64_t>(started - finished) - 1;
    if (overlap > rep.max_overlap) {
      rep.max_overlap = overlap;
      rep.argmax = u.index;
    }
    if (overlap > q && rep.ok) {
      rep.ok = false;
      rep.first_violation = u.index;
      std::ostringstream why;
      why << "update " << u.index << " overlaps " << overlap << " others, more than q = " << q;
      rep.message = why.str();
    }
  }
  if (rep.ok) rep.message = "q-bounded";
  return rep;
}

bool LegalSources::contains(std::int64_t source) const {
  return source == available || std::binary_search(window.begin(), window.end(), source);
}

namespace {

// v is readable by update t other than as the available value.
bool in_read_window(const TraceIndex& index, std::int64_t t, std::int64_t v) {
  if (v == t) return false;
  const auto& u = index.update(t);
  const auto& w = index.update(v);
  const std::int64_t qbar = index.trace().header.qbar;
  if (t <= qbar / 4) {
    return w.commit_x2 >= u.start_x2 && w.commit_x2 < u.commit_x2;
  }
  return w.commit_x2 >= 2 * t + 1 && w.commit_x2 <= 2 * t + qbar - 1;
}

bool is_legal(const TraceIndex& index, std::int64_t t, std::int64_t j, std::int64_t source) {
  if (source == index.available_source(t, j)) return true;
  if (source <= 0 || source > index.size()) return false;
  if (index.update(source).coord != j) return false;
  return in_read_window(index, t, source);
}

}  // namespace

LegalSources legal_read_sources(const TraceIndex& index, std::int64_t t, std::int64_t j) {
  LegalSources out;
  out.available = index.available_source(t, j);
  const auto& list = index.updates_to(j);
  // A readable update commits before t + qbar/2, so it starts before then.
  const std::int64_t qbar = index.trace().header.qbar;
  const std::int64_t lo = t - index.max_span_x2() / 2 - 1;
  const std::int64_t hi = t + qbar / 2 + index.max_span_x2() / 2;
  for (auto it = std::lower_bound(list.begin(), list.end(), lo);
       it != list.end() && *it <= hi; ++it) {
    if (*it != out.available && in_read_window(index, t, *it)) out.window.push_back(*it);
  }
  return out;
}

Available available_updates(const Trace& trace, std::int64_t t) {
  const std::int64_t block = trace.header.qbar / 4;
  if (t < block || t > static_cast<std::int64_t>(trace.events.size())) {
    throw PreconditionError("available_updates needs qbar/4 <= t <= T");
  }
  Available out;
  std::unordered_set<std::int64_t> seen;
  for (std::int64_t v = t - block + 1; v <= t; ++v) {
    const auto coord = trace.events[static_cast<std::size_t>(v - 1)].update.coord;
    if (seen.insert(coord).second) {
      out.first_updates.push_back(v);
    } else {
      ++out.repeats;
    }
  }
  return out;
}

ReadsReport validate_reads(const Trace& trace) {
  ReadsReport rep;
  const TraceIndex index(trace);
  const std::int64_t total = index.size();
  const auto n = static_cast<std::size_t>(trace.header.n);
  // stamp[j] == t marks coordinate j as already handled for update t.
  std::vector<std::int64_t> stamp(n, 0);

  auto fail = [&](std::int64_t t, std::int64_t j, std::int64_t src, const std::string& why) {
    rep.ok = false;
    rep.first_violation = t;
    rep.coord = j;
    rep.source = src;
    std::ostringstream msg;
    msg << "update " << t << ", coordinate " << j << ", source " << src << ": " << why;
    rep.message = msg.str();
  };

  for (std::int64_t t = 1; t <= total; ++t) {
    const auto& ev = trace.events[static_cast<std::size_t>(t - 1)];
    for (const auto& r : ev.reads.reads) {
      ++rep.checked;
      if (r.coord < 0 || r.coord >= trace.header.n) {
        fail(t, r.coord, r.source, "coordinate out of range");
        return rep;
      }
      if (stamp[static_cast<std::size_t>(r.coord)] == t) {
        fail(t, r.coord, r.source, "coordinate read twice");
        return rep;
      }
      stamp[static_cast<std::size_t>(r.coord)] = t;
      if (!is_legal(index, t, r.coord, r.source)) {
        fail(t, r.coord, r.source, "not the available value and not in the read window");
        return rep;
      }
    }
    if (!ev.reads.snapshot) continue;
    const std::int64_t s = *ev.reads.snapshot;
    if (s < 0 || s >= t) {
      fail(t, -1, s, "snapshot must lie in [0, t-1]");
      return rep;
    }
    // Below `from`, every update has committed by t + 1/2 and lies within the
    // snapshot, so the implied source equals the available one.
    const std::int64_t settled = t - index.max_span_x2() / 2 - 1;
    const std::int64_t from = std::max<std::int64_t>(1, std::min(s + 1, settled));
    for (std::int64_t v = from; v < t; ++v) {
      const auto j = index.update(v).coord;
      if (stamp[static_cast<std::size_t>(j)] == t) continue;
      stamp[static_cast<std::size_t>(j)] = t;
      ++rep.checked;
      const auto src = index.snapshot_source(s, j);
      if (!is_legal(index, t, j, src)) {
        fail(t, j, src, "snapshot value is neither available nor in the read window");
        return rep;
      }
    }
  }
  rep.message = "all reads legal";
  return rep;
}

}  // namespace acd::schedule
