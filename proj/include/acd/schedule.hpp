#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace acd::schedule {

// Times on the logical clock are half-integers; they are stored doubled so
// every comparison is exact. Update t starts at 2t.
using Time2 = std::int64_t;

enum class UpdateClass { fast, slow, normal };
enum class UpdateKind { increasing, decreasing, stay_still };

const char* to_string(UpdateClass c);
const char* to_string(UpdateKind k);
UpdateClass parse_class(const std::string& s);
UpdateKind parse_kind(const std::string& s);

// Coordinates are zero-based. Update indices are 1-based; source 0 denotes the
// initial value of a coordinate.
struct UpdateRecord {
  std::int64_t index = 0;
  std::int64_t coord = 0;
  Time2 start_x2 = 0;
  Time2 commit_x2 = 0;
  UpdateClass cls = UpdateClass::normal;
  UpdateKind kind = UpdateKind::stay_still;
  double value = 0.0;
};

struct ReadSource {
  std::int64_t coord = 0;
  std::int64_t source = 0;
};

// Coordinates listed in `reads` take the value written by the given update.
// Every other coordinate j reads:
//   - snapshot empty: the value available at time t (latest commit before
//     t + 1/2);
//   - snapshot s: the value of the latest update to j with index <= s
//     (s = 0 means the initial point).
struct ReadChoice {
  std::optional<std::int64_t> snapshot;
  std::vector<ReadSource> reads;
};

struct TraceEvent {
  UpdateRecord update;
  ReadChoice reads;
};

struct TraceHeader {
  std::int64_t n = 0;
  std::int64_t qbar = 0;
  double eps = 0.0;
  double gamma = 1.0;
  double lmax_scale = 1.0;
};

// events[i].update.index == i + 1. The initial point is the alternating x^0.
struct Trace {
  TraceHeader header;
  std::vector<TraceEvent> events;
};

// Throws PreconditionError unless qbar is a positive multiple of 8.
void check_qbar(std::int64_t qbar);

// Normal update t commits at t + qbar/2 + 1/2.
constexpr Time2 normal_commit_x2(std::int64_t t, std::int64_t qbar) { return 2 * t + qbar + 1; }

// Initial-block commit slot s (1-based) is at s + qbar/2 + 1/2.
constexpr Time2 slot_commit_x2(std::int64_t slot, std::int64_t qbar) { return 2 * slot + qbar + 1; }

// Commit time (doubled) for updates 1..T; element t-1 belongs to update t.
// Fast updates take slots 1..f in start order, slow updates f+1..qbar/4.
std::vector<Time2> assign_commit_times(std::int64_t qbar, std::int64_t steps,
                                       const std::set<std::int64_t>& fast_indices);

// Read-only lookup structure over a trace.
class TraceIndex {
 public:
  explicit TraceIndex(const Trace& trace);

  const Trace& trace() const { return trace_; }
  const UpdateRecord& update(std::int64_t t) const;
  std::int64_t size() const { return static_cast<std::int64_t>(trace_.events.size()); }
  Time2 max_span_x2() const { return max_span_x2_; }

  // Updates to j in index order.
  const std::vector<std::int64_t>& updates_to(std::int64_t j) const;

  // Update whose value is available at time t: the latest commit before
  // t + 1/2, or 0 for the initial value.
  std::int64_t available_source(std::int64_t t, std::int64_t j) const;

  // Latest update to j with index <= s, or 0.
  std::int64_t snapshot_source(std::int64_t s, std::int64_t j) const;

  // Indices in commit order.
  const std::vector<std::int64_t>& by_commit() const { return by_commit_; }

 private:
  const Trace& trace_;
  std::vector<std::vector<std::int64_t>> per_coord_;
  std::vector<std::int64_t> by_commit_;
  Time2 max_span_x2_ = 0;
};

// Overlapping updates that commit before update t commits, ascending.
std::vector<std::int64_t> interfering_set(const TraceIndex& index, std::int64_t t);

struct QBoundReport {
  bool ok = true;
  std::int64_t max_overlap = 0;
  std::int64_t argmax = 0;
  std::int64_t first_violation = 0;  // 0 when none
  std::string message;
};

// Every timespan [start, commit] overlaps at most q others. Also checks that
// indices are consecutive, start = t and commit > start.
QBoundReport validate_q_bounded(const Trace& trace, std::int64_t q);

struct LegalSources {
  std::int64_t available = 0;         // update index, or 0 for the initial value
  std::vector<std::int64_t> window;   // other readable updates to j, ascending
  bool contains(std::int64_t source) const;
};

// For t > qbar/4: updates to j committing in [t + 1/2, t + qbar/2 - 1/2].
// For t <= qbar/4: updates to j in interfering_set(t).
LegalSources legal_read_sources(const TraceIndex& index, std::int64_t t, std::int64_t j);

struct Available {
  std::vector<std::int64_t> first_updates;  // first update per distinct coordinate
  std::int64_t repeats = 0;                 // b_{I_t}
};

// Over I_t = [t - qbar/4 + 1, t]. Requires t >= qbar/4.
Available available_updates(const Trace& trace, std::int64_t t);

struct ReadsReport {
  bool ok = true;
  std::int64_t checked = 0;
  std::int64_t first_violation = 0;  // update index, 0 when none
  std::int64_t coord = -1;
  std::int64_t source = -1;
  std::string message;
};

// Checks every explicit read and every source implied by a snapshot.
ReadsReport validate_reads(const Trace& trace);

}  // namespace acd::schedule
