#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "acd/schedule.hpp"

namespace acd::replay {

struct ReplayReport {
  bool ok = true;
  std::int64_t events = 0;
  double max_abs_diff = 0.0;
  double max_rel_diff = 0.0;  // |diff| / max(1, |trace value|)
  std::optional<std::int64_t> first_mismatch;
  std::vector<double> values;  // replayed value of update t at values[t - 1]
  std::string message;
};

// Recomputes every written value from scratch. Events are visited in commit
// order; each read vector is rebuilt coordinate by coordinate from recorded
// values (explicit reads, then the snapshot, else the available value) and
// the full gradient of f is evaluated. Each step is checked against the
// recorded history, so rounding does not compound across steps. A mismatch is
// |replayed - recorded| > tol * max(1, |recorded|).
ReplayReport replay_trace(const schedule::Trace& trace, double tol = 1e-9);

}  // namespace acd::replay
