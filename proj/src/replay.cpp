#include "acd/replay.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "acd/errors.hpp"
#include "acd/objective.hpp"

namespace acd::replay {

ReplayReport replay_trace(const schedule::Trace& trace, double tol) {
  const schedule::TraceIndex index(trace);
  const auto& h = trace.header;
  const objective::Params p{h.n, h.eps, h.gamma, h.lmax_scale};
  objective::validate(p);
  const auto n = static_cast<std::size_t>(h.n);

  ReplayReport rep;
  rep.values.assign(trace.events.size(), 0.0);
  std::vector<std::uint8_t> done(trace.events.size() + 1, 0);
  done[0] = 1;
  std::vector<double> current = objective::initial_point(h.n);
  std::vector<std::int64_t> last_committed(n, 0);
  std::vector<double> read(n);
  std::vector<std::int64_t> stamp(n, 0);

  auto value_of = [&](std::int64_t t, std::int64_t src, std::int64_t j) {
    if (src < 0 || src > index.size()) {
      throw PreconditionError("update " + std::to_string(t) + " reads unknown source " + std::to_string(src));
    }
    if (!done[static_cast<std::size_t>(src)]) {
      throw PreconditionError("update " + std::to_string(t) + " reads update " + std::to_string(src) +
                              ", which has not committed");
    }
    return src == 0 ? objective::initial_value(j) : trace.events[static_cast<std::size_t>(src - 1)].update.value;
  };

  for (const std::int64_t t : index.by_commit()) {
    const auto& ev = trace.events[static_cast<std::size_t>(t - 1)];
    const auto k = ev.update.coord;
    for (const auto& r : ev.reads.reads) {
      read[static_cast<std::size_t>(r.coord)] = value_of(t, r.source, r.coord);
      stamp[static_cast<std::size_t>(r.coord)] = t;
    }
    for (std::int64_t j = 0; j < h.n; ++j) {
      if (stamp[static_cast<std::size_t>(j)] == t) continue;
      const auto src = ev.reads.snapshot ? index.snapshot_source(*ev.reads.snapshot, j)
                                         : index.available_source(t, j);
      read[static_cast<std::size_t>(j)] = value_of(t, src, j);
    }
    const double g = objective::partial_gradient(p, read, static_cast<std::size_t>(k));

    auto& last = last_committed[static_cast<std::size_t>(k)];
    if (last > t) {
      throw PreconditionError("updates " + std::to_string(last) + " and " + std::to_string(t) +
                              " to one coordinate commit out of index order");
    }
    last = t;
    const double value = current[static_cast<std::size_t>(k)] - g / h.gamma;
    current[static_cast<std::size_t>(k)] = ev.update.value;
    rep.values[static_cast<std::size_t>(t - 1)] = value;
    done[static_cast<std::size_t>(t)] = 1;
    ++rep.events;

    const double diff = std::abs(value - ev.update.value);
    const double rel = diff / std::max(1.0, std::abs(ev.update.value));
    rep.max_abs_diff = std::max(rep.max_abs_diff, diff);
    rep.max_rel_diff = std::max(rep.max_rel_diff, rel);
    if (!(rel <= tol) && rep.ok) {
      rep.ok = false;
      rep.first_mismatch = t;
      std::ostringstream msg;
      msg.precision(17);
      msg << "update " << t << ": replayed " << value << ", recorded " << ev.update.value;
      rep.message = msg.str();
    }
  }
  if (rep.ok) rep.message = "all written values reproduced";
  return rep;
}

}  // namespace acd::replay
