#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "acd/errors.hpp"
#include "acd/rng.hpp"
#include "acd/schedule.hpp"
#include "acd/trace_io.hpp"

using namespace acd;
using namespace acd::schedule;

namespace {

// Canonical schedule over the given coordinate sequence, all reads baseline.
Trace canonical(std::int64_t n, std::int64_t qbar, const std::vector<std::int64_t>& coords) {
  Trace tr;
  tr.header = {n, qbar, 1.0 / 18.0, 1.0, 1.0};
  const auto steps = static_cast<std::int64_t>(coords.size());
  std::set<std::int64_t> fast, seen;
  for (std::int64_t i = 1; i <= std::min(steps, qbar / 4); ++i) {
    if (seen.insert(coords[static_cast<std::size_t>(i - 1)]).second) fast.insert(i);
  }
  const auto commits = assign_commit_times(qbar, std::max(steps, qbar), fast);
  for (std::int64_t t = 1; t <= steps; ++t) {
    TraceEvent e;
    e.update.index = t;
    e.update.coord = coords[static_cast<std::size_t>(t - 1)];
    e.update.start_x2 = 2 * t;
    e.update.commit_x2 = commits[static_cast<std::size_t>(t - 1)];
    e.update.cls = t > qbar / 4 ? UpdateClass::normal : (fast.count(t) ? UpdateClass::fast : UpdateClass::slow);
    e.update.value = 0.25 * static_cast<double>(t);
    tr.events.push_back(e);
  }
  return tr;
}

std::vector<std::int64_t> random_coords(std::int64_t n, std::int64_t steps, std::uint64_t seed) {
  CounterRng rng(seed, 0, Stream::coordinates);
  std::vector<std::int64_t> out;
  for (std::int64_t t = 0; t < steps; ++t) out.push_back(static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n))));
  return out;
}

}  // namespace

TEST_CASE("commit times: small example") {
  const auto c = assign_commit_times(8, 16, {1, 2});
  CHECK(c[0] == 11);  // 5.5
  CHECK(c[1] == 13);  // 6.5
  CHECK(c[2] == 15);  // update 3 is normal: 3 + 4 + 1/2
  for (std::int64_t t = 3; t <= 16; ++t) CHECK(c[static_cast<std::size_t>(t - 1)] == 2 * t + 9);
}

TEST_CASE("commit times: slots are a bijection") {
  const auto all = assign_commit_times(16, 16, {1, 2, 3, 4});
  for (std::int64_t s = 1; s <= 4; ++s) CHECK(all[static_cast<std::size_t>(s - 1)] == 2 * s + 17);

  const auto mixed = assign_commit_times(16, 20, {2, 4});
  CHECK(mixed[1] == 2 * 1 + 17);
  CHECK(mixed[3] == 2 * 2 + 17);
  CHECK(mixed[0] == 2 * 3 + 17);
  CHECK(mixed[2] == 2 * 4 + 17);
  CHECK(mixed[4] == 2 * 5 + 16 + 1);

  CHECK_THROWS_AS(assign_commit_times(12, 24, {}), PreconditionError);
  CHECK_THROWS_AS(assign_commit_times(8, 4, {}), PreconditionError);
  CHECK_THROWS_AS(assign_commit_times(8, 16, {3}), PreconditionError);
}

TEST_CASE("interfering sets") {
  const std::int64_t qbar = 16;
  // Block (3, 3, 7, 3): fast at 1 and 3, slow at 2 and 4.
  std::vector<std::int64_t> coords{3, 3, 7, 3};
  const auto more = random_coords(40, 200, 4);
  coords.insert(coords.end(), more.begin(), more.end());
  const auto tr = canonical(40, qbar, coords);
  const TraceIndex idx(tr);

  CHECK(interfering_set(idx, 1).empty());
  CHECK(interfering_set(idx, 3) == std::vector<std::int64_t>{1});
  CHECK(interfering_set(idx, 2) == std::vector<std::int64_t>{1, 3});
  CHECK(interfering_set(idx, 4) == std::vector<std::int64_t>{1, 2, 3});

  for (std::int64_t t = qbar / 4 + 1; t <= idx.size(); ++t) {
    const auto s = interfering_set(idx, t);
    CHECK(static_cast<std::int64_t>(s.size()) <= qbar);
    for (std::int64_t v = std::max<std::int64_t>(1, t - qbar / 4); v < t; ++v) {
      CHECK(std::binary_search(s.begin(), s.end(), v));
    }
  }
}

TEST_CASE("q-bounded validation") {
  const std::int64_t qbar = 16;
  auto tr = canonical(50, qbar, random_coords(50, 10 * qbar, 7));
  const auto ok = validate_q_bounded(tr, qbar);
  CHECK(ok.ok);
  CHECK(ok.max_overlap <= qbar);
  CHECK(ok.max_overlap >= qbar - 1);

  Trace single = canonical(4, 8, {1});
  const auto one = validate_q_bounded(single, 8);
  CHECK(one.ok);
  CHECK(one.max_overlap == 0);

  tr.events[100].update.commit_x2 = 2 * (101 + 2 * qbar);
  const auto bad = validate_q_bounded(tr, qbar);
  CHECK_FALSE(bad.ok);
  CHECK(bad.max_overlap > qbar);

  Trace backwards = canonical(4, 8, {1, 2, 3});
  backwards.events[1].update.commit_x2 = backwards.events[1].update.start_x2;
  CHECK_FALSE(validate_q_bounded(backwards, 8).ok);
}

TEST_CASE("legal read sources") {
  const std::int64_t qbar = 16, n = 40;
  std::vector<std::int64_t> coords(200);
  for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = static_cast<std::int64_t>(i % 39);
  const std::int64_t t = 100;
  coords[static_cast<std::size_t>(t - qbar / 4 - 1)] = 39;   // update t - qbar/4 writes 39
  coords[static_cast<std::size_t>(t - qbar / 2 - 2)] = 39;   // update t - qbar/2 - 1 writes 39
  const auto tr = canonical(n, qbar, coords);
  const TraceIndex idx(tr);

  const auto src = legal_read_sources(idx, t, 39);
  // t - qbar/4 commits at t + qbar/4 + 1/2, inside the window.
  CHECK(src.contains(t - qbar / 4));
  // t - qbar/2 - 1 committed at t - 1/2: it is the available value, not a window source.
  CHECK(src.available == t - qbar / 2 - 1);
  CHECK(src.window == std::vector<std::int64_t>{t - qbar / 4});

  // A coordinate untouched near t has only its available value.
  const auto quiet = legal_read_sources(idx, 5, 38);
  CHECK(quiet.window.empty());
  CHECK(quiet.available == 0);

  for (std::int64_t u = qbar / 4 + 1; u <= idx.size(); ++u) {
    for (std::int64_t j = 0; j < n; j += 7) {
      const auto s = legal_read_sources(idx, u, j);
      for (auto v : s.window) {
        CHECK(v != u);
        CHECK(idx.update(v).commit_x2 < 2 * u + qbar + 1);
      }
    }
  }
}

TEST_CASE("available updates") {
  const std::int64_t qbar = 16;
  const auto tr = canonical(20, qbar, {0, 1, 2, 3, 4, 5, 5, 5, 9, 8});
  const auto a = available_updates(tr, 4);
  CHECK(a.repeats == 0);
  CHECK(a.first_updates.size() == 4);
  const auto b = available_updates(tr, 8);
  CHECK(b.first_updates == std::vector<std::int64_t>{5, 6});
  CHECK(b.repeats == 2);
  for (std::int64_t t = 4; t <= 10; ++t) {
    const auto r = available_updates(tr, t);
    CHECK(static_cast<std::int64_t>(r.first_updates.size()) + r.repeats == qbar / 4);
  }
  CHECK_THROWS_AS(available_updates(tr, 3), PreconditionError);
}

TEST_CASE("read validation") {
  const std::int64_t qbar = 32;
  auto tr = canonical(30, qbar, random_coords(30, 400, 11));
  CHECK(validate_reads(tr).ok);

  // Lagged snapshots (state after update t - qbar/4 - 1) are always legal.
  for (std::int64_t t = qbar / 4 + 1; t <= 400; ++t) {
    tr.events[static_cast<std::size_t>(t - 1)].reads.snapshot = t - qbar / 4 - 1;
  }
  const auto lagged = validate_reads(tr);
  CHECK(lagged.ok);
  CHECK(lagged.checked > 0);

  // Reading a window update of the same coordinate is legal.
  const TraceIndex idx(tr);
  const std::int64_t t = 200;
  const std::int64_t v = t - 3;
  const auto j = idx.update(v).coord;
  tr.events[static_cast<std::size_t>(t - 1)].reads.reads.push_back({j, v});
  CHECK(validate_reads(tr).ok);

  // A source committing after the window is illegal.
  auto bad = tr;
  bad.events[static_cast<std::size_t>(t - 1)].reads.reads.back().source = t + 5;
  bad.events[static_cast<std::size_t>(t - 1)].reads.reads.back().coord = idx.update(t + 5).coord;
  const auto rep = validate_reads(bad);
  CHECK_FALSE(rep.ok);
  CHECK(rep.first_violation == t);

  // Source belonging to another coordinate.
  auto wrong = tr;
  wrong.events[static_cast<std::size_t>(t - 1)].reads.reads.back().coord = (j + 1) % 30;
  if (idx.update(v).coord != (j + 1) % 30) CHECK_FALSE(validate_reads(wrong).ok);

  // A snapshot too stale to be available is illegal.
  auto stale = tr;
  stale.events[350].reads.snapshot = 0;
  CHECK_FALSE(validate_reads(stale).ok);
}

TEST_CASE("trace round trip") {
  auto tr = canonical(12, 8, random_coords(12, 30, 2));
  tr.events[10].reads.snapshot = 7;
  tr.events[10].reads.reads.push_back({3, 9});
  tr.events[4].update.kind = UpdateKind::increasing;
  std::stringstream io;
  write_trace(io, tr);
  const auto back = read_trace(io);
  CHECK(back.header.n == 12);
  CHECK(back.header.qbar == 8);
  REQUIRE(back.events.size() == tr.events.size());
  for (std::size_t i = 0; i < tr.events.size(); ++i) {
    CHECK(back.events[i].update.value == tr.events[i].update.value);
    CHECK(back.events[i].update.commit_x2 == tr.events[i].update.commit_x2);
    CHECK(back.events[i].update.cls == tr.events[i].update.cls);
    CHECK(back.events[i].update.kind == tr.events[i].update.kind);
    CHECK(back.events[i].reads.snapshot == tr.events[i].reads.snapshot);
  }
  CHECK(back.events[10].reads.reads.size() == 1);

  std::istringstream junk("{\"header\":{\"n\":4,\"qbar\":8,\"eps\":0.05,\"gamma\":1}}\n{\"t\":1}\n");
  CHECK_THROWS_AS(read_trace(junk), PreconditionError);
}
