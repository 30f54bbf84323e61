#pragma once

#include <iosfwd>

#include "acd/schedule.hpp"

namespace acd::schedule {

// JSONL. First line:
//   {"header":{"n":..,"qbar":..,"eps":..,"gamma":..,"lmax_scale":..,
//              "initial":"alternating","steps":T}}
// then one event per line:
//   {"t","coord","start_x2","commit_x2","class","kind","snapshot","reads":[{"coord","source"}],"value"}
// snapshot is null when unlisted coordinates read the available value.
void write_trace_header(std::ostream& out, const TraceHeader& header, std::int64_t steps);
void write_trace_event(std::ostream& out, const TraceEvent& event);
void write_trace(std::ostream& out, const Trace& trace);

// Throws PreconditionError on malformed input, naming the line.
Trace read_trace(std::istream& in);

}  // namespace acd::schedule
