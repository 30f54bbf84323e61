#include "acd/trace_io.hpp"

#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "acd/errors.hpp"

namespace acd::schedule {

using nlohmann::json;

void write_trace_header(std::ostream& out, const TraceHeader& h, std::int64_t steps) {
  json j;
  j["header"] = {{"n", h.n},
                 {"qbar", h.qbar},
                 {"eps", h.eps},
                 {"gamma", h.gamma},
                 {"lmax_scale", h.lmax_scale},
                 {"initial", "alternating"},
                 {"steps", steps}};
  out << j.dump() << '\n';
}

void write_trace_event(std::ostream& out, const TraceEvent& e) {
  const auto& u = e.update;
  json reads = json::array();
  for (const auto& r : e.reads.reads) reads.push_back({{"coord", r.coord}, {"source", r.source}});
  json j = {{"t", u.index},
            {"coord", u.coord},
            {"start_x2", u.start_x2},
            {"commit_x2", u.commit_x2},
            {"class", to_string(u.cls)},
            {"kind", to_string(u.kind)},
            {"snapshot", e.reads.snapshot ? json(*e.reads.snapshot) : json(nullptr)},
            {"reads", std::move(reads)},
            {"value", u.value}};
  out << j.dump() << '\n';
}

void write_trace(std::ostream& out, const Trace& trace) {
  write_trace_header(out, trace.header, static_cast<std::int64_t>(trace.events.size()));
  for (const auto& e : trace.events) write_trace_event(out, e);
}

Trace read_trace(std::istream& in) {
  Trace trace;
  std::string line;
  std::int64_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      if (!have_header) {
        const auto& h = j.at("header");
        trace.header.n = h.at("n").get<std::int64_t>();
        trace.header.qbar = h.at("qbar").get<std::int64_t>();
        trace.header.eps = h.at("eps").get<double>();
        trace.header.gamma = h.at("gamma").get<double>();
        trace.header.lmax_scale = h.value("lmax_scale", 1.0);
        if (h.value("initial", std::string("alternating")) != "alternating") {
          throw PreconditionError("only the alternating initial point is supported");
        }
        have_header = true;
        continue;
      }
      TraceEvent e;
      e.update.index = j.at("t").get<std::int64_t>();
      e.update.coord = j.at("coord").get<std::int64_t>();
      e.update.start_x2 = j.at("start_x2").get<std::int64_t>();
      e.update.commit_x2 = j.at("commit_x2").get<std::int64_t>();
      e.update.cls = parse_class(j.at("class").get<std::string>());
      e.update.kind = parse_kind(j.at("kind").get<std::string>());
      e.update.value = j.at("value").get<double>();
      if (j.contains("snapshot") && !j["snapshot"].is_null()) {
        e.reads.snapshot = j["snapshot"].get<std::int64_t>();
      }
      for (const auto& r : j.value("reads", json::array())) {
        e.reads.reads.push_back({r.at("coord").get<std::int64_t>(), r.at("source").get<std::int64_t>()});
      }
      trace.events.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw PreconditionError("trace line " + std::to_string(lineno) + ": " + ex.what());
    } catch (const PreconditionError& ex) {
      throw PreconditionError("trace line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  if (!have_header) throw PreconditionError("trace has no header line");
  return trace;
}

}  // namespace acd::schedule
