#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "acd/adversary.hpp"

namespace acd::cli {

enum ExitCode : int {
  kOk = 0,
  kPrecondition = 1,
  kConstruction = 2,
  kStatistical = 3,
};

// Unset fields fall back to per-command defaults when resolved.
struct Config {
  std::string command;
  std::optional<std::int64_t> n;
  std::optional<double> eps;
  std::optional<double> ratio;
  double gamma = 1.0;
  double c = 1.0;
  adversary::Mode mode = adversary::Mode::paper;
  std::optional<std::int64_t> qbar;
  std::optional<std::int64_t> steps;
  std::optional<std::int64_t> trials;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out;
  std::string trace;
  bool validate = false;
};

// Parses argv (command first). A --config JSON file supplies defaults that
// explicit flags override. Throws PreconditionError on bad input.
Config parse_args(const std::vector<std::string>& args);

nlohmann::json to_json(const Config& cfg);

int cmd_params(const Config& cfg, std::ostream& out, std::ostream& err);
int cmd_sequential(const Config& cfg, std::ostream& out, std::ostream& err);
int cmd_stall(const Config& cfg, std::ostream& out, std::ostream& err);
int cmd_walks(const Config& cfg, std::ostream& out, std::ostream& err);
int cmd_validate(const Config& cfg, std::ostream& out, std::ostream& err);

// Parses, dispatches and maps exceptions to exit codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace acd::cli
