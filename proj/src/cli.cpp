#include "acd/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "acd/errors.hpp"
#include "acd/objective.hpp"
#include "acd/replay.hpp"
#include "acd/rng.hpp"
#include "acd/schedule.hpp"
#include "acd/sequential.hpp"
#include "acd/trace_io.hpp"
#include "acd/walks.hpp"

namespace acd::cli {

using nlohmann::json;

namespace {

struct HelpRequested {
  std::string text;
};

const std::vector<std::string> kCommands{"params", "sequential", "stall", "walks", "validate"};

void apply_file(Config& cfg, const std::string& path, const std::set<std::string>& given) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw PreconditionError("config file '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw PreconditionError("config file must hold a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (given.count(key)) continue;
      if (key == "command") {
        if (cfg.command.empty()) cfg.command = v.get<std::string>();
      } else if (key == "n") {
        cfg.n = v.get<std::int64_t>();
      } else if (key == "eps") {
        cfg.eps = v.get<double>();
      } else if (key == "ratio") {
        cfg.ratio = v.get<double>();
      } else if (key == "gamma") {
        cfg.gamma = v.get<double>();
      } else if (key == "c") {
        cfg.c = v.get<double>();
      } else if (key == "mode") {
        cfg.mode = adversary::parse_mode(v.get<std::string>());
      } else if (key == "qbar") {
        cfg.qbar = v.get<std::int64_t>();
      } else if (key == "steps") {
        cfg.steps = v.get<std::int64_t>();
      } else if (key == "trials") {
        cfg.trials = v.get<std::int64_t>();
      } else if (key == "seed") {
        cfg.seed = v.get<std::uint64_t>();
      } else if (key == "threads") {
        cfg.threads = v.get<unsigned>();
      } else if (key == "out") {
        cfg.out = v.get<std::string>();
      } else if (key == "trace") {
        cfg.trace = v.get<std::string>();
      } else if (key == "validate") {
        cfg.validate = v.get<bool>();
      } else {
        throw PreconditionError("config file: unknown key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw PreconditionError("config file '" + path + "': " + e.what());
  }
}

// Writes through `fn` to the --out file, or to `out` when none is given.
void emit(const std::string& path, std::ostream& out, const std::function<void(std::ostream&)>& fn) {
  if (path.empty()) {
    fn(out);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw PreconditionError("cannot write '" + path + "'");
  fn(f);
}

objective::Params resolve_params(const Config& cfg, std::int64_t default_n, json* note = nullptr,
                                 bool check = true) {
  objective::Params p;
  p.n = cfg.n.value_or(default_n);
  p.gamma = cfg.gamma;
  if (cfg.eps && cfg.ratio) throw PreconditionError("give either --eps or --ratio, not both");
  if (cfg.ratio) {
    const auto inv = objective::epsilon_for_ratio(*cfg.ratio, p.n, cfg.gamma);
    p.eps = inv.eps;
    if (note) {
      (*note)["ratio_inversion"] = {{"ratio", *cfg.ratio},
                                    {"eps", inv.eps},
                                    {"admissible", inv.admissible},
                                    {"above_lower_band", inv.above_lower_band},
                                    {"eps_within_limit", inv.eps_within_limit},
                                    {"literal_upper_band", inv.literal_upper_band},
                                    {"reason", inv.reason}};
    }
  } else {
    p.eps = cfg.eps.value_or(objective::kMaxEps);
  }
  if (check) objective::validate(p);
  return p;
}

adversary::ConstantsInput constants_input(const Config& cfg, const objective::Params& p) {
  return {p.n, p.eps, p.gamma, cfg.c, cfg.mode, cfg.qbar};
}

json constants_json(const adversary::AdversaryConstants& k) {
  json checks = json::array();
  for (const auto& c : k.checks) {
    checks.push_back({{"name", c.name}, {"ok", c.ok}, {"enforced", c.enforced}, {"detail", c.detail}});
  }
  return {{"n", k.n},
          {"eps", k.eps},
          {"gamma", k.gamma},
          {"c", k.c},
          {"mode", adversary::to_string(k.mode)},
          {"alpha", k.alpha},
          {"nu", k.nu},
          {"b1", k.b1},
          {"b2", k.b2},
          {"b3", k.b3},
          {"lambda", k.lambda},
          {"qbar", k.qbar},
          {"block", k.block()},
          {"min_available", k.min_available()},
          {"lresbar", k.lresbar},
          {"qbar_formula_lg", k.qbar_formula_lg},
          {"qbar_formula_ln", k.qbar_formula_ln},
          {"constraint_lhs", k.constraint_lhs},
          {"constraint_rhs", k.constraint_rhs},
          {"tau", k.tau},
          {"failure_budget", k.failure_budget},
          {"checks", checks}};
}

json lipschitz_json(const objective::LipschitzReport& l) {
  return {{"lmax", l.lmax}, {"lres", l.lres}, {"lresbar", l.lresbar}, {"mu", l.mu}};
}

json failure_json(const adversary::FailureRecord& f) {
  return {{"time", f.time}, {"type", adversary::to_string(f.type)}, {"measured", f.measured}, {"bound", f.bound}};
}

json report_json(const adversary::StallReport& r) {
  json failures = json::array();
  for (const auto& f : r.failures) failures.push_back(failure_json(f));
  json ts = json::array(), fs = json::array(), far = json::array();
  for (const auto& s : r.samples) {
    ts.push_back(s.t);
    fs.push_back(s.f_ratio);
    far.push_back(s.far_count);
  }
  json j{{"steps", r.steps_requested},
         {"steps_run", r.steps_run},
         {"stalled", r.stalled()},
         {"failed_at", r.first_failure ? json(r.first_failure->time) : json(nullptr)},
         {"failure_type", r.first_failure ? json(adversary::to_string(r.first_failure->type)) : json(nullptr)},
         {"failures", failures},
         {"failure_steps", r.failure_steps},
         {"construction_failures", r.construction_failures},
         {"first_construction_failure",
          r.first_construction_failure ? json(*r.first_construction_failure) : json(nullptr)},
         {"value_set_violations", r.value_set_violations},
         {"invariant1_violations", r.invariant1_violations},
         {"invariant5_violations", r.invariant5_violations},
         {"min_available_increasing", r.min_available_increasing},
         {"min_available_decreasing", r.min_available_decreasing},
         {"fast_updates", r.fast_updates},
         {"slow_updates", r.slow_updates},
         {"moving_updates", r.moving_updates},
         {"max_reads", r.max_reads},
         {"mean_reads", r.mean_reads},
         {"min_f_ratio", r.min_f_ratio},
         {"final_f_ratio", r.final_f_ratio},
         {"far_count_final", r.far_count_final},
         {"far_count_mean", r.far_count_mean},
         {"max_recount_drift", r.max_recount_drift},
         {"recount_mismatches", r.recount_mismatches},
         {"max_abs_ideal_gap", r.max_abs_ideal_gap},
         {"max_abs_delta_sum", r.max_abs_delta_sum},
         {"samples", {{"t", ts}, {"f_ratio", fs}, {"far_count", far}}}};
  return j;
}

// q-bounded, read legality and (for small n) the replay oracle.
json validate_trace(const schedule::Trace& tr, std::int64_t q, bool& ok) {
  const auto qb = schedule::validate_q_bounded(tr, q);
  const auto reads = schedule::validate_reads(tr);
  json j{{"q", q},
         {"q_bounded", {{"ok", qb.ok}, {"max_overlap", qb.max_overlap}, {"message", qb.message}}},
         {"reads", {{"ok", reads.ok}, {"checked", reads.checked}, {"message", reads.message}}}};
  ok = qb.ok && reads.ok;
  if (!ok) {
    j["replay"] = {{"skipped", "trace rejected"}};
  } else if (tr.header.n <= 4096) {
    const auto rp = replay::replay_trace(tr);
    j["replay"] = {{"ok", rp.ok}, {"max_abs_diff", rp.max_abs_diff}, {"message", rp.message}};
    ok = ok && rp.ok;
  } else {
    j["replay"] = {{"skipped", "n > 4096"}};
  }
  return j;
}

}  // namespace

Config parse_args(const std::vector<std::string>& args) {
  Config cfg;
  CLI::App app{"Simulator and checks for asynchronous stochastic coordinate descent on f_eps", "acdsim"};
  std::string mode, config_path;
  std::int64_t n = 0, qbar = 0, steps = 0, trials = 0;
  double eps = 0, ratio = 0;
  app.add_option("command", cfg.command, "params | sequential | stall | walks | validate")
      ->check(CLI::IsMember(kCommands));
  std::vector<std::pair<std::string, CLI::Option*>> opts{
      {"n", app.add_option("--n", n, "dimension")},
      {"eps", app.add_option("--eps", eps, "coupling parameter eps")},
      {"ratio", app.add_option("--ratio", ratio, "target lresbar/lmax; eps is derived from it")},
      {"gamma", app.add_option("--gamma", cfg.gamma, "step divisor (>= 1)")},
      {"c", app.add_option("--c", cfg.c, "confidence exponent (>= 1)")},
      {"mode", app.add_option("--mode", mode, "paper | explore")->check(CLI::IsMember({"paper", "explore"}))},
      {"qbar", app.add_option("--qbar", qbar, "asynchrony bound (explore mode, or raise it in paper mode)")},
      {"steps", app.add_option("--steps", steps, "number of updates")},
      {"trials", app.add_option("--trials", trials, "Monte Carlo trials")},
      {"seed", app.add_option("--seed", cfg.seed, "master seed")},
      {"threads", app.add_option("--threads", cfg.threads, "worker threads for trial-level parallelism")},
      {"out", app.add_option("--out", cfg.out, "output file (walks: directory)")},
      {"trace", app.add_option("--trace", cfg.trace, "trace JSONL path")},
      {"validate", app.add_flag("--validate", cfg.validate, "validate the emitted trace")},
  };
  app.add_option("--config", config_path, "JSON file of defaults; flags override it");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::ParseError& e) {
    throw PreconditionError(e.what());
  }

  std::set<std::string> given;
  for (const auto& [key, opt] : opts) {
    if (opt->count() > 0) given.insert(key);
  }
  if (given.count("n")) cfg.n = n;
  if (given.count("eps")) cfg.eps = eps;
  if (given.count("ratio")) cfg.ratio = ratio;
  if (given.count("mode")) cfg.mode = adversary::parse_mode(mode);
  if (given.count("qbar")) cfg.qbar = qbar;
  if (given.count("steps")) cfg.steps = steps;
  if (given.count("trials")) cfg.trials = trials;
  if (!config_path.empty()) apply_file(cfg, config_path, given);
  if (cfg.command.empty()) throw PreconditionError("a command is required: params, sequential, stall, walks or validate");
  if (std::find(kCommands.begin(), kCommands.end(), cfg.command) == kCommands.end()) {
    throw PreconditionError("unknown command '" + cfg.command + "'");
  }
  if (cfg.threads == 0) cfg.threads = 1;
  return cfg;
}

json to_json(const Config& cfg) {
  auto opt = [](const auto& o) { return o ? json(*o) : json(nullptr); };
  return {{"command", cfg.command},
          {"n", opt(cfg.n)},
          {"eps", opt(cfg.eps)},
          {"ratio", opt(cfg.ratio)},
          {"gamma", cfg.gamma},
          {"c", cfg.c},
          {"mode", adversary::to_string(cfg.mode)},
          {"qbar", opt(cfg.qbar)},
          {"steps", opt(cfg.steps)},
          {"trials", opt(cfg.trials)},
          {"seed", cfg.seed},
          {"threads", cfg.threads},
          {"out", cfg.out},
          {"trace", cfg.trace},
          {"validate", cfg.validate}};
}

int cmd_params(const Config& cfg, std::ostream& out, std::ostream& err) {
  json j;
  j["config"] = to_json(cfg);
  const auto p = resolve_params(cfg, 4'000'000, &j, false);
  j["config"]["n"] = p.n;
  j["config"]["eps"] = p.eps;
  int code = kOk;
  try {
    objective::validate(p);
    j["lipschitz"] = lipschitz_json(objective::lipschitz_parameters(p));
    const auto k = adversary::derive_constants(constants_input(cfg, p), false);
    j["constants"] = constants_json(k);
    const double q = static_cast<double>(k.qbar);
    j["verdicts"] = {{"n_ge_qbar_sq_over_4", static_cast<double>(k.n) >= q * q / 4.0},
                     {"enforced_checks_ok", k.enforced_ok()}};
  } catch (const PreconditionError& e) {
    j["error"] = e.what();
    err << "error: " << e.what() << "\n";
    code = kPrecondition;
  }
  emit(cfg.out, out, [&](std::ostream& o) { o << j.dump(2) << "\n"; });
  return code;
}

int cmd_sequential(const Config& cfg, std::ostream& out, std::ostream& err) {
  const auto p = resolve_params(cfg, 100);
  const std::int64_t steps = cfg.steps.value_or(2000);
  const std::int64_t trials = cfg.trials.value_or(1);
  if (steps < 0) throw PreconditionError("steps must be non-negative");
  if (trials < 1) throw PreconditionError("trials must be positive");
  json header = to_json(cfg);
  header["n"] = p.n;
  header["eps"] = p.eps;
  header["steps"] = steps;
  header["trials"] = trials;
  const json lip = lipschitz_json(objective::lipschitz_parameters(p));

  if (trials == 1) {
    const auto traj = sequential::run_sequential(p, steps, cfg.seed);
    emit(cfg.out, out, [&](std::ostream& o) {
      o << "# config " << header.dump() << "\n# lipschitz " << lip.dump() << "\n";
      sequential::write_csv(o, p, traj);
    });
    return kOk;
  }
  const auto mc = sequential::monte_carlo_sequential(p, trials, steps, cfg.seed, cfg.threads);
  const auto v = sequential::check_sandwich(p, mc);
  const json verdict{{"sandwich_ok", v.sandwich_ok},
                     {"expected_sum_ok", v.expected_sum_ok},
                     {"first_sandwich_violation", v.first_sandwich_violation},
                     {"first_sum_violation", v.first_sum_violation},
                     {"worst_sum_z", v.worst_sum_z}};
  emit(cfg.out, out, [&](std::ostream& o) {
    o << "# config " << header.dump() << "\n# lipschitz " << lip.dump() << "\n# verdict " << verdict.dump()
      << "\n";
    sequential::write_csv(o, p, mc);
  });
  if (!(v.sandwich_ok && v.expected_sum_ok)) {
    err << "sequential: mean trajectory left the 4-SE band (verdict " << verdict.dump() << ")\n";
    return kStatistical;
  }
  return kOk;
}

int cmd_stall(const Config& cfg, std::ostream& out, std::ostream& err) {
  const auto p = resolve_params(cfg, 4'000'000);
  objective::validate_stalling(p);
  const auto k = adversary::derive_constants(constants_input(cfg, p), true);
  std::int64_t steps = 0;
  if (cfg.steps) {
    steps = *cfg.steps;
  } else {
    const double horizon = std::pow(static_cast<double>(p.n), cfg.c);
    steps = static_cast<std::int64_t>(std::min(horizon, 1e6));
  }
  if (steps < 0) throw PreconditionError("steps must be non-negative");
  const bool want_trace = !cfg.trace.empty() || cfg.validate;
  if (want_trace && steps < k.qbar) throw PreconditionError("a trace needs at least qbar steps");

  schedule::Trace trace;
  adversary::StallOptions o;
  o.steps = steps;
  o.seed = cfg.seed;
  o.stop_on_failure = cfg.mode == adversary::Mode::paper;
  o.trace = want_trace ? &trace : nullptr;
  const auto r = adversary::run_stall_experiment(p, k, o);

  json config = to_json(cfg);
  config["n"] = p.n;
  config["eps"] = p.eps;
  config["steps"] = steps;
  json j{{"config", config}, {"constants", constants_json(k)}, {"report", report_json(r)}};

  bool trace_ok = true;
  if (cfg.validate) j["validation"] = validate_trace(trace, k.qbar, trace_ok);
  if (!cfg.trace.empty()) {
    std::ofstream f(cfg.trace, std::ios::binary);
    if (!f) throw PreconditionError("cannot write '" + cfg.trace + "'");
    schedule::write_trace(f, trace);
  }
  emit(cfg.out, out, [&](std::ostream& os) { os << j.dump(2) << "\n"; });

  if (!trace_ok) {
    err << "stall: emitted trace failed validation\n";
    return kConstruction;
  }
  if (r.construction_failures > 0) {
    err << "stall: " << r.construction_failures << " updates could not reach their target interval (first at t = "
        << *r.first_construction_failure << ")\n";
    return kConstruction;
  }
  if (r.first_failure) {
    err << "stall: " << adversary::to_string(r.first_failure->type) << " failure at t = " << r.first_failure->time
        << " (measured " << r.first_failure->measured << ", bound " << r.first_failure->bound << ")\n";
    return kStatistical;
  }
  return kOk;
}

int cmd_walks(const Config& cfg, std::ostream& out, std::ostream& err) {
  using namespace walks;
  const std::int64_t y_half = cfg.steps.value_or(20'000);
  const std::int64_t r_steps = cfg.steps.value_or(10'000);
  const std::int64_t trials = cfg.trials.value_or(100'000);
  const std::int64_t tail_n = cfg.n.value_or(64);
  if (y_half < 1 || trials < 2) throw PreconditionError("steps must be >= 1 and trials >= 2");
  const std::int64_t stride = std::max<std::int64_t>(1, y_half / 100);
  const bool files = !cfg.out.empty();
  if (files) std::filesystem::create_directories(cfg.out);
  auto open = [&](const std::string& name) {
    std::ofstream f(std::filesystem::path(cfg.out) / name, std::ios::binary);
    if (!f) throw PreconditionError("cannot write into '" + cfg.out + "'");
    return f;
  };
  bool all_ok = true;
  json j;
  j["config"] = to_json(cfg);

  {
    YWalk y;
    std::vector<WalkDistribution> kept{y.current()};
    BoundReport tail, mono, odd;
    tail.worst_margin = mono.worst_margin = odd.worst_margin = -1.0;
    auto merge = [](BoundReport& into, const BoundReport& r) {
      into.worst_margin = std::max(into.worst_margin, r.worst_margin);
      if (!r.ok && into.ok) {
        into.ok = false;
        into.time = r.time;
        into.first_bad = r.first_bad;
      }
    };
    for (std::int64_t i = 1; i <= y_half; ++i) {
      merge(odd, y_walk_odd_tail_check(y.half_step(), 60));
      y.advance();
      merge(tail, y_walk_tail_check(y.current(), 60));
      merge(mono, y_walk_monotonicity_check(y.current()));
      if (i % stride == 0) kept.push_back(y.current());
    }
    auto js = [](const BoundReport& r) {
      return json{{"ok", r.ok}, {"worst_margin", r.worst_margin}, {"time", r.time}, {"first_bad", r.first_bad}};
    };
    j["y_walk"] = {{"t_half", y_half},
                   {"tail", js(tail)},
                   {"monotone", js(mono)},
                   {"odd_tail", js(odd)},
                   {"lost_mass", y.current().lost},
                   {"total_minus_one", y.current().total() - 1.0}};
    all_ok = all_ok && tail.ok && mono.ok && odd.ok;
    if (files) {
      auto f = open("y_walk.csv");
      write_csv(f, kept);
    }
  }

  {
    std::vector<std::pair<std::string, std::vector<double>>> seqs;
    seqs.emplace_back("zeros", std::vector<double>(static_cast<std::size_t>(r_steps), 0.0));
    seqs.emplace_back("ones", std::vector<double>(static_cast<std::size_t>(r_steps), 1.0));
    std::vector<double> alt(static_cast<std::size_t>(r_steps)), rnd(static_cast<std::size_t>(r_steps));
    CounterRng rng(cfg.seed, 0, Stream::state);
    for (std::size_t t = 0; t < alt.size(); ++t) {
      alt[t] = static_cast<double>(t % 2);
      rnd[t] = rng.uniform();
    }
    seqs.emplace_back("alternating", alt);
    seqs.emplace_back("random", rnd);
    json rj = json::object();
    for (const auto& [name, a] : seqs) {
      RWalk w;
      bool ok = true;
      double worst = -1.0;
      std::vector<WalkDistribution> kept{w.current()};
      const std::int64_t rs = std::max<std::int64_t>(1, r_steps / 100);
      for (std::int64_t t = 0; t < r_steps; ++t) {
        w.advance(a[static_cast<std::size_t>(t)]);
        const auto c = r_walk_tail_check(w.current(), 120);
        ok = ok && c.ok;
        worst = std::max(worst, c.worst_margin);
        if ((t + 1) % rs == 0) kept.push_back(w.current());
      }
      rj[name] = {{"ok", ok}, {"worst_margin", worst}, {"lost_mass", w.current().lost}};
      all_ok = all_ok && ok;
      if (files) {
        auto f = open("r_walk_" + name + ".csv");
        write_csv(f, kept);
      }
    }
    j["r_walk"] = {{"steps", r_steps}, {"sequences", rj}};
  }

  {
    json cj = json::object();
    for (auto policy : {S2Policy::zeros, S2Policy::random_nonpositive, S2Policy::adversary_replay}) {
      const auto c = coupling_monte_carlo(trials, 500, cfg.seed, policy, cfg.threads);
      cj[to_string(policy)] = {{"trials", c.trials}, {"violations", c.violations}, {"max_y", c.max_y}};
      all_ok = all_ok && c.violations == 0;
    }
    j["coupling"] = cj;
  }

  {
    const auto e = x_walk_tail_estimate(tail_n, cfg.c, trials, cfg.seed, tail_n, cfg.threads);
    j["balance_tail"] = {{"n", e.n},         {"c", e.c},           {"b1", e.b1},
                         {"horizon", e.horizon}, {"trials", e.trials}, {"exceedances", e.exceedances},
                         {"max_gap", e.max_gap}, {"p_hat", e.p_hat},   {"wilson_lo", e.lo},
                         {"wilson_hi", e.hi},    {"budget", e.budget}, {"ok", e.ok}};
    all_ok = all_ok && e.ok;
  }

  {
    const std::vector<double> gammas{4, 5, 6, 7, 8};
    const auto r = reappearing_char_mc(10'000, 100, gammas, trials, cfg.seed, cfg.threads);
    json rows = json::array();
    for (const auto& row : r.rows) {
      rows.push_back({{"gamma", row.gamma},
                      {"hits", row.hits},
                      {"empirical", row.empirical},
                      {"se", row.se},
                      {"bound", row.bound},
                      {"ok", row.ok}});
    }
    j["reappearing"] = {{"n", r.n}, {"length", r.length}, {"trials", r.trials}, {"rows", rows}};
    all_ok = all_ok && r.ok();
    if (files) {
      auto f = open("reappearing.csv");
      write_csv(f, r);
    }
  }

  j["all_ok"] = all_ok;
  if (files) {
    auto f = open("summary.json");
    f << j.dump(2) << "\n";
  }
  out << j.dump(2) << "\n";
  if (!all_ok) {
    err << "walks: at least one check failed (see all_ok and the per-check ok fields)\n";
    return kStatistical;
  }
  return kOk;
}

int cmd_validate(const Config& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.trace.empty()) throw PreconditionError("validate needs --trace <file>");
  std::ifstream in(cfg.trace);
  if (!in) throw PreconditionError("cannot open '" + cfg.trace + "'");
  const auto tr = schedule::read_trace(in);
  const std::int64_t q = cfg.qbar.value_or(tr.header.qbar);
  bool ok = true;
  json j{{"config", to_json(cfg)},
         {"header", {{"n", tr.header.n}, {"qbar", tr.header.qbar}, {"eps", tr.header.eps}, {"gamma", tr.header.gamma}}},
         {"events", tr.events.size()}};
  j["validation"] = validate_trace(tr, q, ok);
  j["ok"] = ok;
  emit(cfg.out, out, [&](std::ostream& o) { o << j.dump(2) << "\n"; });
  if (!ok) {
    err << "validate: trace rejected\n";
    return kConstruction;
  }
  return kOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const Config cfg = parse_args(args);
    if (cfg.command == "params") return cmd_params(cfg, out, err);
    if (cfg.command == "sequential") return cmd_sequential(cfg, out, err);
    if (cfg.command == "stall") return cmd_stall(cfg, out, err);
    if (cfg.command == "walks") return cmd_walks(cfg, out, err);
    return cmd_validate(cfg, out, err);
  } catch (const HelpRequested& h) {
    out << h.text;
    return kOk;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kPrecondition;
  } catch (const ConstructionError& e) {
    err << "construction failure: " << e.what() << "\n";
    return kConstruction;
  }
}

}  // namespace acd::cli
