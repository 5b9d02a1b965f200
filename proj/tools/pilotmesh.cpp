#include <charconv>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"

#include "pilotmesh/io/json_io.hpp"
#include "pilotmesh/io/logging.hpp"
#include "pilotmesh/pmedian/oracle.hpp"
#include "pilotmesh/pmedian/solver.hpp"
#include "pilotmesh/qoe/experiment.hpp"
#include "pilotmesh/qoe/qoe.hpp"
#include "pilotmesh/sim/run.hpp"
#include "pilotmesh/sim/scenario.hpp"

namespace fs = std::filesystem;
using namespace pilotmesh;
using io::Json;

namespace {

enum Exit : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kMissingFile = 3,
  kMalformedJson = 4,
  kSchema = 5,
  kInfeasible = 6,
};

struct Common {
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::string config;
  std::string out = ".";
};

void merge(Json& dst, const Json& src) {
  for (auto it = src.begin(); it != src.end(); ++it) dst[it.key()] = it.value();
}

Json meta(const std::string& command, const Common& c, const Json& extra = {}) {
  Json m;
  m["version"] = io::kVersion;
  m["command"] = command;
  m["seed"] = c.seed;
  if (extra.is_object()) merge(m, extra);
  return m;
}

std::string csv_stamp(const Json& m) { return "# " + m.dump() + "\n"; }

sim::SimConfig load_config(const Common& c) {
  sim::SimConfig cfg;
  if (!c.config.empty()) cfg = io::config_from_json(io::read_json(c.config));
  if (c.seed_given || c.config.empty()) cfg.seed = c.seed;
  return cfg;
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) throw CLI::ValidationError("--seeds", "expected a..b");
  auto num = [&](std::string_view part) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc{} || p != part.data() + part.size()) throw CLI::ValidationError("--seeds", "expected a..b");
    return v;
  };
  const std::string_view sv(s);
  const auto a = num(sv.substr(0, dots));
  const auto b = num(sv.substr(dots + 2));
  if (b < a) throw CLI::ValidationError("--seeds", "empty range");
  return {a, b};
}

std::vector<int> parse_ratings(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    int v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size()) throw CLI::ValidationError("--ratings", "bad rating " + tok);
    out.push_back(v);
  }
  return out;
}

// Instance from an instance file or a scenario file; scenarios take P and
// P_cap from the config.
pmedian::Instance load_instance(const std::string& path, const sim::SimConfig& cfg) {
  const Json j = io::read_json(path);
  if (io::is_scenario(j)) {
    return sim::scenario_from_topology(io::topology_from_json(j), cfg.n_pilots, cfg.p_cap_mb).instance;
  }
  return io::instance_from_json(j);
}

int cmd_gen(const Common& c) {
  const sim::SimConfig cfg = load_config(c);
  const sim::Scenario sc = sim::generate_scenario(cfg);
  Json j;
  j["meta"] = meta("gen", c, Json{{"config", io::to_json(cfg)}});
  merge(j, io::to_json(sc.topology));
  const fs::path out = fs::path(c.out) / "scenario.json";
  io::write_text(out, io::dump(j));
  std::cout << fmt::format("wrote {} ({} devices, {} eligible)\n", out.string(), sc.topology.devices.size(),
                           sc.eligible.size());
  return kOk;
}

int cmd_solve(const Common& c, const std::string& input, bool trace, bool as_printed, std::size_t max_iter) {
  const sim::SimConfig cfg = load_config(c);
  const pmedian::Instance inst = load_instance(input, cfg);
  pmedian::SolverOptions opts = as_printed ? pmedian::SolverOptions::as_printed() : pmedian::SolverOptions{};
  opts.capacity_model = cfg.capacity_model;
  if (max_iter > 0) opts.max_iter = max_iter;
  const pmedian::SolveReport r = pmedian::solve(inst, opts);

  Json j;
  j["meta"] = meta("solve", c, Json{{"input", fs::path(input).filename().string()}, {"as_printed", as_printed}});
  merge(j, io::to_json(r, trace));
  io::write_text(fs::path(c.out) / "solve.json", io::dump(j));
  if (trace) {
    std::string csv = csv_stamp(j["meta"]) + "k,dual,best_dual,primal,best_primal\n";
    for (const auto& it : r.trace) {
      csv += fmt::format("{},{:.4f},{:.4f},{:.4f},{:.4f}\n", it.k, it.dual, it.best_dual, it.primal, it.best_primal);
    }
    io::write_text(fs::path(c.out) / "trace.csv", csv);
  }
  std::cout << fmt::format("objective {:.4f}\ndual_bound {:.4f}\nopen_pilots {}\niterations {} ({})\n",
                           r.primal_objective, r.dual_bound, Json(r.open_pilots()).dump(), r.iterations,
                           pmedian::to_string(r.stop));
  return r.capacity_violations == 0 ? kOk : kInfeasible;
}

int cmd_oracle(const Common& c, const std::string& input) {
  const sim::SimConfig cfg = load_config(c);
  const pmedian::Instance inst = load_instance(input, cfg);
  const pmedian::OracleResult r = pmedian::brute_force_oracle(inst, cfg.capacity_model);
  Json j;
  j["meta"] = meta("oracle", c, Json{{"input", fs::path(input).filename().string()}});
  merge(j, io::to_json(r));
  io::write_text(fs::path(c.out) / "oracle.json", io::dump(j));
  if (!r.feasible) {
    std::cout << "infeasible\n";
    return kInfeasible;
  }
  std::cout << fmt::format("objective {:.4f}\nopen_pilots {}\n", r.objective, Json(r.assignment.open_pilots()).dump());
  return kOk;
}

struct SimFlags {
  std::string mode;
  std::string strategy;
  std::optional<std::size_t> params;
  std::optional<double> new_file_frac;
  std::string seeds;
  std::string scenario;
  bool events = false;
  unsigned threads = 0;
};

int cmd_simulate(const Common& c, const SimFlags& f) {
  sim::SimConfig cfg = load_config(c);
  if (!f.strategy.empty()) cfg.strategy = sim::parse_strategy(f.strategy);
  if (f.params) cfg.n_params = *f.params;
  if (f.new_file_frac) cfg.new_file_fraction = *f.new_file_frac;
  std::vector<sim::Mode> modes;
  const std::string mode = f.mode.empty() ? sim::to_string(cfg.mode) : f.mode;
  if (mode == "both") {
    modes = {sim::Mode::d2d_only, sim::Mode::dht_d2d};
  } else {
    modes = {sim::parse_mode(mode)};
  }

  std::optional<sim::Scenario> fixed;
  if (!f.scenario.empty()) {
    Topology topo = io::topology_from_json(io::read_json(f.scenario));
    cfg.isd = topo.isd;
    cfg.d2d_range = topo.d2d_range;
    cfg.widths = topo.widths;
    cfg.n_users = topo.devices.size();
    cfg.n_eligible = topo.eligible().size();
    fixed = sim::scenario_from_topology(std::move(topo), cfg.n_pilots, cfg.p_cap_mb);
  }
  cfg.validate();

  std::uint64_t first = cfg.seed;
  std::uint64_t last = cfg.seed;
  if (!f.seeds.empty()) std::tie(first, last) = parse_seed_range(f.seeds);

  Json extra;
  extra["config"] = io::to_json(cfg);
  extra["modes"] = mode;
  if (!f.seeds.empty()) extra["seeds"] = f.seeds;
  if (!f.scenario.empty()) extra["scenario"] = fs::path(f.scenario).filename().string();
  Common stamped = c;
  stamped.seed = cfg.seed;
  const Json m = meta("simulate", stamped, extra);

  std::vector<std::vector<sim::RunMetrics>> per_mode;
  for (sim::Mode md : modes) {
    sim::SimConfig mc = cfg;
    mc.mode = md;
    per_mode.push_back(sim::run_seeds(mc, first, last, f.threads, fixed ? &*fixed : nullptr));
  }

  std::ostringstream csv;
  csv << csv_stamp(m) << sim::csv_header() << '\n';
  for (std::size_t s = 0; s <= last - first; ++s) {
    for (const auto& runs : per_mode) sim::write_csv_rows(csv, runs[s]);
  }
  io::write_text(fs::path(c.out) / "metrics.csv", csv.str());

  if (f.events) {
    std::string lines = m.dump() + "\n";
    for (std::uint64_t seed = first; seed <= last; ++seed) {
      for (sim::Mode md : modes) {
        sim::SimConfig mc = cfg;
        mc.mode = md;
        mc.seed = seed;
        auto sink = [&](const sim::LookupEvent& e) {
          Json ev = Json::parse(sim::event_json_line(e));
          Json line{{"seed", seed}, {"mode", sim::to_string(md)}};
          merge(line, ev);
          lines += line.dump() + "\n";
        };
        if (fixed) {
          sim::run(mc, *fixed, sink);
        } else {
          sim::run(mc, sink);
        }
      }
    }
    io::write_text(fs::path(c.out) / "events.jsonl", lines);
  }

  for (std::size_t k = 0; k < modes.size(); ++k) {
    double total = 0.0;
    for (const auto& r : per_mode[k]) total += r.mean_us();
    std::cout << fmt::format("{} mean_us {:.4f}\n", sim::to_string(modes[k]),
                             total / static_cast<double>(per_mode[k].size()));
  }
  return kOk;
}

int cmd_qoe_eval(const Common& c, const std::string& input, const std::string& ratings) {
  qoe::SatisfactionReport report;
  if (!input.empty()) {
    report = io::report_from_json(io::read_json(input));
  } else if (!ratings.empty()) {
    try {
      report = qoe::SatisfactionReport::from_ratings(parse_ratings(ratings));
    } catch (const std::out_of_range& e) {
      throw io::SchemaError("/ratings", e.what());
    }
  } else {
    throw CLI::ValidationError("qoe-eval", "give a report file or --ratings");
  }
  const double score = qoe::us_overall(report);
  Json j;
  j["meta"] = meta("qoe-eval", c);
  merge(j, io::to_json(report));
  j["us_overall"] = score;
  io::write_text(fs::path(c.out) / "qoe_eval.json", io::dump(j));
  std::cout << fmt::format("{:.4f}\n", score);
  return kOk;
}

int cmd_qoe_mc(const Common& c, std::size_t k, std::size_t trials, unsigned threads) {
  const qoe::ExperimentResult r = qoe::random_harmonic_experiment(k, trials, c.seed, qoe::kUniformRatings, threads);
  const Json m = meta("qoe-mc", c, Json{{"k", k}, {"trials", trials}, {"distribution", "uniform"}});
  std::string csv = csv_stamp(m) + "trial,us_overall\n";
  for (std::size_t t = 0; t < r.samples.size(); ++t) csv += fmt::format("{},{:.4f}\n", t, r.samples[t]);
  io::write_text(fs::path(c.out) / "qoe_mc.csv", csv);
  std::cout << fmt::format("mean {:.4f}\nstddev {:.4f}\nabs_q99 {:.4f}\nabs_max {:.4f}\nbelow_0.6 {:.4f}\n", r.mean,
                           r.stddev, r.abs_q99, r.abs_max, r.fraction_below(0.6));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  io::init_logging();
  CLI::App app{"pilotmesh: pilot placement, DHT-over-D2D lookup simulation and QoE scoring"};
  app.set_version_flag("--version", io::kVersion);
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub, bool with_config) {
    sub->add_option("--seed", common.seed, "Random seed")->each([&](const std::string&) { common.seed_given = true; });
    if (with_config) sub->add_option("--config", common.config, "SimConfig JSON file")->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "Output directory")->capture_default_str();
  };

  auto* gen = app.add_subcommand("gen", "Generate a scenario");
  add_common(gen, true);

  std::string input;
  bool trace = false;
  bool as_printed = false;
  std::size_t max_iter = 0;
  auto* solve = app.add_subcommand("solve", "Place pilots with the Lagrangian solver");
  add_common(solve, true);
  solve->add_option("input", input, "Instance or scenario JSON")->required();
  solve->add_flag("--trace", trace, "Write the per-iteration dual series");
  solve->add_flag("--as-printed", as_printed, "Use the published step, sign and halving rules");
  solve->add_option("--max-iter", max_iter, "Iteration limit");

  auto* oracle = app.add_subcommand("oracle", "Exact optimum by enumeration (small instances)");
  add_common(oracle, true);
  oracle->add_option("input", input, "Instance or scenario JSON")->required();

  SimFlags sf;
  auto* simulate = app.add_subcommand("simulate", "Run the lookup simulation");
  add_common(simulate, true);
  simulate->add_option("--mode", sf.mode, "d2d_only, dht_d2d or both")
      ->check(CLI::IsMember({"d2d_only", "dht_d2d", "both"}));
  simulate->add_option("--strategy", sf.strategy, "random or pmedian")->check(CLI::IsMember({"random", "pmedian"}));
  simulate->add_option("--params", sf.params, "Parameters rated per user")->check(CLI::Range(1, 9));
  simulate->add_option("--new-file-frac", sf.new_file_frac, "Share of lookups for new files")
      ->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--seeds", sf.seeds, "Seed range a..b");
  simulate->add_option("--scenario", sf.scenario, "Scenario JSON from gen")->check(CLI::ExistingFile);
  simulate->add_flag("--events", sf.events, "Write the JSON-lines lookup log");
  simulate->add_option("--threads", sf.threads, "Worker threads (0 = hardware)");

  std::string ratings;
  auto* qeval = app.add_subcommand("qoe-eval", "Score a satisfaction report");
  add_common(qeval, false);
  qeval->add_option("input", input, "Report JSON {params:[{name, rating}]}");
  qeval->add_option("--ratings", ratings, "Comma-separated ratings in rank order");

  std::size_t k = 10000;
  std::size_t trials = 1000;
  unsigned threads = 0;
  auto* qmc = app.add_subcommand("qoe-mc", "Monte Carlo of us_overall under uniform ratings");
  add_common(qmc, false);
  qmc->add_option("--k", k, "Ratings per trial")->capture_default_str()->check(CLI::PositiveNumber);
  qmc->add_option("--trials", trials, "Trials")->capture_default_str()->check(CLI::PositiveNumber);
  qmc->add_option("--threads", threads, "Worker threads (0 = hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return cmd_gen(common);
    if (*solve) return cmd_solve(common, input, trace, as_printed, max_iter);
    if (*oracle) return cmd_oracle(common, input);
    if (*simulate) return cmd_simulate(common, sf);
    if (*qeval) return cmd_qoe_eval(common, input, ratings);
    if (*qmc) return cmd_qoe_mc(common, k, trials, threads);
  } catch (const io::FileError& e) {
    spdlog::error("{}", e.what());
    return kMissingFile;
  } catch (const io::ParseError& e) {
    spdlog::error("malformed JSON: {}", e.what());
    return kMalformedJson;
  } catch (const io::SchemaError& e) {
    spdlog::error("schema violation at {}", e.what());
    return kSchema;
  } catch (const pmedian::InfeasibleInstance& e) {
    spdlog::error("infeasible instance: {}", e.what());
    return kInfeasible;
  } catch (const CLI::ValidationError& e) {
    spdlog::error("{}", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kFailure;
  }
  return kUsage;
}
