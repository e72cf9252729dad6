// Copyright 2026 The mtnas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// mtnas command-line driver.
//
//   mtnas search <config.json> [--seed N] [--generations N] [--resume CKPT]
//                              [--parallel N] [--output-dir DIR]
//   mtnas decode <genome-key>
//   mtnas cost <genome-key> [--profile P.json] [--resolution HxW] [--stem-only]
//   mtnas reward-eval <config.json> <metrics.csv> (--latency S | --genome KEY)
//   mtnas metrics <model.csv> <baseline.csv> <specs.csv>
//   mtnas jared-sim [--seeds LIST] [--lambda L] [--scenario S.json] [--per-seed]
//
// Exit status: 0 success, 1 usage or configuration error, 2 runtime failure.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mtnas/mtnas.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

// Bad user input (arguments, files, configs). Maps to exit status 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::ifstream open_input(const fs::path& p) {
  std::ifstream is(p);
  if (!is) throw mtnas::ConfigFileError("cannot open " + p.string());
  return is;
}

mtnas::Resolution parse_resolution(const std::string& s) {
  const auto x = s.find('x');
  int h = 0;
  int w = 0;
  try {
    if (x == std::string::npos) throw std::invalid_argument("no x");
    std::size_t used = 0;
    h = std::stoi(s.substr(0, x), &used);
    if (used != x) throw std::invalid_argument("junk");
    w = std::stoi(s.substr(x + 1), &used);
    if (used != s.size() - x - 1) throw std::invalid_argument("junk");
  } catch (const std::exception&) {
    throw UsageError("--resolution must look like 256x256, got '" + s + "'");
  }
  if (h <= 0 || w <= 0) throw UsageError("--resolution must be positive");
  return {h, w};
}

// "0-9", "1,4,7" or a mix such as "0-2,10".
std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string part;
  try {
    while (std::getline(ss, part, ',')) {
      const auto dash = part.find('-');
      if (dash == std::string::npos) {
        out.push_back(std::stoull(part));
      } else {
        const auto lo = std::stoull(part.substr(0, dash));
        const auto hi = std::stoull(part.substr(dash + 1));
        if (hi < lo) throw std::invalid_argument("empty range");
        for (auto v = lo; v <= hi; ++v) out.push_back(v);
      }
    }
  } catch (const std::exception&) {
    throw UsageError("--seeds must be a list like 0-9 or 1,2,3, got '" + s + "'");
  }
  if (out.empty()) throw UsageError("--seeds is empty");
  return out;
}

// --- search ---------------------------------------------------------------

struct SearchArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> generations;
  std::string resume;
  std::size_t parallel = 1;
  std::string output_dir;
};

void write_candidates_csv(const fs::path& p, const std::vector<mtnas::EvaluatedCandidate<16>>& rows,
                          const std::vector<mtnas::TaskSpec>& tasks) {
  std::ostringstream os;
  mtnas::write_history(os, rows, tasks);
  mtnas::write_file_atomic(p, os.str());
}

int cmd_search(const SearchArgs& a) {
  mtnas::EngineConfig cfg = mtnas::load_config(a.config);
  if (a.seed) cfg.evolution.seed = *a.seed;
  if (a.generations) cfg.evolution.generations = *a.generations;
  if (!a.output_dir.empty()) cfg.output_dir = a.output_dir;
  if (a.parallel < 1) throw UsageError("--parallel must be >= 1");
  cfg.evolution.validate();

  std::unique_ptr<mtnas::Evaluator<16>> evaluator;
  if (cfg.evaluator.kind == mtnas::EvaluatorKind::kSurrogate) {
    evaluator = std::make_unique<mtnas::SurrogateEvaluator<16>>(cfg.evaluator.surrogate, cfg.tasks());
  } else {
    auto is = open_input(cfg.evaluator.lookup_path);
    evaluator = std::make_unique<mtnas::LookupEvaluator<16>>(mtnas::LookupEvaluator<16>::load(is));
  }
  mtnas::Objective<16> obj{evaluator.get(), cfg.reward, cfg.hardware, cfg.input_resolution};

  const fs::path out = cfg.output_dir;
  const fs::path ckpt_dir = out / "checkpoints";
  fs::create_directories(ckpt_dir);
  const json snapshot = mtnas::config_to_json(cfg);
  const std::string started = utc_now();

  std::vector<std::string> checkpoints;
  auto sink = [&](const mtnas::SearchState<16>& s) {
    const std::size_t children = s.history.size() - cfg.evolution.population_size;
    const std::string name = "checkpoint_" + std::to_string(children) + ".json";
    mtnas::write_file_atomic(ckpt_dir / name, mtnas::checkpoint_to_json(s, cfg.evolution, snapshot).dump());
    checkpoints.push_back("checkpoints/" + name);
    write_candidates_csv(out / "history.csv", s.history, cfg.tasks());
  };

  mtnas::SearchState<16> state;
  if (!a.resume.empty()) {
    json doc;
    try {
      doc = json::parse(mtnas::read_file(a.resume));
    } catch (const json::parse_error& e) {
      throw mtnas::ParseError(a.resume + ": " + e.what(), e.byte);
    }
    state = mtnas::checkpoint_from_json<16>(doc);
    bool compatible = false;
    try {
      const auto& saved = doc.at("evolution");
      compatible = saved.at("population_size").get<std::size_t>() == cfg.evolution.population_size &&
                   saved.at("tournament_size").get<std::size_t>() == cfg.evolution.tournament_size &&
                   saved.at("seed").get<std::uint64_t>() == cfg.evolution.seed;
    } catch (const json::exception& e) {
      throw mtnas::ParseError(a.resume + ": " + e.what(), 0);
    }
    if (!compatible) {
      throw UsageError("checkpoint was written with a different population, tournament or seed");
    }
    if (state.history.size() > cfg.evolution.population_size + cfg.evolution.generations) {
      throw UsageError("checkpoint already holds more generations than requested");
    }
    mtnas::advance(state, cfg.evolution, obj, mtnas::CheckpointSink<16>(sink), a.parallel);
  } else {
    state = mtnas::run(cfg.evolution, obj, mtnas::CheckpointSink<16>(sink), a.parallel);
  }
  if (checkpoints.empty()) sink(state);  // resumed at the final generation

  const auto& best = mtnas::best_candidate(state.history);
  write_candidates_csv(out / "history.csv", state.history, cfg.tasks());
  write_candidates_csv(out / "pareto.csv", mtnas::pareto_front(state.history), cfg.tasks());
  mtnas::write_file_atomic(out / "best_architecture.csv",
                           mtnas::architecture_to_string(mtnas::decode(best.genome)));

  json manifest = {
      {"format", "mtnas-manifest"},
      {"version", 1},
      {"engine_version", mtnas::kVersion},
      {"seed", cfg.evolution.seed},
      {"generations", cfg.evolution.generations},
      {"parallel", a.parallel},
      {"deterministic", a.parallel == 1},
      {"started_at", started},
      {"finished_at", utc_now()},
      {"config", snapshot},
      {"history", "history.csv"},
      {"history_rows", state.history.size()},
      {"checkpoints", checkpoints},
      {"best_architecture", "best_architecture.csv"},
      {"best_genome", mtnas::encode_key(best.genome)},
      {"best_reward", best.score.reward},
      {"pareto", "pareto.csv"},
  };
  if (!a.resume.empty()) manifest["resumed_from"] = fs::absolute(a.resume).string();
  mtnas::write_file_atomic(out / "manifest.json", manifest.dump(2) + "\n");
  std::cout << (out / "manifest.json").string() << '\n';
  return kExitOk;
}

// --- decode / cost ----------------------------------------------------------

int cmd_decode(const std::string& key) {
  mtnas::write_architecture(std::cout, mtnas::decode(mtnas::decode_key<16>(key)));
  return kExitOk;
}

int cmd_cost(const std::string& key, const std::string& profile_path, const std::string& resolution,
             bool stem_only) {
  mtnas::HardwareProfile profile;
  if (!profile_path.empty()) {
    try {
      profile = mtnas::profile_from_json(json::parse(mtnas::read_file(profile_path)), "profile");
    } catch (const json::parse_error& e) {
      throw mtnas::ParseError(profile_path + ": " + e.what(), e.byte);
    }
  }
  mtnas::Architecture arch;
  if (stem_only) {
    arch.rows.push_back(mtnas::stem_row());
  } else {
    if (key.empty()) throw UsageError("cost needs a genome key unless --stem-only is given");
    arch = mtnas::decode(mtnas::decode_key<16>(key));
  }
  const mtnas::Resolution res = resolution.empty() ? mtnas::Resolution{} : parse_resolution(resolution);
  mtnas::write_cost_report(std::cout, mtnas::architecture_cost(arch, res, profile));
  return kExitOk;
}

// --- reward / metrics ---------------------------------------------------------

int cmd_reward_eval(const std::string& config, const std::string& metrics_path,
                    std::optional<double> latency, const std::string& genome) {
  const mtnas::EngineConfig cfg = mtnas::load_config(config);
  auto is = open_input(metrics_path);
  const mtnas::MetricReport report = mtnas::read_metric_report(is);
  mtnas::validate_report(report, cfg.tasks());
  if (latency.has_value() == !genome.empty()) {
    throw UsageError("reward-eval needs exactly one of --latency or --genome");
  }
  const double lat = latency ? *latency
                             : mtnas::estimated_latency(mtnas::decode_key<16>(genome), cfg.hardware,
                                                        cfg.input_resolution);
  const auto score = mtnas::reward(mtnas::report_accuracy(report, cfg.tasks()), lat, cfg.reward);
  std::cout << "acc,latency_s,target_latency_s,reward,within_budget\n"
            << mtnas::format_double(score.acc) << ',' << mtnas::format_double(score.latency_s) << ','
            << mtnas::format_double(cfg.reward.target_latency_s) << ','
            << mtnas::format_double(score.reward) << ',' << (score.within_budget ? "true" : "false")
            << '\n';
  return kExitOk;
}

int cmd_metrics(const std::string& model_path, const std::string& baseline_path,
                const std::string& specs_path) {
  auto ms = open_input(model_path);
  auto bs = open_input(baseline_path);
  auto ss = open_input(specs_path);
  const auto model = mtnas::read_metric_report(ms);
  const auto baseline = mtnas::read_metric_report(bs);
  const auto specs = mtnas::read_metric_specs(ss);
  mtnas::write_delta_table(std::cout, mtnas::compute_deltas(model, baseline, specs));
  return kExitOk;
}

// --- jared-sim ----------------------------------------------------------------

mtnas::ToyScenario scenario_from_json(const json& j) {
  mtnas::detail::ObjectReader r(j, "scenario");
  mtnas::ToyScenario sc;
  sc.train_size = r.count_or("train_size", sc.train_size);
  sc.test_size = r.count_or("test_size", sc.test_size);
  sc.depth_min = r.number_or("depth_min", sc.depth_min);
  sc.depth_max = r.number_or("depth_max", sc.depth_max);
  sc.cue_noise = r.number_or("cue_noise", sc.cue_noise);
  sc.iterations = r.count_or("iterations", sc.iterations);
  sc.step = r.number_or("step", sc.step);
  sc.init_scale = r.number_or("init_scale", sc.init_scale);
  r.finish();
  sc.validate();
  return sc;
}

int cmd_jared_sim(const std::string& seeds_arg, double lambda, const std::string& scenario_path,
                  bool per_seed) {
  const auto seeds = parse_seed_list(seeds_arg);
  mtnas::ToyScenario sc;
  if (!scenario_path.empty()) {
    try {
      sc = scenario_from_json(json::parse(mtnas::read_file(scenario_path)));
    } catch (const json::parse_error& e) {
      throw mtnas::ParseError(scenario_path + ": " + e.what(), e.byte);
    }
  }
  if (!(lambda >= 0)) throw UsageError("--lambda must be >= 0");
  const auto l1 = mtnas::toy_depth_experiment(seeds, 0.0, sc);
  const auto jared = mtnas::toy_depth_experiment(seeds, lambda, sc);
  if (per_seed) {
    std::cout << "loss,seed,abs_err,rel_err,diverged\n";
    for (const auto* r : {&l1, &jared}) {
      for (const auto& run : r->runs) {
        std::cout << (r == &l1 ? "l1" : "jared") << ',' << run.seed << ','
                  << mtnas::format_double(run.abs_err) << ',' << mtnas::format_double(run.rel_err) << ','
                  << (run.diverged ? "true" : "false") << '\n';
      }
    }
    return kExitOk;
  }
  mtnas::write_toy_summary_header(std::cout);
  mtnas::write_toy_summary_row(std::cout, "l1", l1);
  mtnas::write_toy_summary_row(std::cout, "jared", jared);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hardware-aware multi-task architecture search engine"};
  app.require_subcommand(1);
  app.set_version_flag("--version", mtnas::kVersion);

  SearchArgs search;
  auto* s = app.add_subcommand("search", "Run regularized evolution from a config file");
  s->add_option("config", search.config, "Engine config (JSON)")->required();
  s->add_option("--seed", search.seed, "Override evolution.seed");
  s->add_option("--generations", search.generations, "Override evolution.generations");
  s->add_option("--resume", search.resume, "Continue from a checkpoint file");
  s->add_option("--parallel", search.parallel, "Children evaluated concurrently per step (breaks determinism)");
  s->add_option("--output-dir", search.output_dir, "Override output_dir");

  std::string key;
  auto* d = app.add_subcommand("decode", "Print the architecture table of a genome key");
  d->add_option("genome", key, "Genome key")->required();

  std::string cost_key, profile, resolution;
  bool stem_only = false;
  auto* c = app.add_subcommand("cost", "Per-layer MAC, parameter and latency report");
  c->add_option("genome", cost_key, "Genome key");
  c->add_option("--profile", profile, "Hardware profile (JSON)");
  c->add_option("--resolution", resolution, "Input size HxW (default 256x256)");
  c->add_flag("--stem-only", stem_only, "Cost only the fixed stem layer");

  std::string re_config, re_metrics, re_genome;
  std::optional<double> re_latency;
  auto* r = app.add_subcommand("reward-eval", "Score a metric report under a config's reward");
  r->add_option("config", re_config, "Engine config (JSON)")->required();
  r->add_option("metrics", re_metrics, "Metric report (CSV)")->required();
  r->add_option("--latency", re_latency, "Measured latency in seconds");
  r->add_option("--genome", re_genome, "Estimate latency from this genome with the cost model");

  std::string m_model, m_base, m_specs;
  auto* m = app.add_subcommand("metrics", "Relative delta table of a model against a baseline");
  m->add_option("model", m_model, "Model metric report (CSV)")->required();
  m->add_option("baseline", m_base, "Baseline metric report (CSV)")->required();
  m->add_option("specs", m_specs, "Metric specs (CSV)")->required();

  std::string seeds = "0-9";
  std::string scenario;
  double lambda = mtnas::lambda_from_weights(0.95, 0.05);
  bool per_seed = false;
  auto* j = app.add_subcommand("jared-sim", "Toy depth regression: L1 against the joint loss");
  j->add_option("--seeds", seeds, "Seed list, e.g. 0-9 or 1,5,9")->capture_default_str();
  j->add_option("--lambda", lambda, "Relative-term weight")->capture_default_str();
  j->add_option("--scenario", scenario, "Scenario overrides (JSON)");
  j->add_flag("--per-seed", per_seed, "Print one row per run instead of the summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*s) return cmd_search(search);
    if (*d) return cmd_decode(key);
    if (*c) return cmd_cost(cost_key, profile, resolution, stem_only);
    if (*r) return cmd_reward_eval(re_config, re_metrics, re_latency, re_genome);
    if (*m) return cmd_metrics(m_model, m_base, m_specs);
    if (*j) return cmd_jared_sim(seeds, lambda, scenario, per_seed);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const mtnas::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const mtnas::ConfigFileError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const mtnas::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const mtnas::DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
