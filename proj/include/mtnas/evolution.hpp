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

// Regularized (aging) evolution over the genome space.
//
// Steady state: every step draws a tournament without replacement from the
// current population, mutates the winner (highest reward, oldest on ties),
// evaluates the child, appends it, and evicts the oldest member. One
// generation is one child.
//
// All randomness flows from EvolutionConfig::seed. Evaluator seeds are derived
// from (seed, birth_index), so a sequential run is bit-reproducible and can
// be resumed from a checkpoint.

#ifndef MTNAS_EVOLUTION_HPP_
#define MTNAS_EVOLUTION_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <future>
#include <istream>
#include <iterator>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mtnas/cost_model.hpp"
#include "mtnas/errors.hpp"
#include "mtnas/evaluators.hpp"
#include "mtnas/mtl_metrics.hpp"
#include "mtnas/reward.hpp"
#include "mtnas/search_space.hpp"
#include "mtnas/text_io.hpp"

namespace mtnas {

struct EvolutionConfig {
  std::size_t population_size = 50;
  std::size_t tournament_size = 10;
  std::size_t generations = 2000;
  std::uint64_t seed = 0;
  // Children between checkpoints; 0 disables periodic checkpoints.
  std::size_t checkpoint_every = 100;

  void validate() const {
    if (population_size < 1) throw ConfigError("evolution.population_size", "must be >= 1");
    if (tournament_size < 1) throw ConfigError("evolution.tournament_size", "must be >= 1");
    if (tournament_size > population_size) {
      throw ConfigError("evolution.tournament_size", "must be <= population_size");
    }
  }

  friend bool operator==(const EvolutionConfig&, const EvolutionConfig&) = default;
};

template <std::size_t N>
struct EvaluatedCandidate {
  BasicGenome<N> genome;
  CandidateScore score;
  MetricReport metrics;
  std::uint64_t birth_index = 0;
  bool failed = false;
  std::string failure;

  friend bool operator==(const EvaluatedCandidate&, const EvaluatedCandidate&) = default;
};

template <std::size_t N>
struct SearchState {
  // Birth indices of live members, oldest first.
  std::deque<std::uint64_t> population;
  // Every candidate ever evaluated; history[i].birth_index == i.
  std::vector<EvaluatedCandidate<N>> history;
  std::mt19937_64 rng;

  const EvaluatedCandidate<N>& member(std::size_t pos) const {
    return history[population[pos]];
  }
};

// What a candidate is scored against: metrics source, reward constants and
// the latency model used when the evaluator does not measure latency.
template <std::size_t N>
struct Objective {
  const Evaluator<N>* evaluator = nullptr;
  RewardConfig reward;
  HardwareProfile hardware;
  Resolution resolution;
};

inline std::uint64_t evaluation_seed(std::uint64_t run_seed, std::uint64_t birth_index) {
  return splitmix64(run_seed ^ splitmix64(birth_index));
}

template <std::size_t N>
double estimated_latency(const BasicGenome<N>& g, const HardwareProfile& hw, Resolution res) {
  return architecture_cost(decode(g), res, hw).total_latency_s;
}

// Evaluates and scores one genome. Throws on evaluator or validation failure.
template <std::size_t N>
EvaluatedCandidate<N> score_candidate(const BasicGenome<N>& g, std::uint64_t birth_index,
                                      std::uint64_t run_seed, const Objective<N>& obj) {
  EvaluatedCandidate<N> c;
  c.genome = g;
  c.birth_index = birth_index;
  Evaluation e = obj.evaluator->evaluate(g, evaluation_seed(run_seed, birth_index));
  validate_report(e.metrics, obj.reward.tasks);
  const double latency = e.latency_s ? *e.latency_s : estimated_latency(g, obj.hardware, obj.resolution);
  c.score = reward(report_accuracy(e.metrics, obj.reward.tasks), latency, obj.reward);
  c.metrics = std::move(e.metrics);
  return c;
}

// Same as score_candidate, but failures become a recorded zero-reward entry.
template <std::size_t N>
EvaluatedCandidate<N> score_or_fail(const BasicGenome<N>& g, std::uint64_t birth_index,
                                    std::uint64_t run_seed, const Objective<N>& obj) {
  try {
    return score_candidate(g, birth_index, run_seed, obj);
  } catch (const std::exception& ex) {
    EvaluatedCandidate<N> c;
    c.genome = g;
    c.birth_index = birth_index;
    c.failed = true;
    c.failure = ex.what();
    return c;
  }
}

template <std::size_t N>
SearchState<N> initialize(const EvolutionConfig& cfg, const Objective<N>& obj) {
  cfg.validate();
  SearchState<N> s;
  s.rng.seed(cfg.seed);
  s.history.reserve(cfg.population_size + cfg.generations);
  for (std::size_t i = 0; i < cfg.population_size; ++i) {
    const BasicGenome<N> g = random_genome<N>(s.rng);
    try {
      s.history.push_back(score_candidate(g, i, cfg.seed, obj));
    } catch (const std::exception& ex) {
      throw EvaluationError("initial candidate " + encode_key(g) + ": " + ex.what());
    }
    s.population.push_back(i);
  }
  return s;
}

// Tournament winner among `positions` (indices into state.population).
template <std::size_t N>
std::uint64_t tournament_winner(const SearchState<N>& s, const std::vector<std::size_t>& positions) {
  std::uint64_t best = s.population[positions.front()];
  for (std::size_t pos : positions) {
    const std::uint64_t id = s.population[pos];
    const auto& c = s.history[id];
    const auto& b = s.history[best];
    if (c.score.reward > b.score.reward ||
        (c.score.reward == b.score.reward && id < best)) {
      best = id;
    }
  }
  return best;
}

template <std::size_t N>
std::uint64_t select_parent(SearchState<N>& s, std::size_t tournament_size) {
  std::vector<std::size_t> all(s.population.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::size_t> picked;
  picked.reserve(tournament_size);
  std::sample(all.begin(), all.end(), std::back_inserter(picked), tournament_size, s.rng);
  return tournament_winner(s, picked);
}

template <std::size_t N>
void commit(SearchState<N>& s, EvaluatedCandidate<N> child, std::size_t population_size) {
  s.population.push_back(child.birth_index);
  s.history.push_back(std::move(child));
  while (s.population.size() > population_size) s.population.pop_front();
}

template <std::size_t N>
void step(SearchState<N>& s, const EvolutionConfig& cfg, const Objective<N>& obj) {
  const std::uint64_t parent = select_parent(s, cfg.tournament_size);
  BasicGenome<N> child = mutate(s.history[parent].genome, s.rng);
  const std::uint64_t birth = s.history.size();
  commit(s, score_or_fail(child, birth, cfg.seed, obj), cfg.population_size);
}

// Breeds `count` children against the current population snapshot, evaluates
// them concurrently when the evaluator allows it, and commits them in birth
// order. The trajectory differs from `count` sequential steps.
template <std::size_t N>
void step_batch(SearchState<N>& s, const EvolutionConfig& cfg, const Objective<N>& obj,
                std::size_t count) {
  if (count <= 1) {
    step(s, cfg, obj);
    return;
  }
  std::vector<BasicGenome<N>> children;
  children.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t parent = select_parent(s, cfg.tournament_size);
    children.push_back(mutate(s.history[parent].genome, s.rng));
  }
  const std::uint64_t first_birth = s.history.size();
  std::vector<EvaluatedCandidate<N>> scored(count);
  if (obj.evaluator->concurrent_safe()) {
    std::vector<std::future<EvaluatedCandidate<N>>> jobs;
    jobs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      jobs.push_back(std::async(std::launch::async, [&, i] {
        return score_or_fail(children[i], first_birth + i, cfg.seed, obj);
      }));
    }
    for (std::size_t i = 0; i < count; ++i) scored[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      scored[i] = score_or_fail(children[i], first_birth + i, cfg.seed, obj);
    }
  }
  for (auto& c : scored) commit(s, std::move(c), cfg.population_size);
}

template <std::size_t N>
using CheckpointSink = std::function<void(const SearchState<N>&)>;

// Runs steps until the history holds population_size + generations entries.
// Emits a checkpoint every `checkpoint_every` children and once at the end.
template <std::size_t N>
void advance(SearchState<N>& s, const EvolutionConfig& cfg, const Objective<N>& obj,
             const CheckpointSink<N>& sink = {}, std::size_t parallel = 1) {
  const std::size_t target = cfg.population_size + cfg.generations;
  if (s.history.size() > target) {
    throw DomainError("state already holds more candidates than the configured run");
  }
  bool dirty = false;
  while (s.history.size() < target) {
    const std::size_t children_before = s.history.size() - cfg.population_size;
    std::size_t batch = std::min(std::max<std::size_t>(parallel, 1), target - s.history.size());
    if (cfg.checkpoint_every > 0) {
      const std::size_t to_next = cfg.checkpoint_every - children_before % cfg.checkpoint_every;
      batch = std::min(batch, to_next);
    }
    step_batch(s, cfg, obj, batch);
    dirty = true;
    const std::size_t children = s.history.size() - cfg.population_size;
    if (sink && cfg.checkpoint_every > 0 && children % cfg.checkpoint_every == 0) {
      sink(s);
      dirty = false;
    }
  }
  if (sink && dirty) sink(s);
}

template <std::size_t N>
SearchState<N> run(const EvolutionConfig& cfg, const Objective<N>& obj,
                   const CheckpointSink<N>& sink = {}, std::size_t parallel = 1) {
  SearchState<N> s = initialize(cfg, obj);
  if (sink && cfg.generations == 0) sink(s);
  advance(s, cfg, obj, sink, parallel);
  return s;
}

// Highest reward in history; oldest on ties.
template <std::size_t N>
const EvaluatedCandidate<N>& best_candidate(const std::vector<EvaluatedCandidate<N>>& history) {
  if (history.empty()) throw DomainError("best_candidate: empty history");
  const EvaluatedCandidate<N>* best = &history.front();
  for (const auto& c : history) {
    if (c.score.reward > best->score.reward) best = &c;
  }
  return *best;
}

// Candidates not dominated in (higher acc, lower latency), sorted by latency.
// Failed evaluations are skipped; exact duplicates in both axes are kept.
template <std::size_t N>
std::vector<EvaluatedCandidate<N>> pareto_front(const std::vector<EvaluatedCandidate<N>>& history) {
  std::vector<const EvaluatedCandidate<N>*> order;
  for (const auto& c : history) {
    if (!c.failed) order.push_back(&c);
  }
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    if (a->score.latency_s != b->score.latency_s) return a->score.latency_s < b->score.latency_s;
    if (a->score.acc != b->score.acc) return a->score.acc > b->score.acc;
    return a->birth_index < b->birth_index;
  });
  std::vector<EvaluatedCandidate<N>> front;
  bool have_best = false;
  double best_acc = 0;
  double best_lat = 0;  // lowest latency achieving best_acc
  for (const auto* c : order) {
    if (have_best) {
      if (best_acc > c->score.acc) continue;
      if (best_acc == c->score.acc && best_lat < c->score.latency_s) continue;
    }
    front.push_back(*c);
    if (!have_best || c->score.acc > best_acc) {
      best_acc = c->score.acc;
      best_lat = c->score.latency_s;
      have_best = true;
    }
  }
  return front;
}

// ---------------------------------------------------------------------------
// History log (CSV). Column order:
//   genome_key, one column per metric named "<task>:<metric>" in task-spec
//   order, acc, latency_s, reward, birth_index, status
// status is "ok" or "failed"; failed rows leave metric, acc, latency and reward
// cells empty.

inline std::vector<MetricKey> metric_columns(std::span<const TaskSpec> tasks) {
  std::vector<MetricKey> cols;
  for (const auto& t : tasks) {
    for (const auto& m : t.metrics) cols.emplace_back(m.task, m.metric);
  }
  return cols;
}

inline void write_history_header(std::ostream& os, std::span<const TaskSpec> tasks) {
  os << "genome_key";
  for (const auto& [t, m] : metric_columns(tasks)) os << ',' << t << ':' << m;
  os << ",acc,latency_s,reward,birth_index,status\n";
}

template <std::size_t N>
void write_history_row(std::ostream& os, const EvaluatedCandidate<N>& c,
                       std::span<const TaskSpec> tasks) {
  os << encode_key(c.genome);
  for (const auto& k : metric_columns(tasks)) {
    os << ',';
    auto it = c.metrics.values.find(k);
    if (!c.failed && it != c.metrics.values.end()) os << format_double(it->second);
  }
  if (c.failed) {
    os << ",,,," << c.birth_index << ",failed\n";
  } else {
    os << ',' << format_double(c.score.acc) << ',' << format_double(c.score.latency_s) << ','
       << format_double(c.score.reward) << ',' << c.birth_index << ",ok\n";
  }
}

template <std::size_t N>
void write_history(std::ostream& os, const std::vector<EvaluatedCandidate<N>>& rows,
                   std::span<const TaskSpec> tasks) {
  write_history_header(os, tasks);
  for (const auto& c : rows) write_history_row(os, c, tasks);
}

// Reads a history log. `within_budget` is not stored in the log; pass the
// target latency to recompute it.
template <std::size_t N>
std::vector<EvaluatedCandidate<N>> read_history(std::istream& is, double target_latency_s) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError("history: empty file", 1);
  const auto header = split_csv(line);
  if (header.size() < 6 || header.front() != "genome_key" ||
      header[header.size() - 5] != "acc" || header.back() != "status") {
    throw ParseError("history line 1: bad header", 1);
  }
  std::vector<MetricKey> cols;
  for (std::size_t i = 1; i + 5 < header.size(); ++i) {
    const auto colon = header[i].find(':');
    if (colon == std::string::npos) throw ParseError("history line 1: bad metric column '" + header[i] + "'", 1);
    cols.emplace_back(header[i].substr(0, colon), header[i].substr(colon + 1));
  }
  std::vector<EvaluatedCandidate<N>> out;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw ParseError("history line " + std::to_string(line_no) + ": column count mismatch", line_no);
    }
    EvaluatedCandidate<N> c;
    try {
      c.genome = decode_key<N>(cells[0]);
    } catch (const ParseError& e) {
      throw ParseError("history line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
    const std::size_t base = 1 + cols.size();
    c.birth_index = std::uint64_t(parse_int(cells[base + 3], line_no, "birth_index"));
    const std::string& status = cells[base + 4];
    if (status == "failed") {
      c.failed = true;
    } else if (status == "ok") {
      for (std::size_t i = 0; i < cols.size(); ++i) {
        if (!cells[1 + i].empty()) c.metrics.values[cols[i]] = parse_double(cells[1 + i], line_no, "metric");
      }
      c.score.acc = parse_double(cells[base], line_no, "acc");
      c.score.latency_s = parse_double(cells[base + 1], line_no, "latency_s");
      c.score.reward = parse_double(cells[base + 2], line_no, "reward");
      c.score.within_budget = c.score.latency_s <= target_latency_s;
    } else {
      throw ParseError("history line " + std::to_string(line_no) + ": bad status '" + status + "'", line_no);
    }
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoints (JSON, versioned).

inline constexpr int kCheckpointVersion = 1;

inline nlohmann::json evolution_config_to_json(const EvolutionConfig& c) {
  return {{"population_size", c.population_size},
          {"tournament_size", c.tournament_size},
          {"generations", c.generations},
          {"seed", c.seed},
          {"checkpoint_every", c.checkpoint_every}};
}

template <std::size_t N>
nlohmann::json candidate_to_json(const EvaluatedCandidate<N>& c) {
  nlohmann::json metrics = nlohmann::json::array();
  for (const auto& [k, v] : c.metrics.values) metrics.push_back({k.first, k.second, v});
  return {{"birth_index", c.birth_index},
          {"genome", encode_key(c.genome)},
          {"failed", c.failed},
          {"failure", c.failure},
          {"acc", c.score.acc},
          {"latency_s", c.score.latency_s},
          {"reward", c.score.reward},
          {"within_budget", c.score.within_budget},
          {"metrics", metrics}};
}

template <std::size_t N>
EvaluatedCandidate<N> candidate_from_json(const nlohmann::json& j) {
  EvaluatedCandidate<N> c;
  c.birth_index = j.at("birth_index").get<std::uint64_t>();
  c.genome = decode_key<N>(j.at("genome").get<std::string>());
  c.failed = j.at("failed").get<bool>();
  c.failure = j.at("failure").get<std::string>();
  c.score.acc = j.at("acc").get<double>();
  c.score.latency_s = j.at("latency_s").get<double>();
  c.score.reward = j.at("reward").get<double>();
  c.score.within_budget = j.at("within_budget").get<bool>();
  for (const auto& m : j.at("metrics")) {
    c.metrics.values[{m.at(0).get<std::string>(), m.at(1).get<std::string>()}] = m.at(2).get<double>();
  }
  return c;
}

// `extra` is stored verbatim under "engine_config" (callers put the run
// configuration snapshot there).
template <std::size_t N>
nlohmann::json checkpoint_to_json(const SearchState<N>& s, const EvolutionConfig& cfg,
                                  const nlohmann::json& extra = nullptr) {
  std::ostringstream rng;
  rng << s.rng;
  nlohmann::json history = nlohmann::json::array();
  for (const auto& c : s.history) history.push_back(candidate_to_json(c));
  nlohmann::json j = {{"format", "mtnas-checkpoint"},
                      {"version", kCheckpointVersion},
                      {"blocks", N},
                      {"evolution", evolution_config_to_json(cfg)},
                      {"rng", rng.str()},
                      {"population", std::vector<std::uint64_t>(s.population.begin(), s.population.end())},
                      {"history", history}};
  if (!extra.is_null()) j["engine_config"] = extra;
  return j;
}

template <std::size_t N>
SearchState<N> checkpoint_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "mtnas-checkpoint") throw ParseError("checkpoint: wrong format tag", 0);
    if (j.at("version").get<int>() != kCheckpointVersion) {
      throw ParseError("checkpoint: unsupported version " + j.at("version").dump(), 0);
    }
    if (j.at("blocks").get<std::size_t>() != N) throw ParseError("checkpoint: block count mismatch", 0);
    SearchState<N> s;
    std::istringstream rng(j.at("rng").get<std::string>());
    rng >> s.rng;
    if (!rng) throw ParseError("checkpoint: bad rng state", 0);
    for (const auto& c : j.at("history")) s.history.push_back(candidate_from_json<N>(c));
    for (std::size_t i = 0; i < s.history.size(); ++i) {
      if (s.history[i].birth_index != i) throw ParseError("checkpoint: history out of birth order", 0);
    }
    for (const auto& id : j.at("population")) {
      const auto v = id.get<std::uint64_t>();
      if (v >= s.history.size()) throw ParseError("checkpoint: population references unknown candidate", 0);
      s.population.push_back(v);
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint: ") + e.what(), 0);
  }
}

}  // namespace mtnas

#endif  // MTNAS_EVOLUTION_HPP_
