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

// Single-file JSON run configuration. The schema is documented in README.md.
//
// Loading rejects unknown keys, wrong types and domain violations with
// distinct exception types (SchemaError, ConfigError, ConfigFileError).
// MTNAS_OUTPUT_DIR and MTNAS_SEED override output_dir and evolution.seed.

#ifndef MTNAS_ENGINE_CONFIG_HPP_
#define MTNAS_ENGINE_CONFIG_HPP_

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mtnas/cost_model.hpp"
#include "mtnas/errors.hpp"
#include "mtnas/evaluators.hpp"
#include "mtnas/evolution.hpp"
#include "mtnas/mtl_metrics.hpp"
#include "mtnas/reward.hpp"
#include "mtnas/text_io.hpp"

namespace mtnas {

inline constexpr int kConfigSchemaVersion = 1;

enum class EvaluatorKind { kSurrogate, kLookup };

struct EvaluatorChoice {
  EvaluatorKind kind = EvaluatorKind::kSurrogate;
  SurrogateConfig surrogate;
  std::filesystem::path lookup_path;

  friend bool operator==(const EvaluatorChoice&, const EvaluatorChoice&) = default;
};

struct EngineConfig {
  RewardConfig reward;  // carries the task/metric declarations
  HardwareProfile hardware;
  EvolutionConfig evolution;
  EvaluatorChoice evaluator;
  Resolution input_resolution;
  std::string output_dir = "runs/default";

  const std::vector<TaskSpec>& tasks() const { return reward.tasks; }

  friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

namespace detail {

// Walks a JSON object, handing out required/optional members and rejecting
// anything left unread.
class ObjectReader {
 public:
  ObjectReader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw SchemaError(path_, "must be an object");
  }

  const nlohmann::json& required(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) throw SchemaError(name(key), "required key is missing");
    return *it;
  }
  const nlohmann::json* optional(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  double number(const std::string& key) { return as_number(required(key), name(key)); }
  double number_or(const std::string& key, double fallback) {
    const auto* v = optional(key);
    return v ? as_number(*v, name(key)) : fallback;
  }
  std::uint64_t count(const std::string& key) { return as_count(required(key), name(key)); }
  std::uint64_t count_or(const std::string& key, std::uint64_t fallback) {
    const auto* v = optional(key);
    return v ? as_count(*v, name(key)) : fallback;
  }
  std::string string(const std::string& key) { return as_string(required(key), name(key)); }
  std::string string_or(const std::string& key, std::string fallback) {
    const auto* v = optional(key);
    return v ? as_string(*v, name(key)) : fallback;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!used_.count(k)) throw SchemaError(name(k), "unknown key");
    }
  }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  static double as_number(const nlohmann::json& v, const std::string& n) {
    if (!v.is_number()) throw SchemaError(n, "must be a number");
    return v.get<double>();
  }
  static std::uint64_t as_count(const nlohmann::json& v, const std::string& n) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      throw SchemaError(n, "must be a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }
  static std::string as_string(const nlohmann::json& v, const std::string& n) {
    if (!v.is_string()) throw SchemaError(n, "must be a string");
    return v.get<std::string>();
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> used_;
};

template <std::size_t K>
std::array<double, K> number_array(const nlohmann::json& v, const std::string& n) {
  if (!v.is_array() || v.size() != K) {
    throw SchemaError(n, "must be an array of " + std::to_string(K) + " numbers");
  }
  std::array<double, K> out{};
  for (std::size_t i = 0; i < K; ++i) out[i] = ObjectReader::as_number(v[i], n);
  return out;
}

inline std::vector<TaskSpec> tasks_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw SchemaError("tasks", "must be an array");
  std::vector<TaskSpec> tasks;
  for (std::size_t i = 0; i < j.size(); ++i) {
    ObjectReader tr(j[i], "tasks[" + std::to_string(i) + "]");
    TaskSpec t;
    t.task = tr.string("task");
    const auto& ms = tr.required("metrics");
    if (!ms.is_array()) throw SchemaError(tr.name("metrics"), "must be an array");
    for (std::size_t k = 0; k < ms.size(); ++k) {
      ObjectReader mr(ms[k], tr.name("metrics[" + std::to_string(k) + "]"));
      MetricSpec m;
      m.task = t.task;
      m.metric = mr.string("metric");
      const std::string dir = mr.string("direction");
      if (!parse_direction(dir, m.direction)) throw SchemaError(mr.name("direction"), "must be \"higher\" or \"lower\"");
      m.weight = mr.number_or("weight", 1.0);
      const std::string scale = mr.string_or("scale", "unit");
      if (!parse_scale(scale, m.scale)) throw SchemaError(mr.name("scale"), "must be \"unit\" or \"percent\"");
      const std::string def = m.direction == Direction::kHigherBetter ? "identity" : "reciprocal";
      const std::string tf = mr.string_or("transform", def);
      if (!parse_transform(tf, m.transform)) {
        throw SchemaError(mr.name("transform"), "must be identity, reciprocal or one_minus");
      }
      mr.finish();
      t.metrics.push_back(m);
    }
    tr.finish();
    tasks.push_back(std::move(t));
  }
  return tasks;
}

inline nlohmann::json tasks_to_json(const std::vector<TaskSpec>& tasks) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : tasks) {
    nlohmann::json ms = nlohmann::json::array();
    for (const auto& m : t.metrics) {
      ms.push_back({{"metric", m.metric},
                    {"direction", to_string(m.direction)},
                    {"weight", m.weight},
                    {"scale", to_string(m.scale)},
                    {"transform", to_string(m.transform)}});
    }
    arr.push_back({{"task", t.task}, {"metrics", ms}});
  }
  return arr;
}

inline SurrogateConfig surrogate_from_json(ObjectReader& er) {
  SurrogateConfig sc;
  sc.seed = er.count_or("seed", 0);
  const auto& ts = er.required("tasks");
  if (!ts.is_array()) throw SchemaError(er.name("tasks"), "must be an array");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    ObjectReader r(ts[i], er.name("tasks[" + std::to_string(i) + "]"));
    SurrogateTask t;
    t.task = r.string("task");
    t.bias = r.number_or("bias", 0.0);
    if (const auto* v = r.optional("layer_type")) t.layer_type = number_array<2>(*v, r.name("layer_type"));
    if (const auto* v = r.optional("kernel")) t.kernel = number_array<2>(*v, r.name("kernel"));
    if (const auto* v = r.optional("multiplier")) t.multiplier = number_array<4>(*v, r.name("multiplier"));
    if (const auto* v = r.optional("expansion")) t.expansion = number_array<2>(*v, r.name("expansion"));
    t.noise_sigma = r.number_or("noise_sigma", 0.0);
    const auto& ranges = r.required("ranges");
    if (!ranges.is_object()) throw SchemaError(r.name("ranges"), "must be an object");
    for (const auto& [metric, lohi] : ranges.items()) {
      const auto a = number_array<2>(lohi, r.name("ranges." + metric));
      t.ranges[metric] = {a[0], a[1]};
    }
    r.finish();
    sc.tasks.push_back(std::move(t));
  }
  return sc;
}

inline nlohmann::json surrogate_to_json(const SurrogateConfig& sc) {
  nlohmann::json ts = nlohmann::json::array();
  for (const auto& t : sc.tasks) {
    nlohmann::json ranges = nlohmann::json::object();
    for (const auto& [m, r] : t.ranges) ranges[m] = {r.lo, r.hi};
    ts.push_back({{"task", t.task},
                  {"bias", t.bias},
                  {"layer_type", t.layer_type},
                  {"kernel", t.kernel},
                  {"multiplier", t.multiplier},
                  {"expansion", t.expansion},
                  {"noise_sigma", t.noise_sigma},
                  {"ranges", ranges}});
  }
  return {{"kind", "surrogate"}, {"seed", sc.seed}, {"tasks", ts}};
}

}  // namespace detail

// `base_dir` resolves a relative lookup path.
inline EngineConfig config_from_json(const nlohmann::json& j,
                                     const std::filesystem::path& base_dir = {}) {
  detail::ObjectReader root(j, "");
  const auto version = root.count("schema_version");
  if (version != kConfigSchemaVersion) {
    throw SchemaError("schema_version", "unsupported version " + std::to_string(version));
  }
  EngineConfig cfg;
  cfg.reward.tasks = detail::tasks_from_json(root.required("tasks"));

  detail::ObjectReader rr(root.required("reward"), "reward");
  cfg.reward.target_latency_s = rr.number("target_latency_s");
  cfg.reward.p = rr.number_or("p", 0.0);
  cfg.reward.q = rr.number_or("q", -0.07);
  rr.finish();

  if (const auto* hw = root.optional("hardware")) {
    cfg.hardware = profile_from_json(*hw, "hardware");
  }

  detail::ObjectReader er(root.required("evolution"), "evolution");
  cfg.evolution.population_size = er.count_or("population_size", 50);
  cfg.evolution.tournament_size = er.count_or("tournament_size", 10);
  cfg.evolution.generations = er.count_or("generations", 2000);
  cfg.evolution.seed = er.count_or("seed", 0);
  cfg.evolution.checkpoint_every = er.count_or("checkpoint_every", 100);
  er.finish();

  detail::ObjectReader vr(root.required("evaluator"), "evaluator");
  const std::string kind = vr.string("kind");
  if (kind == "surrogate") {
    cfg.evaluator.kind = EvaluatorKind::kSurrogate;
    cfg.evaluator.surrogate = detail::surrogate_from_json(vr);
  } else if (kind == "lookup") {
    cfg.evaluator.kind = EvaluatorKind::kLookup;
    std::filesystem::path p = vr.string("path");
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    cfg.evaluator.lookup_path = p.lexically_normal();
  } else {
    throw SchemaError("evaluator.kind", "must be \"surrogate\" or \"lookup\"");
  }
  vr.finish();

  if (const auto* res = root.optional("input_resolution")) {
    if (!res->is_array() || res->size() != 2 || !(*res)[0].is_number_integer() ||
        !(*res)[1].is_number_integer()) {
      throw SchemaError("input_resolution", "must be [height, width] integers");
    }
    cfg.input_resolution = {(*res)[0].get<int>(), (*res)[1].get<int>()};
  }
  cfg.output_dir = root.string_or("output_dir", cfg.output_dir);
  root.finish();

  // Domain checks.
  cfg.reward.validate();
  cfg.hardware.validate();
  cfg.evolution.validate();
  if (cfg.input_resolution.height <= 0 || cfg.input_resolution.width <= 0) {
    throw ConfigError("input_resolution", "must be positive");
  }
  if (cfg.output_dir.empty()) throw ConfigError("output_dir", "must be nonempty");
  if (cfg.evaluator.kind == EvaluatorKind::kSurrogate) {
    // Constructing validates ranges against the task declarations.
    SurrogateEvaluator<1> probe(cfg.evaluator.surrogate, cfg.reward.tasks);
    (void)probe;
  }
  return cfg;
}

inline nlohmann::json config_to_json(const EngineConfig& cfg) {
  nlohmann::json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["tasks"] = detail::tasks_to_json(cfg.reward.tasks);
  j["reward"] = {{"target_latency_s", cfg.reward.target_latency_s},
                 {"p", cfg.reward.p},
                 {"q", cfg.reward.q}};
  j["hardware"] = profile_to_json(cfg.hardware);
  j["evolution"] = evolution_config_to_json(cfg.evolution);
  if (cfg.evaluator.kind == EvaluatorKind::kSurrogate) {
    j["evaluator"] = detail::surrogate_to_json(cfg.evaluator.surrogate);
  } else {
    j["evaluator"] = {{"kind", "lookup"}, {"path", cfg.evaluator.lookup_path.string()}};
  }
  j["input_resolution"] = {cfg.input_resolution.height, cfg.input_resolution.width};
  j["output_dir"] = cfg.output_dir;
  return j;
}

// Reads, validates and applies environment overrides.
inline EngineConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigFileError("config file not found: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte);
  }
  EngineConfig cfg = config_from_json(j, path.parent_path());
  if (const char* out = std::getenv("MTNAS_OUTPUT_DIR"); out && *out) cfg.output_dir = out;
  if (const char* seed = std::getenv("MTNAS_SEED"); seed && *seed) {
    try {
      cfg.evolution.seed = std::stoull(seed);
    } catch (const std::exception&) {
      throw ConfigError("MTNAS_SEED", "must be a nonnegative integer");
    }
  }
  if (cfg.evaluator.kind == EvaluatorKind::kLookup &&
      !std::filesystem::exists(cfg.evaluator.lookup_path)) {
    throw ConfigFileError("evaluator.path: lookup table not found: " +
                          cfg.evaluator.lookup_path.string());
  }
  return cfg;
}

}  // namespace mtnas

#endif  // MTNAS_ENGINE_CONFIG_HPP_
