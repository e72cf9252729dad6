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


#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "mtnas/engine_config.hpp"

namespace mtnas {
namespace {

namespace fs = std::filesystem;

const fs::path kSource = MTNAS_SOURCE_DIR;

nlohmann::json shipped() {
  return nlohmann::json::parse(read_file(kSource / "configs" / "surrogate.json"));
}

class ScopedEnv {
 public:
  ScopedEnv(const char* name, const char* value) : name_(name) { setenv(name, value, 1); }
  ~ScopedEnv() { unsetenv(name_); }

 private:
  const char* name_;
};

TEST(LoadConfig, ShippedSurrogateConfigMirrorsDefaults) {
  const EngineConfig c = load_config(kSource / "configs" / "surrogate.json");
  EXPECT_EQ(c.evolution.population_size, 50u);
  EXPECT_EQ(c.evolution.tournament_size, 10u);
  EXPECT_EQ(c.evolution.generations, 2000u);
  EXPECT_EQ(c.reward.p, 0.0);
  EXPECT_EQ(c.reward.q, -0.07);
  for (const auto& t : c.tasks()) {
    for (const auto& m : t.metrics) EXPECT_EQ(m.weight, 1.0);
  }
  EXPECT_EQ(c.evaluator.kind, EvaluatorKind::kSurrogate);
  EXPECT_EQ(c.hardware, HardwareProfile{});
}

TEST(LoadConfig, EveryShippedConfigLoads) {
  for (const auto& entry : fs::directory_iterator(kSource / "configs")) {
    if (entry.path().extension() == ".json") {
      EXPECT_NO_THROW(load_config(entry.path())) << entry.path();
    }
  }
}

TEST(LoadConfig, LookupPathIsRelativeToConfig) {
  const EngineConfig c = load_config(kSource / "configs" / "lookup.json");
  EXPECT_EQ(c.evaluator.kind, EvaluatorKind::kLookup);
  EXPECT_TRUE(fs::exists(c.evaluator.lookup_path));
  EXPECT_EQ(c.evaluator.lookup_path.filename(), "backbones_lookup.csv");
}

TEST(ConfigJson, RoundTrip) {
  const EngineConfig c = config_from_json(shipped());
  EXPECT_EQ(config_from_json(config_to_json(c)), c);
  EngineConfig d = c;
  d.hardware = HardwareProfile::compute_only(1e12);
  d.evaluator.kind = EvaluatorKind::kLookup;
  d.evaluator.lookup_path = "/tmp/table.csv";
  d.evaluator.surrogate = {};
  d.input_resolution = {128, 96};
  EXPECT_EQ(config_from_json(config_to_json(d)), d);
}

std::string error_key(const nlohmann::json& j) {
  try {
    config_from_json(j);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

TEST(ConfigJson, TournamentLargerThanPopulation) {
  auto j = shipped();
  j["evolution"]["tournament_size"] = 60;
  EXPECT_EQ(error_key(j), "evolution.tournament_size");
}

TEST(ConfigJson, NegativeTargetLatency) {
  auto j = shipped();
  j["reward"]["target_latency_s"] = -0.001;
  EXPECT_EQ(error_key(j), "reward.target_latency_s");
}

TEST(ConfigJson, SchemaErrorsAreDistinct) {
  auto unknown = shipped();
  unknown["evolution"]["mutation_rate"] = 0.1;
  EXPECT_THROW(config_from_json(unknown), SchemaError);
  EXPECT_EQ(error_key(unknown), "evolution.mutation_rate");

  auto top = shipped();
  top["extra"] = true;
  EXPECT_THROW(config_from_json(top), SchemaError);

  auto missing = shipped();
  missing.erase("reward");
  EXPECT_EQ(error_key(missing), "reward");

  auto wrong_type = shipped();
  wrong_type["evolution"]["seed"] = "seven";
  EXPECT_THROW(config_from_json(wrong_type), SchemaError);

  auto negative = shipped();
  negative["evolution"]["population_size"] = -3;
  EXPECT_THROW(config_from_json(negative), SchemaError);

  auto version = shipped();
  version["schema_version"] = 2;
  EXPECT_THROW(config_from_json(version), SchemaError);

  auto kind = shipped();
  kind["evaluator"] = {{"kind", "oracle"}};
  EXPECT_EQ(error_key(kind), "evaluator.kind");

  auto metric_key = shipped();
  metric_key["tasks"][0]["metrics"][0]["unit"] = "%";
  EXPECT_THROW(config_from_json(metric_key), SchemaError);
}

TEST(ConfigJson, DomainErrorsAreNotSchemaErrors) {
  auto j = shipped();
  j["hardware"]["depthwise_efficiency"] = 2.0;
  try {
    config_from_json(j);
    FAIL();
  } catch (const SchemaError&) {
    FAIL() << "domain violation reported as schema error";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "hardware.depthwise_efficiency");
  }
  auto range = shipped();
  range["evaluator"]["tasks"][1]["ranges"].erase("rele");
  EXPECT_THROW(config_from_json(range), ConfigError);
}

TEST(LoadConfig, MissingFiles) {
  EXPECT_THROW(load_config(kSource / "configs" / "does_not_exist.json"), ConfigFileError);
  const fs::path dir = fs::temp_directory_path() / "mtnas_config_test";
  fs::create_directories(dir);
  auto j = shipped();
  j["evaluator"] = {{"kind", "lookup"}, {"path", "nowhere.csv"}};
  write_file_atomic(dir / "cfg.json", j.dump());
  EXPECT_THROW(load_config(dir / "cfg.json"), ConfigFileError);
  write_file_atomic(dir / "broken.json", "{\"schema_version\": 1,");
  EXPECT_THROW(load_config(dir / "broken.json"), ParseError);
  fs::remove_all(dir);
}

TEST(LoadConfig, EnvironmentOverrides) {
  ScopedEnv out("MTNAS_OUTPUT_DIR", "/tmp/elsewhere");
  ScopedEnv seed("MTNAS_SEED", "77");
  const EngineConfig c = load_config(kSource / "configs" / "surrogate.json");
  EXPECT_EQ(c.output_dir, "/tmp/elsewhere");
  EXPECT_EQ(c.evolution.seed, 77u);
}

TEST(LoadConfig, BadSeedOverride) {
  ScopedEnv seed("MTNAS_SEED", "many");
  EXPECT_THROW(load_config(kSource / "configs" / "surrogate.json"), ConfigError);
}

}  // namespace
}  // namespace mtnas
