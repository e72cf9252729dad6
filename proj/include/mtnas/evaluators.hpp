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

// Metric providers for candidate genomes.
//
// SurrogateEvaluator is an analytic stand-in for proxy-task training: each
// task gets an additive score over the genome's decisions, squashed by a
// logistic and mapped into every metric's range. LookupEvaluator serves
// externally produced results keyed by canonical genome key.

#ifndef MTNAS_EVALUATORS_HPP_
#define MTNAS_EVALUATORS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mtnas/errors.hpp"
#include "mtnas/mtl_metrics.hpp"
#include "mtnas/search_space.hpp"
#include "mtnas/text_io.hpp"

namespace mtnas {

struct Evaluation {
  MetricReport metrics;
  // Measured latency; when absent the cost model supplies it.
  std::optional<double> latency_s;
};

template <std::size_t N>
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  // `seed` drives any stochasticity; equal inputs give equal outputs.
  virtual Evaluation evaluate(const BasicGenome<N>& genome, std::uint64_t seed) const = 0;
  virtual bool concurrent_safe() const = 0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// ---------------------------------------------------------------------------
// Surrogate

struct MetricRange {
  double lo = 0;
  double hi = 1;

  friend bool operator==(const MetricRange&, const MetricRange&) = default;
};

struct SurrogateTask {
  std::string task;
  double bias = 0;
  std::array<double, 2> layer_type{};  // IBN, FusedIBN
  std::array<double, 2> kernel{};      // 3, 5
  std::array<double, 4> multiplier{};  // 0.5, 0.75, 1.0, 1.5
  std::array<double, 2> expansion{};   // 3, 6
  double noise_sigma = 0;              // logit units
  std::map<std::string, MetricRange> ranges;  // metric -> output range

  friend bool operator==(const SurrogateTask&, const SurrogateTask&) = default;
};

struct SurrogateConfig {
  std::vector<SurrogateTask> tasks;
  std::uint64_t seed = 0;

  friend bool operator==(const SurrogateConfig&, const SurrogateConfig&) = default;
};

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double contribution(const SurrogateTask& t, const LayerChoice& c) {
  return t.layer_type[static_cast<std::size_t>(c.layer_type)] +
         t.kernel[static_cast<std::size_t>(c.kernel)] +
         t.multiplier[static_cast<std::size_t>(c.multiplier)] +
         t.expansion[static_cast<std::size_t>(c.expansion)];
}

// Noise-free logit of one task.
template <std::size_t N>
double surrogate_logit(const BasicGenome<N>& g, const SurrogateTask& t) {
  double s = t.bias;
  for (std::size_t b = 0; b < N; ++b) s += contribution(t, g[b]);
  return s;
}

// max - min of the noise-free logit over an N-block space. The score is
// additive across blocks and fields, so the extremes are per-field.
inline double surrogate_logit_range(const SurrogateTask& t, std::size_t blocks) {
  auto span = [](const auto& a) {
    auto [lo, hi] = std::minmax_element(a.begin(), a.end());
    return *hi - *lo;
  };
  return double(blocks) *
         (span(t.layer_type) + span(t.kernel) + span(t.multiplier) + span(t.expansion));
}

template <std::size_t N>
class SurrogateEvaluator final : public Evaluator<N> {
 public:
  SurrogateEvaluator(SurrogateConfig cfg, std::vector<TaskSpec> tasks)
      : cfg_(std::move(cfg)), tasks_(std::move(tasks)) {
    validate_tasks(tasks_);
    for (const auto& t : tasks_) {
      const SurrogateTask& st = find_task(t.task);
      if (!(st.noise_sigma >= 0)) throw ConfigError("surrogate." + t.task + ".noise_sigma", "must be >= 0");
      for (const auto& m : t.metrics) {
        auto it = st.ranges.find(m.metric);
        const std::string key = "surrogate." + t.task + ".ranges." + m.metric;
        if (it == st.ranges.end()) throw ConfigError(key, "missing range");
        const auto& r = it->second;
        if (!(r.lo < r.hi)) throw ConfigError(key, "lo must be < hi");
        if (m.direction == Direction::kLowerBetter && !(r.lo > 0)) {
          throw ConfigError(key, "error metric range must be > 0");
        }
        if (m.direction == Direction::kHigherBetter) {
          const double top = m.scale == MetricScale::kPercent ? 100.0 : 1.0;
          if (r.lo < 0 || r.hi > top) throw ConfigError(key, "outside the metric's scale");
        }
      }
    }
  }

  Evaluation evaluate(const BasicGenome<N>& g, std::uint64_t seed) const override {
    Evaluation e;
    std::mt19937_64 rng(splitmix64(cfg_.seed ^ splitmix64(seed)));
    for (const auto& t : tasks_) {
      const SurrogateTask& st = find_task(t.task);
      double logit = surrogate_logit(g, st);
      if (st.noise_sigma > 0) {
        std::normal_distribution<double> noise(0.0, st.noise_sigma);
        logit += noise(rng);
      }
      const double s = logistic(logit);
      for (const auto& m : t.metrics) {
        const MetricRange& r = st.ranges.at(m.metric);
        double v = m.direction == Direction::kHigherBetter ? r.lo + (r.hi - r.lo) * s
                                                           : r.hi - (r.hi - r.lo) * s;
        e.metrics.values[{m.task, m.metric}] = std::clamp(v, r.lo, r.hi);
      }
    }
    return e;
  }

  bool concurrent_safe() const override { return true; }

  const SurrogateConfig& config() const { return cfg_; }
  const SurrogateTask& find_task(const std::string& name) const {
    for (const auto& t : cfg_.tasks) {
      if (t.task == name) return t;
    }
    throw ConfigError("surrogate.tasks." + name, "no surrogate entry for task");
  }

 private:
  SurrogateConfig cfg_;
  std::vector<TaskSpec> tasks_;
};

// ---------------------------------------------------------------------------
// Lookup table
//
// File format (CSV). Header line:
//   genome_key,task,metric,value
// Each record is a genome key followed by one or more (task, metric, value)
// triples on the same line:
//   F3x1.0e3-I5x1.5e6-...,seg,miou,46.52,seg,pacc,90.61,depth,abse,0.0143

template <std::size_t N>
class LookupEvaluator final : public Evaluator<N> {
 public:
  static LookupEvaluator load(std::istream& is) {
    LookupEvaluator ev;
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(is, line) ||
        split_csv(line) != std::vector<std::string>{"genome_key", "task", "metric", "value"}) {
      throw ParseError("lookup line 1: expected header genome_key,task,metric,value", 1);
    }
    while (std::getline(is, line)) {
      ++line_no;
      if (line.empty() || line == "\r") continue;
      auto cells = split_csv(line);
      auto fail = [&](const std::string& what) {
        throw ParseError("lookup line " + std::to_string(line_no) + ": " + what, line_no);
      };
      if (cells.size() < 4 || (cells.size() - 1) % 3 != 0) {
        fail("expected a genome key followed by (task,metric,value) triples");
      }
      std::string key;
      try {
        key = encode_key(decode_key<N>(cells[0]));
      } catch (const ParseError& e) {
        fail(e.what());
      }
      MetricReport r;
      for (std::size_t i = 1; i < cells.size(); i += 3) {
        const double v = parse_double(cells[i + 2], line_no, "value");
        if (!r.values.emplace(MetricKey{cells[i], cells[i + 1]}, v).second) {
          fail("duplicate metric " + cells[i] + "/" + cells[i + 1]);
        }
      }
      if (!ev.table_.emplace(key, std::move(r)).second) fail("duplicate genome key " + key);
    }
    return ev;
  }

  Evaluation evaluate(const BasicGenome<N>& g, std::uint64_t) const override {
    const std::string key = encode_key(g);
    auto it = table_.find(key);
    if (it == table_.end()) throw EvaluationMiss(key);
    return {it->second, std::nullopt};
  }

  bool concurrent_safe() const override { return true; }
  std::size_t size() const { return table_.size(); }

 private:
  std::unordered_map<std::string, MetricReport> table_;
};

}  // namespace mtnas

#endif  // MTNAS_EVALUATORS_HPP_
