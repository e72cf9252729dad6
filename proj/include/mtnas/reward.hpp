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

// Hardware-constrained multi-task search reward.
//
// Accuracy is a nested geometric mean: each task's normalized metrics are
// combined with a weighted geometric mean, and tasks are combined with an
// unweighted geometric mean. The reward scales accuracy by a latency factor:
//
//   reward = acc * (latency / target_latency) ^ beta
//   beta   = p if latency <= target_latency, q otherwise.

#ifndef MTNAS_REWARD_HPP_
#define MTNAS_REWARD_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "mtnas/errors.hpp"
#include "mtnas/mtl_metrics.hpp"

namespace mtnas {

inline constexpr double kOneMinusFloor = 1e-6;

struct RewardConfig {
  double target_latency_s = 1e-3;
  double p = 0.0;
  double q = -0.07;
  std::vector<TaskSpec> tasks;

  void validate() const {
    if (!(target_latency_s > 0) || std::isinf(target_latency_s)) {
      throw ConfigError("reward.target_latency_s", "must be finite and > 0");
    }
    if (!(p <= 0)) throw ConfigError("reward.p", "must be <= 0");
    if (!(q <= p)) throw ConfigError("reward.q", "must be <= p");
    validate_tasks(tasks);
  }

  friend bool operator==(const RewardConfig&, const RewardConfig&) = default;
};

struct CandidateScore {
  double acc = 0;
  double latency_s = 0;
  double reward = 0;
  bool within_budget = false;

  friend bool operator==(const CandidateScore&, const CandidateScore&) = default;
};

// Maps a raw metric into (0, 1]. Percent-scale metrics are divided by 100
// first.
inline double normalize_metric(double value, const MetricSpec& spec) {
  if (!(value >= 0) || std::isinf(value)) {
    throw DomainError(spec.task + "/" + spec.metric + ": value must be finite and >= 0");
  }
  if (spec.scale == MetricScale::kPercent) value /= 100.0;
  double out = 0;
  switch (spec.transform) {
    case MetricTransform::kIdentity: out = value; break;
    case MetricTransform::kReciprocal: out = 1.0 / (1.0 + value); break;
    case MetricTransform::kOneMinus: out = std::max(kOneMinusFloor, 1.0 - value); break;
  }
  if (!(out > 0)) {
    throw DomainError(spec.task + "/" + spec.metric + ": normalized value must be > 0");
  }
  if (out > 1.0) {
    throw DomainError(spec.task + "/" + spec.metric + ": normalized value exceeds 1");
  }
  return out;
}

struct WeightedValue {
  double value = 0;
  double weight = 1;
};

// Weighted geometric mean of values in (0, 1].
inline double task_accuracy(std::span<const WeightedValue> metrics) {
  if (metrics.empty()) throw DomainError("task_accuracy: no metrics");
  double wsum = 0;
  double log_sum = 0;
  for (const auto& m : metrics) {
    if (!(m.value > 0) || m.value > 1) throw DomainError("task_accuracy: value outside (0, 1]");
    if (!(m.weight >= 0)) throw DomainError("task_accuracy: negative weight");
    wsum += m.weight;
    if (m.weight > 0) log_sum += m.weight * std::log(m.value);
  }
  if (!(wsum > 0)) throw DomainError("task_accuracy: weights sum to zero");
  return std::exp(log_sum / wsum);
}

inline double multitask_accuracy(std::span<const double> task_accs) {
  if (task_accs.empty()) throw DomainError("multitask_accuracy: no tasks");
  double log_sum = 0;
  for (double a : task_accs) {
    if (!(a > 0) || a > 1) throw DomainError("multitask_accuracy: value outside (0, 1]");
    log_sum += std::log(a);
  }
  return std::exp(log_sum / double(task_accs.size()));
}

// Nested accuracy of a full metric report.
inline double report_accuracy(const MetricReport& report, std::span<const TaskSpec> tasks) {
  std::vector<double> task_accs;
  task_accs.reserve(tasks.size());
  for (const auto& t : tasks) {
    std::vector<WeightedValue> wv;
    wv.reserve(t.metrics.size());
    for (const auto& m : t.metrics) {
      wv.push_back({normalize_metric(report.at(m.task, m.metric), m), m.weight});
    }
    task_accs.push_back(task_accuracy(wv));
  }
  return multitask_accuracy(task_accs);
}

inline CandidateScore reward(double acc, double latency_s, const RewardConfig& cfg) {
  if (!(acc > 0) || acc > 1) throw DomainError("reward: acc outside (0, 1]");
  if (!(latency_s > 0) || std::isinf(latency_s)) {
    throw DomainError("reward: latency must be finite and > 0");
  }
  CandidateScore s;
  s.acc = acc;
  s.latency_s = latency_s;
  s.within_budget = latency_s <= cfg.target_latency_s;
  const double beta = s.within_budget ? cfg.p : cfg.q;
  s.reward = beta == 0.0 ? acc : acc * std::pow(latency_s / cfg.target_latency_s, beta);
  return s;
}

}  // namespace mtnas

#endif  // MTNAS_REWARD_HPP_
