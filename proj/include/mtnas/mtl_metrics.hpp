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

// Task/metric declarations, metric reports, and relative (delta) scores of a
// multi-task model against single-task baselines.

#ifndef MTNAS_MTL_METRICS_HPP_
#define MTNAS_MTL_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <istream>
#include <iterator>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mtnas/errors.hpp"
#include "mtnas/text_io.hpp"

namespace mtnas {

enum class Direction { kHigherBetter, kLowerBetter };

// Declared value range for higher-is-better metrics: percent metrics live in
// [0, 100] and are divided by 100 before entering the reward.
enum class MetricScale { kUnit, kPercent };

// How a metric is mapped into (0, 1] for the reward product.
enum class MetricTransform { kIdentity, kReciprocal, kOneMinus };

struct MetricSpec {
  std::string task;
  std::string metric;
  Direction direction = Direction::kHigherBetter;
  double weight = 1.0;
  MetricScale scale = MetricScale::kUnit;
  MetricTransform transform = MetricTransform::kIdentity;

  friend bool operator==(const MetricSpec&, const MetricSpec&) = default;
};

struct TaskSpec {
  std::string task;
  std::vector<MetricSpec> metrics;

  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

using MetricKey = std::pair<std::string, std::string>;  // (task, metric)

struct MetricReport {
  std::map<MetricKey, double> values;

  double at(const std::string& task, const std::string& metric) const {
    auto it = values.find({task, metric});
    if (it == values.end()) {
      throw DomainError("metric report is missing " + task + "/" + metric);
    }
    return it->second;
  }

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

// --- name conversions -------------------------------------------------------

inline std::string to_string(Direction d) {
  return d == Direction::kHigherBetter ? "higher" : "lower";
}
inline std::string to_string(MetricScale s) {
  return s == MetricScale::kUnit ? "unit" : "percent";
}
inline std::string to_string(MetricTransform t) {
  switch (t) {
    case MetricTransform::kIdentity: return "identity";
    case MetricTransform::kReciprocal: return "reciprocal";
    case MetricTransform::kOneMinus: return "one_minus";
  }
  return "?";
}
inline bool parse_direction(std::string_view s, Direction& out) {
  if (s == "higher") { out = Direction::kHigherBetter; return true; }
  if (s == "lower") { out = Direction::kLowerBetter; return true; }
  return false;
}
inline bool parse_scale(std::string_view s, MetricScale& out) {
  if (s == "unit") { out = MetricScale::kUnit; return true; }
  if (s == "percent") { out = MetricScale::kPercent; return true; }
  return false;
}
inline bool parse_transform(std::string_view s, MetricTransform& out) {
  if (s == "identity") { out = MetricTransform::kIdentity; return true; }
  if (s == "reciprocal") { out = MetricTransform::kReciprocal; return true; }
  if (s == "one_minus") { out = MetricTransform::kOneMinus; return true; }
  return false;
}

// Checks weights, (task, metric) uniqueness and transform/direction pairing.
inline void validate_tasks(std::span<const TaskSpec> tasks) {
  if (tasks.empty()) throw ConfigError("tasks", "at least one task is required");
  std::set<MetricKey> seen;
  std::set<std::string> task_names;
  for (const auto& t : tasks) {
    if (t.task.empty()) throw ConfigError("tasks", "task name must be nonempty");
    if (!task_names.insert(t.task).second) {
      throw ConfigError("tasks." + t.task, "duplicate task");
    }
    if (t.metrics.empty()) throw ConfigError("tasks." + t.task, "task has no metrics");
    double wsum = 0;
    for (const auto& m : t.metrics) {
      const std::string name = "tasks." + t.task + "." + m.metric;
      if (m.task != t.task) throw ConfigError(name, "metric task id does not match its task");
      if (m.metric.empty()) throw ConfigError(name, "metric name must be nonempty");
      if (!seen.insert({m.task, m.metric}).second) throw ConfigError(name, "duplicate metric");
      if (!(m.weight >= 0) || std::isinf(m.weight)) throw ConfigError(name, "weight must be finite and >= 0");
      if (m.direction == Direction::kHigherBetter && m.transform != MetricTransform::kIdentity) {
        throw ConfigError(name, "higher-is-better metrics use the identity transform");
      }
      if (m.direction == Direction::kLowerBetter && m.transform == MetricTransform::kIdentity) {
        throw ConfigError(name, "lower-is-better metrics need reciprocal or one_minus");
      }
      wsum += m.weight;
    }
    if (!(wsum > 0)) throw ConfigError("tasks." + t.task, "metric weights sum to zero");
  }
}

// Every declared metric present; error metrics strictly positive; accuracy
// metrics within their declared scale.
inline void validate_report(const MetricReport& r, std::span<const TaskSpec> tasks) {
  for (const auto& t : tasks) {
    for (const auto& m : t.metrics) {
      auto it = r.values.find({m.task, m.metric});
      if (it == r.values.end()) {
        throw DomainError("metric report is missing " + m.task + "/" + m.metric);
      }
      const double v = it->second;
      if (!std::isfinite(v)) throw DomainError(m.task + "/" + m.metric + " is not finite");
      if (m.direction == Direction::kLowerBetter) {
        if (!(v > 0)) throw DomainError(m.task + "/" + m.metric + " must be > 0");
      } else {
        const double hi = m.scale == MetricScale::kPercent ? 100.0 : 1.0;
        if (v < 0 || v > hi) {
          throw DomainError(m.task + "/" + m.metric + " outside [0, " + format_double(hi) + "]");
        }
      }
    }
  }
}

// --- delta scores -----------------------------------------------------------

// Percent change of `value` against `baseline`, sign-flipped for
// lower-is-better metrics so that improvement is always positive.
inline double delta_metric(double value, double baseline, Direction direction) {
  if (baseline == 0.0) throw DomainError("delta_metric: baseline is zero");
  const double sign = direction == Direction::kLowerBetter ? -1.0 : 1.0;
  return sign * (value - baseline) / baseline * 100.0;
}

inline double delta_task(std::span<const double> metric_deltas) {
  if (metric_deltas.empty()) throw DomainError("delta_task: no metrics");
  return std::accumulate(metric_deltas.begin(), metric_deltas.end(), 0.0) /
         double(metric_deltas.size());
}

inline double delta_overall(std::span<const double> task_deltas) {
  if (task_deltas.empty()) throw DomainError("delta_overall: no tasks");
  return std::accumulate(task_deltas.begin(), task_deltas.end(), 0.0) /
         double(task_deltas.size());
}

struct MetricDelta {
  std::string task;
  std::string metric;
  double value = 0;
  double baseline = 0;
  double delta = 0;
};

struct TaskDelta {
  std::string task;
  double delta = 0;
};

struct DeltaTable {
  std::vector<MetricDelta> metrics;
  std::vector<TaskDelta> tasks;
  double overall = 0;
};

inline DeltaTable compute_deltas(const MetricReport& model, const MetricReport& baseline,
                                 std::span<const TaskSpec> tasks) {
  DeltaTable table;
  std::vector<double> task_deltas;
  for (const auto& t : tasks) {
    std::vector<double> ds;
    for (const auto& m : t.metrics) {
      MetricDelta d{m.task, m.metric, model.at(m.task, m.metric),
                    baseline.at(m.task, m.metric), 0};
      d.delta = delta_metric(d.value, d.baseline, m.direction);
      ds.push_back(d.delta);
      table.metrics.push_back(d);
    }
    table.tasks.push_back({t.task, delta_task(ds)});
    task_deltas.push_back(table.tasks.back().delta);
  }
  table.overall = delta_overall(task_deltas);
  return table;
}

// --- text formats -----------------------------------------------------------
//
// Metric report:  task,metric,value
// Metric specs:   task,metric,direction,weight,scale,transform
//                 direction in {higher,lower}; scale in {unit,percent};
//                 transform in {identity,reciprocal,one_minus}
// Delta table:    kind,task,metric,value,baseline,delta_pct
//                 kind in {metric,task,overall}; unused cells left empty.

inline MetricReport read_metric_report(std::istream& is) {
  MetricReport r;
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(is, line) || split_csv(line) != std::vector<std::string>{"task", "metric", "value"}) {
    throw ParseError("metric report line 1: expected header task,metric,value", 1);
  }
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv(line);
    if (cells.size() != 3) {
      throw ParseError("metric report line " + std::to_string(line_no) + ": expected 3 columns", line_no);
    }
    const double v = parse_double(cells[2], line_no, "value");
    if (!r.values.emplace(MetricKey{cells[0], cells[1]}, v).second) {
      throw ParseError("metric report line " + std::to_string(line_no) + ": duplicate " +
                           cells[0] + "/" + cells[1], line_no);
    }
  }
  return r;
}

inline void write_metric_report(std::ostream& os, const MetricReport& r) {
  os << "task,metric,value\n";
  for (const auto& [k, v] : r.values) {
    os << k.first << ',' << k.second << ',' << format_double(v) << '\n';
  }
}

// Groups rows by task in first-appearance order.
inline std::vector<TaskSpec> read_metric_specs(std::istream& is) {
  std::vector<TaskSpec> tasks;
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(is, line) ||
      split_csv(line) != std::vector<std::string>{"task", "metric", "direction", "weight", "scale", "transform"}) {
    throw ParseError("metric specs line 1: expected header task,metric,direction,weight,scale,transform", 1);
  }
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv(line);
    auto fail = [&](const std::string& what) {
      throw ParseError("metric specs line " + std::to_string(line_no) + ": " + what, line_no);
    };
    if (cells.size() != 6) fail("expected 6 columns");
    MetricSpec m;
    m.task = cells[0];
    m.metric = cells[1];
    if (!parse_direction(cells[2], m.direction)) fail("bad direction '" + cells[2] + "'");
    m.weight = parse_double(cells[3], line_no, "weight");
    if (!parse_scale(cells[4], m.scale)) fail("bad scale '" + cells[4] + "'");
    if (!parse_transform(cells[5], m.transform)) fail("bad transform '" + cells[5] + "'");
    auto it = std::find_if(tasks.begin(), tasks.end(), [&](const TaskSpec& t) { return t.task == m.task; });
    if (it == tasks.end()) {
      tasks.push_back({m.task, {}});
      it = std::prev(tasks.end());
    }
    it->metrics.push_back(m);
  }
  validate_tasks(tasks);
  return tasks;
}

inline void write_metric_specs(std::ostream& os, std::span<const TaskSpec> tasks) {
  os << "task,metric,direction,weight,scale,transform\n";
  for (const auto& t : tasks) {
    for (const auto& m : t.metrics) {
      os << m.task << ',' << m.metric << ',' << to_string(m.direction) << ','
         << format_double(m.weight) << ',' << to_string(m.scale) << ','
         << to_string(m.transform) << '\n';
    }
  }
}

inline void write_delta_table(std::ostream& os, const DeltaTable& t) {
  os << "kind,task,metric,value,baseline,delta_pct\n";
  for (const auto& m : t.metrics) {
    os << "metric," << m.task << ',' << m.metric << ',' << format_double(m.value) << ','
       << format_double(m.baseline) << ',' << format_double(m.delta) << '\n';
  }
  for (const auto& k : t.tasks) {
    os << "task," << k.task << ",,,," << format_double(k.delta) << '\n';
  }
  os << "overall,,,,," << format_double(t.overall) << '\n';
}

inline DeltaTable read_delta_table(std::istream& is) {
  DeltaTable t;
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(is, line) || line != "kind,task,metric,value,baseline,delta_pct") {
    throw ParseError("delta table line 1: bad header", 1);
  }
  bool saw_overall = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto c = split_csv(line);
    if (c.size() != 6) throw ParseError("delta table line " + std::to_string(line_no) + ": expected 6 columns", line_no);
    if (c[0] == "metric") {
      t.metrics.push_back({c[1], c[2], parse_double(c[3], line_no, "value"),
                           parse_double(c[4], line_no, "baseline"),
                           parse_double(c[5], line_no, "delta_pct")});
    } else if (c[0] == "task") {
      t.tasks.push_back({c[1], parse_double(c[5], line_no, "delta_pct")});
    } else if (c[0] == "overall") {
      t.overall = parse_double(c[5], line_no, "delta_pct");
      saw_overall = true;
    } else {
      throw ParseError("delta table line " + std::to_string(line_no) + ": unknown kind '" + c[0] + "'", line_no);
    }
  }
  if (!saw_overall) throw ParseError("delta table: missing overall row", line_no);
  return t;
}

}  // namespace mtnas

#endif  // MTNAS_MTL_METRICS_HPP_
