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


#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mtnas/mtl_metrics.hpp"

namespace mtnas {
namespace {

TEST(DeltaMetric, PublishedExamples) {
  EXPECT_NEAR(delta_metric(37.70, 40.20, Direction::kHigherBetter), -6.2189, 1e-4);
  EXPECT_NEAR(delta_metric(0.0180, 0.0170, Direction::kLowerBetter), -5.8824, 1e-4);
}

TEST(DeltaMetric, IdentityIsZero) {
  for (double x : {0.01, 1.0, 42.0}) {
    EXPECT_EQ(delta_metric(x, x, Direction::kHigherBetter), 0.0);
    EXPECT_EQ(delta_metric(x, x, Direction::kLowerBetter), 0.0);
  }
}

TEST(DeltaMetric, ImprovementIsPositive) {
  EXPECT_GT(delta_metric(0.9, 1.0, Direction::kLowerBetter), 0);
  EXPECT_GT(delta_metric(1.1, 1.0, Direction::kHigherBetter), 0);
  EXPECT_LT(delta_metric(1.1, 1.0, Direction::kLowerBetter), 0);
}

TEST(DeltaMetric, ScaleInvariant) {
  for (double s : {0.01, 3.0, 1000.0}) {
    EXPECT_NEAR(delta_metric(0.0143 * s, 0.0157 * s, Direction::kLowerBetter),
                delta_metric(0.0143, 0.0157, Direction::kLowerBetter), 1e-9);
  }
}

TEST(DeltaMetric, ZeroBaselineThrows) {
  EXPECT_THROW(delta_metric(1.0, 0.0, Direction::kHigherBetter), DomainError);
}

TEST(DeltaTask, MeansAndErrors) {
  const std::vector<double> seg = {-6.22, -1.36};
  EXPECT_NEAR(delta_task(seg), -3.79, 1e-12);
  const std::vector<double> depth = {-5.88, -3.03};
  EXPECT_NEAR(delta_task(depth), -4.455, 1e-12);
  const std::vector<double> one = {2.5};
  EXPECT_EQ(delta_task(one), 2.5);
  EXPECT_THROW(delta_task(std::vector<double>{}), DomainError);
}

TEST(DeltaOverall, MeansAndErrors) {
  EXPECT_NEAR(delta_overall(std::vector<double>{-3.7, -4.5}), -4.1, 1e-12);
  EXPECT_NEAR(delta_overall(std::vector<double>{9.2, 7.9}), 8.55, 1e-12);
  EXPECT_EQ(delta_overall(std::vector<double>{0, 0, 0}), 0.0);
  EXPECT_THROW(delta_overall(std::vector<double>{}), DomainError);
}

// Independent recomputation of one table row.
std::array<double, 7> oracle_row(const std::array<double, 4>& m, const std::array<double, 4>& b) {
  const double miou = (m[0] - b[0]) / b[0] * 100;
  const double pacc = (m[1] - b[1]) / b[1] * 100;
  const double abse = -(m[2] - b[2]) / b[2] * 100;
  const double rele = -(m[3] - b[3]) / b[3] * 100;
  const double ts = (miou + pacc) / 2;
  const double td = (abse + rele) / 2;
  return {miou, pacc, abse, rele, ts, td, (ts + td) / 2};
}

TEST(ComputeDeltas, MatchesArithmeticOracleOnEveryRow) {
  const auto tasks = testing::seg_depth_tasks();
  for (const auto& row : testing::kTable2) {
    const auto& base = row.edge_baseline ? testing::kSingleTaskEdgeBaseline : testing::kSingleTaskBaseline;
    const DeltaTable t = compute_deltas(testing::seg_depth_report(row.raw), testing::seg_depth_report(base), tasks);
    const auto want = oracle_row(row.raw, base);
    ASSERT_EQ(t.metrics.size(), 4u);
    ASSERT_EQ(t.tasks.size(), 2u);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(t.metrics[i].delta, want[i], 1e-9) << row.model;
    EXPECT_NEAR(t.tasks[0].delta, want[4], 1e-9);
    EXPECT_NEAR(t.tasks[1].delta, want[5], 1e-9);
    EXPECT_NEAR(t.overall, want[6], 1e-9);
  }
}

TEST(ComputeDeltas, PublishedRowsThatRoundConsistently) {
  const auto tasks = testing::seg_depth_tasks();
  for (const auto& row : testing::kTable2) {
    if (row.model != "MT baseline" && row.model != "Cross-Stitch") continue;
    const DeltaTable t = compute_deltas(testing::seg_depth_report(row.raw),
                                        testing::seg_depth_report(testing::kSingleTaskBaseline), tasks);
    const std::array<double, 7> got = {t.metrics[0].delta, t.metrics[1].delta, t.metrics[2].delta,
                                       t.metrics[3].delta, t.tasks[0].delta, t.tasks[1].delta, t.overall};
    for (int i = 0; i < 7; ++i) EXPECT_NEAR(got[i], row.printed[i], 0.15) << row.model << " col " << i;
  }
}

TEST(ComputeDeltas, IdenticalReportsGiveZeros) {
  const auto tasks = testing::seg_depth_tasks();
  const auto r = testing::seg_depth_report(testing::kSingleTaskBaseline);
  const DeltaTable t = compute_deltas(r, r, tasks);
  for (const auto& m : t.metrics) EXPECT_EQ(m.delta, 0.0);
  EXPECT_EQ(t.overall, 0.0);
}

TEST(ComputeDeltas, MissingMetricNamesIt) {
  const auto tasks = testing::seg_depth_tasks();
  auto model = testing::seg_depth_report(testing::kSingleTaskBaseline);
  model.values.erase({"depth", "rele"});
  try {
    compute_deltas(model, testing::seg_depth_report(testing::kSingleTaskBaseline), tasks);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("depth/rele"), std::string::npos);
  }
}

TEST(ValidateTasks, RejectsBadDeclarations) {
  auto tasks = testing::seg_depth_tasks();
  EXPECT_NO_THROW(validate_tasks(tasks));
  auto dup = tasks;
  dup[0].metrics.push_back(dup[0].metrics[0]);
  EXPECT_THROW(validate_tasks(dup), ConfigError);
  auto neg = tasks;
  neg[1].metrics[0].weight = -1;
  EXPECT_THROW(validate_tasks(neg), ConfigError);
  auto zero = tasks;
  for (auto& m : zero[0].metrics) m.weight = 0;
  EXPECT_THROW(validate_tasks(zero), ConfigError);
  auto ident = tasks;
  ident[1].metrics[0].transform = MetricTransform::kIdentity;
  EXPECT_THROW(validate_tasks(ident), ConfigError);
  EXPECT_THROW(validate_tasks(std::vector<TaskSpec>{}), ConfigError);
}

TEST(ValidateReport, ChecksScalesAndSigns) {
  const auto tasks = testing::seg_depth_tasks();
  EXPECT_NO_THROW(validate_report(testing::seg_depth_report(testing::kSingleTaskBaseline), tasks));
  EXPECT_THROW(validate_report(testing::seg_depth_report({140, 74.7, .017, .33}), tasks), DomainError);
  EXPECT_THROW(validate_report(testing::seg_depth_report({40, 74.7, 0, .33}), tasks), DomainError);
}

TEST(TextFormats, RoundTrips) {
  const auto tasks = testing::seg_depth_tasks();
  std::ostringstream specs;
  write_metric_specs(specs, tasks);
  std::istringstream specs_in(specs.str());
  EXPECT_EQ(read_metric_specs(specs_in), tasks);

  const auto report = testing::seg_depth_report(testing::kTable2[8].raw);
  std::ostringstream rep;
  write_metric_report(rep, report);
  std::istringstream rep_in(rep.str());
  EXPECT_EQ(read_metric_report(rep_in), report);

  const DeltaTable t = compute_deltas(report, testing::seg_depth_report(testing::kSingleTaskEdgeBaseline), tasks);
  std::ostringstream dt;
  write_delta_table(dt, t);
  std::istringstream dt_in(dt.str());
  const DeltaTable back = read_delta_table(dt_in);
  EXPECT_EQ(back.overall, t.overall);
  ASSERT_EQ(back.metrics.size(), t.metrics.size());
  for (std::size_t i = 0; i < t.metrics.size(); ++i) EXPECT_EQ(back.metrics[i].delta, t.metrics[i].delta);
}

TEST(TextFormats, DuplicateReportRowIsParseError) {
  std::istringstream is("task,metric,value\nseg,miou,1\nseg,miou,2\n");
  try {
    read_metric_report(is);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 3u);
  }
}

}  // namespace
}  // namespace mtnas
