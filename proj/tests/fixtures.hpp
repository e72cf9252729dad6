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


// Fixtures shared by the unit tests and the acceptance runner. Published
// values are transcribed verbatim; everything else is computed here without
// going through the library code under test.

#ifndef MTNAS_TESTS_FIXTURES_HPP_
#define MTNAS_TESTS_FIXTURES_HPP_

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "mtnas/mtnas.hpp"

namespace mtnas::testing {

// (layer, stride, kernel, filters, expansion); expansion 0 means "--".
using RowTuple = std::tuple<std::string, int, int, int, int>;

// Multi-task backbone, rows 0-16.
inline const std::vector<RowTuple> kMultiTaskRows = {
    {"Conv2D", 2, 3, 32, 0},     {"FusedIBN", 1, 3, 16, 1},  {"IBN", 2, 5, 36, 6},
    {"FusedIBN", 1, 5, 24, 6},   {"FusedIBN", 2, 3, 60, 6},  {"FusedIBN", 1, 3, 40, 3},
    {"FusedIBN", 2, 5, 120, 3},  {"IBN", 1, 3, 120, 3},      {"FusedIBN", 1, 5, 80, 6},
    {"FusedIBN", 1, 5, 168, 6},  {"FusedIBN", 1, 5, 84, 3},  {"FusedIBN", 1, 5, 84, 6},
    {"FusedIBN", 2, 5, 288, 3},  {"FusedIBN", 1, 3, 96, 3},  {"FusedIBN", 1, 3, 96, 6},
    {"FusedIBN", 1, 3, 96, 3},   {"FusedIBN", 1, 5, 160, 6},
};

// Single-task backbone, rows 0-16.
inline const std::vector<RowTuple> kSingleTaskRows = {
    {"Conv2D", 2, 3, 32, 0},     {"FusedIBN", 1, 3, 24, 1},  {"IBN", 2, 3, 36, 6},
    {"IBN", 1, 3, 36, 6},        {"FusedIBN", 2, 5, 40, 6},  {"FusedIBN", 1, 5, 40, 3},
    {"IBN", 2, 3, 80, 6},        {"FusedIBN", 1, 3, 120, 3}, {"FusedIBN", 1, 3, 80, 6},
    {"FusedIBN", 1, 3, 168, 3},  {"FusedIBN", 1, 3, 56, 6},  {"FusedIBN", 1, 3, 112, 3},
    {"FusedIBN", 2, 5, 192, 6},  {"FusedIBN", 1, 3, 192, 6}, {"IBN", 1, 5, 192, 3},
    {"IBN", 1, 5, 192, 3},       {"FusedIBN", 1, 5, 240, 3},
};

// Genome keys for the two backbones. Block 1 carries expansion 3 in the
// genome; decoding forces it to 1.
inline const std::string kMultiTaskKey =
    "F3x1.0e3-I5x1.5e6-F5x1.0e6-F3x1.5e6-F3x1.0e3-F5x1.5e3-I3x1.5e3-F5x1.0e6-"
    "F5x1.5e6-F5x0.75e3-F5x0.75e6-F5x1.5e3-F3x0.5e3-F3x0.5e6-F3x0.5e3-F5x0.5e6";
inline const std::string kSingleTaskKey =
    "F3x1.5e3-I3x1.5e6-I3x1.5e6-F5x1.0e6-F5x1.0e3-I3x1.0e6-F3x1.5e3-F3x1.0e6-"
    "F3x1.5e3-F3x0.5e6-F3x1.0e3-F5x1.0e6-F3x1.0e6-I5x1.0e3-I5x1.0e3-F5x0.75e3";

inline std::vector<RowTuple> as_tuples(const Architecture& a) {
  std::vector<RowTuple> out;
  for (const auto& r : a.rows) {
    out.emplace_back(std::string(layer_kind_name(r.layer)), r.stride, r.kernel, r.filters,
                     r.expansion.value_or(0));
  }
  return out;
}

// --- multi-task metric table ------------------------------------------------

struct Table2Row {
  std::string model;
  bool edge_baseline;  // compared against the edge single-task row
  std::array<double, 4> raw;     // mIoU, PAcc, AbsE, RelE
  std::array<double, 7> printed;  // dmIoU dPAcc dAbsE dRelE dT_S dT_D dT
};

inline constexpr std::array<double, 4> kSingleTaskBaseline = {40.20, 74.70, .0170, .330};
inline constexpr std::array<double, 4> kSingleTaskEdgeBaseline = {40.04, 88.68, .0157, .340};

inline const std::vector<Table2Row> kTable2 = {
    {"MT baseline", false, {37.70, 73.80, .0180, .340}, {-6.2, -1.2, -5.9, -3.0, -3.7, -4.5, -4.1}},
    {"Cross-Stitch", false, {40.30, 74.30, .0150, .300}, {0.2, -0.5, 11.8, 9.1, -0.1, 10.4, 5.1}},
    {"Sluice", false, {39.80, 74.20, .0160, .310}, {-1.0, -0.7, 5.9, 6.1, -0.8, 6.0, 2.6}},
    {"NDDR-CNN", false, {41.50, 74.20, .0170, .310}, {3.2, -0.7, 0.0, 6.1, 1.3, 3.0, 2.2}},
    {"MTAN", false, {40.80, 74.30, .0150, .320}, {1.5, -0.5, 11.8, 3.0, 0.5, 7.4, 3.9}},
    {"DEN", false, {38.00, 74.20, .0170, .370}, {-5.5, -0.7, 0.0, -12.1, -3.1, -6.1, -4.6}},
    {"AdaShare", false, {41.50, 74.90, .0160, .330}, {3.2, 0.3, 5.9, 0.0, 1.8, 2.9, 2.3}},
    {"MT edge", true, {38.64, 88.49, .0171, .354}, {-3.5, -0.2, -8.5, -4.1, -1.9, -6.3, -4.1}},
    {"EDNAS", true, {46.52, 90.61, .0143, .316}, {16.2, 2.2, 8.9, 6.9, 9.2, 7.9, 8.5}},
    {"EDNAS+JAReD", true, {46.11, 90.47, .0143, .281}, {15.1, 2.0, 9.1, 17.4, 8.6, 13.3, 10.9}},
};

inline std::vector<TaskSpec> seg_depth_tasks() {
  return {
      {"seg",
       {{"seg", "miou", Direction::kHigherBetter, 1.0, MetricScale::kPercent, MetricTransform::kIdentity},
        {"seg", "pacc", Direction::kHigherBetter, 1.0, MetricScale::kPercent, MetricTransform::kIdentity}}},
      {"depth",
       {{"depth", "abse", Direction::kLowerBetter, 1.0, MetricScale::kUnit, MetricTransform::kReciprocal},
        {"depth", "rele", Direction::kLowerBetter, 1.0, MetricScale::kUnit, MetricTransform::kReciprocal}}},
  };
}

inline MetricReport seg_depth_report(const std::array<double, 4>& v) {
  MetricReport r;
  r.values[{"seg", "miou"}] = v[0];
  r.values[{"seg", "pacc"}] = v[1];
  r.values[{"depth", "abse"}] = v[2];
  r.values[{"depth", "rele"}] = v[3];
  return r;
}

// --- restricted 2-block search fixture ----------------------------------------

using Genome2 = BasicGenome<2>;

// Every genome of the 2-block space in mixed-radix order.
inline std::vector<Genome2> enumerate_two_block_space() {
  std::vector<Genome2> out;
  const std::array<int, 4> card = {2, 2, 4, 2};
  for (int i = 0; i < 1024; ++i) {
    Genome2 g;
    int x = i;
    for (std::size_t b = 0; b < 2; ++b) {
      LayerChoice c;
      c.layer_type = static_cast<LayerType>(x % card[0]);
      x /= card[0];
      c.kernel = static_cast<Kernel>(x % card[1]);
      x /= card[1];
      c.multiplier = static_cast<ChannelMultiplier>(x % card[2]);
      x /= card[2];
      c.expansion = static_cast<Expansion>(x % card[3]);
      x /= card[3];
      g[b] = c;
    }
    out.push_back(g);
  }
  return out;
}

// Additive surrogate with distinct per-option weights. `noise_fraction`
// scales the per-evaluation logit noise relative to each task's logit range.
inline SurrogateConfig two_block_surrogate(double noise_fraction) {
  SurrogateTask seg{"seg", -1.0, {0.0, 0.35}, {0.0, 0.2}, {-0.6, -0.2, 0.1, 0.45}, {0.0, 0.15}, 0,
                    {{"miou", {30, 50}}, {"pacc", {80, 92}}}};
  SurrogateTask depth{"depth", -1.0, {0.1, 0.3}, {0.25, 0.0}, {-0.5, 0.0, 0.3, 0.4}, {0.0, 0.2}, 0,
                      {{"abse", {0.013, 0.020}}, {"rele", {0.25, 0.40}}}};
  seg.noise_sigma = noise_fraction * surrogate_logit_range(seg, 2);
  depth.noise_sigma = noise_fraction * surrogate_logit_range(depth, 2);
  return {{seg, depth}, 0};
}

// Latency budget for the 2-block fixture: the median estimated latency of
// the space under the default profile at 256x256.
inline double two_block_median_latency() {
  std::vector<double> lat;
  for (const auto& g : enumerate_two_block_space()) {
    lat.push_back(estimated_latency(g, HardwareProfile{}, Resolution{}));
  }
  std::nth_element(lat.begin(), lat.begin() + 512, lat.end());
  return lat[512];
}

}  // namespace mtnas::testing

#endif  // MTNAS_TESTS_FIXTURES_HPP_
