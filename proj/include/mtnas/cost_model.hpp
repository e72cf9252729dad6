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

// Analytical MAC / parameter / latency model for decoded backbones.
//
// Latency follows a per-layer roofline:
//
//   latency = max(compute_time, params * bytes_per_weight / weight_bandwidth)
//             + per_layer_overhead
//
// where compute_time sums each sub-convolution's MACs over the throughput it
// runs at. Depthwise convolutions run at dense_macs_per_sec scaled by
// depthwise_efficiency; everything else runs at dense throughput.
//
// Squeeze-excitation, batch-norm, bias and activation costs are not counted.

#ifndef MTNAS_COST_MODEL_HPP_
#define MTNAS_COST_MODEL_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mtnas/errors.hpp"
#include "mtnas/search_space.hpp"
#include "mtnas/text_io.hpp"

namespace mtnas {

struct Resolution {
  int height = 256;
  int width = 256;

  friend bool operator==(const Resolution&, const Resolution&) = default;
};

struct HardwareProfile {
  double dense_macs_per_sec = 4e12;
  double depthwise_efficiency = 1.0 / 3.0;
  double weight_bytes_per_sec = 25e9;
  double per_layer_overhead_s = 20e-6;
  double bytes_per_weight = 1.0;

  // Edge-TPU-class stand-in. Configurable; not calibrated against hardware.
  static HardwareProfile edge_default() { return {}; }

  // Compute-only profile: latency is exactly total MACs over dense throughput.
  static HardwareProfile compute_only(double dense_macs_per_sec) {
    HardwareProfile p;
    p.dense_macs_per_sec = dense_macs_per_sec;
    p.depthwise_efficiency = 1.0;
    p.weight_bytes_per_sec = std::numeric_limits<double>::infinity();
    p.per_layer_overhead_s = 0.0;
    return p;
  }

  void validate() const {
    if (!(dense_macs_per_sec > 0)) {
      throw ConfigError("dense_macs_per_sec", "must be > 0");
    }
    if (!(depthwise_efficiency > 0 && depthwise_efficiency <= 1)) {
      throw ConfigError("depthwise_efficiency", "must be in (0, 1]");
    }
    if (!(weight_bytes_per_sec > 0)) {
      throw ConfigError("weight_bytes_per_sec", "must be > 0");
    }
    if (!(per_layer_overhead_s >= 0) || std::isinf(per_layer_overhead_s)) {
      throw ConfigError("per_layer_overhead_s", "must be finite and >= 0");
    }
    if (!(bytes_per_weight > 0) || std::isinf(bytes_per_weight)) {
      throw ConfigError("bytes_per_weight", "must be finite and > 0");
    }
  }

  friend bool operator==(const HardwareProfile&, const HardwareProfile&) = default;
};

// JSON form. An infinite bandwidth is written as the string "inf".
inline nlohmann::json profile_to_json(const HardwareProfile& p) {
  nlohmann::json j;
  j["dense_macs_per_sec"] = p.dense_macs_per_sec;
  j["depthwise_efficiency"] = p.depthwise_efficiency;
  if (std::isinf(p.weight_bytes_per_sec)) {
    j["weight_bytes_per_sec"] = "inf";
  } else {
    j["weight_bytes_per_sec"] = p.weight_bytes_per_sec;
  }
  j["per_layer_overhead_s"] = p.per_layer_overhead_s;
  j["bytes_per_weight"] = p.bytes_per_weight;
  return j;
}

inline HardwareProfile profile_from_json(const nlohmann::json& j,
                                         const std::string& prefix = "hardware") {
  if (!j.is_object()) throw SchemaError(prefix, "must be an object");
  HardwareProfile p;
  for (const auto& [key, value] : j.items()) {
    const std::string name = prefix + "." + key;
    double v = 0;
    if (key == "weight_bytes_per_sec" && value.is_string()) {
      if (value.get<std::string>() != "inf") throw SchemaError(name, "must be a number or \"inf\"");
      v = std::numeric_limits<double>::infinity();
    } else if (value.is_number()) {
      v = value.get<double>();
    } else {
      throw SchemaError(name, "must be a number");
    }
    if (key == "dense_macs_per_sec") {
      p.dense_macs_per_sec = v;
    } else if (key == "depthwise_efficiency") {
      p.depthwise_efficiency = v;
    } else if (key == "weight_bytes_per_sec") {
      p.weight_bytes_per_sec = v;
    } else if (key == "per_layer_overhead_s") {
      p.per_layer_overhead_s = v;
    } else if (key == "bytes_per_weight") {
      p.bytes_per_weight = v;
    } else {
      throw SchemaError(name, "unknown key");
    }
  }
  try {
    p.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + "." + e.key(), std::string(e.what()).substr(e.key().size() + 2));
  }
  return p;
}

struct LayerCost {
  std::uint64_t macs = 0;
  std::uint64_t flops = 0;
  std::uint64_t params = 0;
  double compute_s = 0;
  double latency_s = 0;
  Resolution output_hw;
  int out_channels = 0;
};

struct CostReport {
  std::vector<LayerCost> per_layer;
  std::uint64_t total_macs = 0;
  std::uint64_t total_flops = 0;
  std::uint64_t total_params = 0;
  double total_latency_s = 0;
};

inline int conv_out_dim(int in, int stride) { return (in + stride - 1) / stride; }

inline LayerCost layer_cost(const ArchitectureRow& row, int in_channels,
                            Resolution in_hw, const HardwareProfile& profile) {
  if (in_hw.height <= 0 || in_hw.width <= 0) {
    throw DomainError("layer " + std::to_string(row.index) +
                      ": spatial dims must be positive");
  }
  if (in_channels <= 0 || row.filters <= 0 || row.kernel <= 0 || row.stride <= 0) {
    throw DomainError("layer " + std::to_string(row.index) +
                      ": channels, kernel and stride must be positive");
  }
  using u64 = std::uint64_t;
  const double dense = profile.dense_macs_per_sec;
  const double depthwise = dense * profile.depthwise_efficiency;

  LayerCost c;
  c.output_hw = {conv_out_dim(in_hw.height, row.stride),
                 conv_out_dim(in_hw.width, row.stride)};
  c.out_channels = row.filters;
  const u64 hi_wi = u64(in_hw.height) * u64(in_hw.width);
  const u64 ho_wo = u64(c.output_hw.height) * u64(c.output_hw.width);
  const u64 k2 = u64(row.kernel) * u64(row.kernel);
  const u64 cin = u64(in_channels);
  const u64 cout = u64(row.filters);

  switch (row.layer) {
    case LayerKind::kConv2D: {
      c.macs = ho_wo * k2 * cin * cout;
      c.params = k2 * cin * cout;
      c.compute_s = double(c.macs) / dense;
      break;
    }
    case LayerKind::kIBN: {
      if (!row.expansion || *row.expansion <= 0) {
        throw DomainError("IBN row needs a positive expansion");
      }
      const u64 mid = cin * u64(*row.expansion);
      const u64 expand = hi_wi * cin * mid;
      const u64 dw = ho_wo * k2 * mid;
      const u64 project = ho_wo * mid * cout;
      c.macs = expand + dw + project;
      c.params = cin * mid + k2 * mid + mid * cout;
      c.compute_s = double(expand) / dense + double(dw) / depthwise +
                    double(project) / dense;
      break;
    }
    case LayerKind::kFusedIBN: {
      if (!row.expansion || *row.expansion <= 0) {
        throw DomainError("FusedIBN row needs a positive expansion");
      }
      const u64 mid = cin * u64(*row.expansion);
      const u64 fused = ho_wo * k2 * cin * mid;
      const u64 project = ho_wo * mid * cout;
      c.macs = fused + project;
      c.params = k2 * cin * mid + mid * cout;
      c.compute_s = double(fused) / dense + double(project) / dense;
      break;
    }
  }
  c.flops = 2 * c.macs;
  const double weight_s =
      double(c.params) * profile.bytes_per_weight / profile.weight_bytes_per_sec;
  c.latency_s = std::max(c.compute_s, weight_s) + profile.per_layer_overhead_s;
  return c;
}

// Chains layer costs from an RGB input, propagating channels and spatial dims.
inline CostReport architecture_cost(const Architecture& a, Resolution input_hw,
                                    const HardwareProfile& profile) {
  if (input_hw.height <= 0 || input_hw.width <= 0) {
    throw DomainError("input resolution must be positive");
  }
  CostReport report;
  int channels = BackboneSkeleton::kInputChannels;
  Resolution hw = input_hw;
  for (const auto& row : a.rows) {
    LayerCost c = layer_cost(row, channels, hw, profile);
    report.total_macs += c.macs;
    report.total_flops += c.flops;
    report.total_params += c.params;
    report.total_latency_s += c.latency_s;
    channels = c.out_channels;
    hw = c.output_hw;
    report.per_layer.push_back(c);
  }
  return report;
}

// CostReport text format: CSV with header
//   index,macs,flops,params,compute_s,latency_s,out_h,out_w,out_c
// one row per layer, then a final row whose index cell is "total" (the
// compute_s, out_h, out_w and out_c cells of that row are empty).
inline void write_cost_report(std::ostream& os, const CostReport& r) {
  os << "index,macs,flops,params,compute_s,latency_s,out_h,out_w,out_c\n";
  for (std::size_t i = 0; i < r.per_layer.size(); ++i) {
    const auto& c = r.per_layer[i];
    os << i << ',' << c.macs << ',' << c.flops << ',' << c.params << ','
       << format_double(c.compute_s) << ',' << format_double(c.latency_s) << ','
       << c.output_hw.height << ',' << c.output_hw.width << ',' << c.out_channels
       << '\n';
  }
  os << "total," << r.total_macs << ',' << r.total_flops << ',' << r.total_params
     << ",," << format_double(r.total_latency_s) << ",,,\n";
}

inline CostReport read_cost_report(std::istream& is) {
  CostReport r;
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(is, line) ||
      line != "index,macs,flops,params,compute_s,latency_s,out_h,out_w,out_c") {
    throw ParseError("cost report line 1: bad header", 1);
  }
  bool saw_total = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() != 9) throw ParseError("cost report line " + std::to_string(line_no) + ": expected 9 columns", line_no);
    if (cells[0] == "total") {
      r.total_macs = std::uint64_t(parse_int(cells[1], line_no, "macs"));
      r.total_flops = std::uint64_t(parse_int(cells[2], line_no, "flops"));
      r.total_params = std::uint64_t(parse_int(cells[3], line_no, "params"));
      r.total_latency_s = parse_double(cells[5], line_no, "latency_s");
      saw_total = true;
      continue;
    }
    LayerCost c;
    c.macs = std::uint64_t(parse_int(cells[1], line_no, "macs"));
    c.flops = std::uint64_t(parse_int(cells[2], line_no, "flops"));
    c.params = std::uint64_t(parse_int(cells[3], line_no, "params"));
    c.compute_s = parse_double(cells[4], line_no, "compute_s");
    c.latency_s = parse_double(cells[5], line_no, "latency_s");
    c.output_hw.height = int(parse_int(cells[6], line_no, "out_h"));
    c.output_hw.width = int(parse_int(cells[7], line_no, "out_w"));
    c.out_channels = int(parse_int(cells[8], line_no, "out_c"));
    r.per_layer.push_back(c);
  }
  if (!saw_total) throw ParseError("cost report: missing total row", line_no);
  return r;
}

}  // namespace mtnas

#endif  // MTNAS_COST_MODEL_HPP_
