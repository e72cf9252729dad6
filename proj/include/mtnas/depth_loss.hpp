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

// Joint absolute-relative depth loss
//
//   L = mean|y - y_hat| + lambda * mean|(y - y_hat) / y|
//
// with its subgradient, and a seeded toy regression that compares plain L1
// training against the joint loss across repeated runs.

#ifndef MTNAS_DEPTH_LOSS_HPP_
#define MTNAS_DEPTH_LOSS_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mtnas/errors.hpp"
#include "mtnas/text_io.hpp"

namespace mtnas {

namespace detail {
inline void check_depth_batch(std::span<const double> targets,
                              std::span<const double> predictions, double lambda) {
  if (targets.empty()) throw DomainError("depth batch is empty");
  if (targets.size() != predictions.size()) {
    throw DomainError("depth batch: targets and predictions differ in length");
  }
  if (!(lambda >= 0) || std::isinf(lambda)) throw DomainError("lambda must be finite and >= 0");
  for (double y : targets) {
    if (!(y > 0) || std::isinf(y)) throw DomainError("depth targets must be finite and > 0");
  }
}
}  // namespace detail

// Loss-weight pair (absolute weight, relative weight) to the single lambda of
// the unit-absolute-weight form: lambda = relative / absolute. The weighted
// loss equals absolute_weight * jared_loss(..., lambda).
inline double lambda_from_weights(double absolute_weight, double relative_weight) {
  if (!(absolute_weight > 0)) throw DomainError("absolute loss weight must be > 0");
  if (!(relative_weight >= 0)) throw DomainError("relative loss weight must be >= 0");
  return relative_weight / absolute_weight;
}

struct JaredTerms {
  double absolute = 0;  // mean |y - y_hat|
  double relative = 0;  // mean |y - y_hat| / y
};

inline JaredTerms jared_terms(std::span<const double> targets,
                              std::span<const double> predictions) {
  detail::check_depth_batch(targets, predictions, 0.0);
  double abs_sum = 0;
  double rel_sum = 0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double err = std::abs(targets[i] - predictions[i]);
    abs_sum += err;
    rel_sum += err / targets[i];
  }
  const double n = double(targets.size());
  return {abs_sum / n, rel_sum / n};
}

inline double jared_loss(std::span<const double> targets, std::span<const double> predictions,
                         double lambda) {
  detail::check_depth_batch(targets, predictions, lambda);
  const JaredTerms t = jared_terms(targets, predictions);
  return t.absolute + lambda * t.relative;
}

// dL/dy_hat_i = sign(y_hat_i - y_i) * (1 + lambda / y_i) / N, and 0 where
// y_hat_i == y_i.
inline std::vector<double> jared_grad(std::span<const double> targets,
                                      std::span<const double> predictions, double lambda) {
  detail::check_depth_batch(targets, predictions, lambda);
  const double n = double(targets.size());
  std::vector<double> g(targets.size(), 0.0);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double d = predictions[i] - targets[i];
    if (d == 0) continue;
    const double sign = d > 0 ? 1.0 : -1.0;
    g[i] = sign * (1.0 + lambda / targets[i]) / n;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Toy monocular-depth regression.
//
// Depths are log-uniform over [depth_min, depth_max]. Each sample exposes two
// cues with multiplicative log-normal noise (standing in for scale
// ambiguity): a linear cue y / depth_max and a square-root cue
// sqrt(y / depth_max). The predictor is linear in [1, cue1, cue2] and is
// trained with fixed-step full-batch subgradient descent.

struct ToyScenario {
  std::size_t train_size = 256;
  std::size_t test_size = 2048;
  double depth_min = 0.005;
  double depth_max = 0.5;
  double cue_noise = 0.2;
  std::size_t iterations = 5000;
  double step = 0.001;
  double init_scale = 0.01;

  void validate() const {
    if (train_size == 0 || test_size == 0) throw ConfigError("scenario", "set sizes must be > 0");
    if (!(depth_min > 0 && depth_max > depth_min)) throw ConfigError("scenario.depth", "need 0 < depth_min < depth_max");
    if (!(cue_noise >= 0)) throw ConfigError("scenario.cue_noise", "must be >= 0");
    if (!(step > 0)) throw ConfigError("scenario.step", "must be > 0");
    if (!(init_scale >= 0)) throw ConfigError("scenario.init_scale", "must be >= 0");
  }
};

struct ToyRun {
  std::uint64_t seed = 0;
  double abs_err = 0;
  double rel_err = 0;
  bool diverged = false;
};

struct ToySummary {
  double abs_mean = 0;
  double abs_std_pct = 0;  // sample std as a percentage of the mean
  double rel_mean = 0;
  double rel_std_pct = 0;
  std::size_t runs_used = 0;
};

struct ToyResult {
  double lambda = 0;
  std::vector<ToyRun> runs;
  ToySummary summary;
};

namespace detail {
struct ToySet {
  std::vector<std::array<double, 3>> features;
  std::vector<double> depth;
};

template <class Rng>
ToySet make_toy_set(std::size_t n, const ToyScenario& sc, Rng& rng) {
  std::uniform_real_distribution<double> log_depth(std::log(sc.depth_min), std::log(sc.depth_max));
  std::normal_distribution<double> noise(0.0, 1.0);
  ToySet s;
  s.features.reserve(n);
  s.depth.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = std::exp(log_depth(rng));
    const double c1 = y / sc.depth_max * std::exp(sc.cue_noise * noise(rng));
    const double c2 = std::sqrt(y / sc.depth_max) * std::exp(sc.cue_noise * noise(rng));
    s.features.push_back({1.0, c1, c2});
    s.depth.push_back(y);
  }
  return s;
}

inline void predict(const ToySet& s, const std::array<double, 3>& w, std::vector<double>& out) {
  out.resize(s.depth.size());
  for (std::size_t i = 0; i < s.depth.size(); ++i) {
    const auto& x = s.features[i];
    out[i] = w[0] * x[0] + w[1] * x[1] + w[2] * x[2];
  }
}
}  // namespace detail

inline ToyRun toy_depth_run(std::uint64_t seed, double lambda, const ToyScenario& sc) {
  sc.validate();
  std::mt19937_64 rng(seed);
  const auto train = detail::make_toy_set(sc.train_size, sc, rng);
  const auto test = detail::make_toy_set(sc.test_size, sc, rng);
  std::normal_distribution<double> init(0.0, sc.init_scale);
  std::array<double, 3> w = {init(rng), init(rng), init(rng)};

  ToyRun r;
  r.seed = seed;
  std::vector<double> pred;
  for (std::size_t it = 0; it < sc.iterations; ++it) {
    detail::predict(train, w, pred);
    const auto g = jared_grad(train.depth, pred, lambda);
    std::array<double, 3> dw{};
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t k = 0; k < 3; ++k) dw[k] += g[i] * train.features[i][k];
    }
    for (std::size_t k = 0; k < 3; ++k) w[k] -= sc.step * dw[k];
    if (!std::isfinite(w[0]) || !std::isfinite(w[1]) || !std::isfinite(w[2])) {
      r.diverged = true;
      break;
    }
  }
  if (!r.diverged) {
    detail::predict(test, w, pred);
    const JaredTerms t = jared_terms(test.depth, pred);
    r.abs_err = t.absolute;
    r.rel_err = t.relative;
    r.diverged = !std::isfinite(r.abs_err) || !std::isfinite(r.rel_err);
  }
  return r;
}

inline ToySummary summarize_runs(std::span<const ToyRun> runs) {
  std::vector<double> a;
  std::vector<double> rl;
  for (const auto& r : runs) {
    if (r.diverged) continue;
    a.push_back(r.abs_err);
    rl.push_back(r.rel_err);
  }
  ToySummary s;
  s.runs_used = a.size();
  auto mean_std_pct = [](const std::vector<double>& v, double& mean, double& std_pct) {
    mean = 0;
    std_pct = 0;
    if (v.empty()) return;
    for (double x : v) mean += x;
    mean /= double(v.size());
    if (v.size() < 2 || mean == 0) return;
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    std_pct = std::sqrt(ss / double(v.size() - 1)) / mean * 100.0;
  };
  mean_std_pct(a, s.abs_mean, s.abs_std_pct);
  mean_std_pct(rl, s.rel_mean, s.rel_std_pct);
  return s;
}

// lambda = 0 is plain L1 training.
inline ToyResult toy_depth_experiment(std::span<const std::uint64_t> seeds, double lambda,
                                      const ToyScenario& sc = {}) {
  if (seeds.empty()) throw DomainError("toy_depth_experiment: no seeds");
  ToyResult out;
  out.lambda = lambda;
  for (std::uint64_t s : seeds) out.runs.push_back(toy_depth_run(s, lambda, sc));
  out.summary = summarize_runs(out.runs);
  return out;
}

// Summary CSV: loss,lambda,abs_err,abs_std_pct,rel_err,rel_std_pct,runs_used
inline void write_toy_summary_header(std::ostream& os) {
  os << "loss,lambda,abs_err,abs_std_pct,rel_err,rel_std_pct,runs_used\n";
}

inline void write_toy_summary_row(std::ostream& os, const std::string& label, const ToyResult& r) {
  os << label << ',' << format_double(r.lambda) << ',' << format_double(r.summary.abs_mean) << ','
     << format_double(r.summary.abs_std_pct) << ',' << format_double(r.summary.rel_mean) << ','
     << format_double(r.summary.rel_std_pct) << ',' << r.summary.runs_used << '\n';
}

}  // namespace mtnas

#endif  // MTNAS_DEPTH_LOSS_HPP_
