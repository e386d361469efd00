// Copyright 2026 The MyoDyn Authors
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

#ifndef MYODYN_HARNESS_EVALUATE_H_
#define MYODYN_HARNESS_EVALUATE_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "myodyn/network/checkpoint.h"
#include "myodyn/trainer/dataset.h"
#include "myodyn/trainer/windows.h"

namespace myodyn {

// Network outputs on a set of windows. Overlapping predictions of the same
// sample are averaged.
struct PredictionSet {
  std::vector<std::string> muscles;
  // Per trajectory, L x N; only rows with count > 0 are meaningful.
  std::vector<Eigen::MatrixXd> a;
  std::vector<Eigen::MatrixXd> forces;
  std::vector<std::vector<int>> count;
  // Every per-window activation output before averaging, (windows*T) x N.
  Eigen::MatrixXd raw_activations;

  std::size_t CoveredSamples() const;
};

PredictionSet PredictWindows(const Checkpoint& ckpt, const PreparedData& data,
                             std::span<const WindowRef> windows,
                             int batch_size = 128);

struct MuscleMetrics {
  std::string name;
  double rmse_a = 0.0;
  double rmse_f = 0.0;
  double r2_a = 0.0;  // NaN when undefined
  double r2_f = 0.0;
};

struct MetricsReport {
  std::vector<MuscleMetrics> muscles;
  // Means over muscles; undefined R^2 entries are left out.
  double rmse_a = 0.0;
  double rmse_f = 0.0;
  double r2_a = 0.0;
  double r2_f = 0.0;
  std::size_t samples = 0;
  std::size_t windows = 0;
  // Single-window inference wall clock; zero when not measured.
  double latency_median_ms = 0.0;
  double latency_p95_ms = 0.0;
  std::size_t latency_runs = 0;
  std::vector<std::string> diagnostics;
};

// Metrics of averaged predictions against the labels of `data`, over every
// covered sample.
MetricsReport ComputeMetrics(const PredictionSet& predictions,
                             const PreparedData& data);

struct LatencyStats {
  double median_ms = 0.0;
  double p95_ms = 0.0;
  std::size_t runs = 0;
};

// Times `runs` single-window forward passes, cycling through `windows`.
LatencyStats MeasureLatency(const Checkpoint& ckpt, const PreparedData& data,
                            std::span<const WindowRef> windows,
                            std::size_t runs = 1000);

struct EvalOptions {
  bool measure_latency = true;
  std::size_t latency_runs = 1000;
};

MetricsReport Evaluate(const Checkpoint& ckpt, const PreparedData& data,
                       std::span<const WindowRef> windows,
                       const EvalOptions& options = {},
                       PredictionSet* predictions = nullptr);

// Long format: metric,muscle,value. Muscle "mean" holds the averages.
void WriteMetricsCsv(const std::string& path, const MetricsReport& report);
std::string FormatMetricsTable(const MetricsReport& report);

// One row per covered sample: trajectory_id,sample,time_s,a_hat_<m>...,
// F_hat_<m>_N...
void WritePredictionsCsv(const std::string& path, const PredictionSet& predictions,
                         const PreparedData& data);

}  // namespace myodyn

#endif  // MYODYN_HARNESS_EVALUATE_H_
