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

#ifndef MYODYN_HARNESS_EXPERIMENTS_H_
#define MYODYN_HARNESS_EXPERIMENTS_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "myodyn/harness/evaluate.h"
#include "myodyn/trainer/dataset.h"
#include "myodyn/trainer/train_config.h"

namespace myodyn {

struct ExperimentResult {
  std::string label;
  TrainConfig config;
  bool ok = false;
  std::string error;  // set when !ok
  bool diverged = false;
  int checkpoint_iteration = 0;
  MetricsReport metrics;  // test split, selected checkpoint
};

// Trains one configuration and evaluates it on its test split. Errors are
// captured in the result rather than thrown.
ExperimentResult RunExperiment(const std::string& label, const TrainConfig& config,
                               const PreparedData& data);

using ExperimentRunner = std::function<ExperimentResult(
    const std::string& label, const TrainConfig& config)>;

// Leave-one-out over the four knowledge terms plus the full objective, in
// the order: no_b, no_p, no_f, no_m, full.
std::vector<ExperimentResult> RunAblation(const TrainConfig& base,
                                          const ExperimentRunner& run);
std::vector<ExperimentResult> RunAblation(const TrainConfig& base,
                                          const PreparedData& data);

// One training per omega; a failing cell is recorded and the sweep goes on.
std::vector<ExperimentResult> SweepOmega(const TrainConfig& base,
                                         std::span<const double> grid,
                                         const ExperimentRunner& run);
std::vector<ExperimentResult> SweepOmega(const TrainConfig& base,
                                         const PreparedData& data,
                                         std::span<const double> grid);

// label,enabled_losses,loss_mode,omega,r2_a,r2_F,rmse_a,rmse_F_N,
// checkpoint_iteration,status
void WriteExperimentsCsv(const std::string& path,
                         const std::vector<ExperimentResult>& results);
std::string FormatExperimentsTable(const std::vector<ExperimentResult>& results);

}  // namespace myodyn

#endif  // MYODYN_HARNESS_EXPERIMENTS_H_
