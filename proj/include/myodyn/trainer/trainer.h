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

#ifndef MYODYN_TRAINER_TRAINER_H_
#define MYODYN_TRAINER_TRAINER_H_

#include <functional>
#include <string>
#include <vector>

#include "myodyn/losses/losses.h"
#include "myodyn/network/checkpoint.h"
#include "myodyn/trainer/dataset.h"
#include "myodyn/trainer/train_config.h"
#include "myodyn/trainer/windows.h"

namespace myodyn {

// One optimizer step. `objective` is the quantity that was minimized: the
// knowledge loss total, or mse_a + mse_f in supervised mode (knowledge terms
// are still reported).
struct LossRecord {
  int iteration = 0;
  LossBreakdown knowledge;
  double objective = 0.0;
};

struct EvalRecord {
  int iteration = 0;
  double r2_a = 0.0;
  double r2_f = 0.0;
  double rmse_a = 0.0;
  double rmse_f = 0.0;
};

struct TrainResult {
  // Best parameters by test R^2(F) when labels are available, else the last.
  Checkpoint checkpoint;
  std::vector<LossRecord> trace;
  std::vector<EvalRecord> evals;
  WindowSplit split;
  bool diverged = false;
  std::string message;  // divergence diagnostic
};

// Called after every step; returning false stops training early.
using TrainCallback = std::function<bool(const LossRecord&)>;

// Deterministic given (config, data): initialization, shuffling and dropout
// all derive from config.seed.
TrainResult Train(const TrainConfig& config, const PreparedData& data,
                  const TrainCallback& callback = nullptr);

// iteration,l_m,l_f,l_p,l_b,total,objective
void WriteLossTraceCsv(const std::string& path,
                       const std::vector<LossRecord>& trace);
void WriteEvalTraceCsv(const std::string& path,
                       const std::vector<EvalRecord>& evals);

}  // namespace myodyn

#endif  // MYODYN_TRAINER_TRAINER_H_
