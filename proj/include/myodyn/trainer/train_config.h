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

#ifndef MYODYN_TRAINER_TRAIN_CONFIG_H_
#define MYODYN_TRAINER_TRAIN_CONFIG_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "myodyn/losses/losses.h"
#include "myodyn/network/network.h"

namespace myodyn {

enum class LossMode { kKnowledge, kSupervised };

LossMode ParseLossMode(std::string_view name);
const char* LossModeName(LossMode mode);

struct TrainConfig {
  double lr = 5e-4;
  int batch_size = 64;
  int max_iters = 2000;  // mini-batch steps
  double omega = 100.0;
  double beta = 2.0;
  int window = 25;
  int stride = 2;
  double split = 0.8;
  std::uint64_t seed = 1;
  LossMode loss_mode = LossMode::kKnowledge;
  LossMask enabled_losses;
  int eval_every = 100;  // test-set evaluation period for checkpoint selection
  // network.muscles is taken from the model at training time.
  NetworkConfig network;

  void Validate() const;
  // Canonical YAML rendering; the config hash is taken over this text.
  std::string ToYaml() const;
  std::uint64_t Hash() const;
};

// Missing keys keep their defaults; unknown keys are rejected.
TrainConfig ParseTrainConfig(const std::string& text);
TrainConfig LoadTrainConfig(const std::string& path);

// Applies MYODYN_SEED from the environment when set. Returns true if applied.
bool ApplySeedOverride(TrainConfig& config);

}  // namespace myodyn

#endif  // MYODYN_TRAINER_TRAIN_CONFIG_H_
