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

#ifndef MYODYN_NETWORK_CHECKPOINT_H_
#define MYODYN_NETWORK_CHECKPOINT_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "myodyn/network/network.h"

namespace myodyn {

// Per-channel z-scoring of (q, qdot, qddot), fitted on training samples.
struct InputNormalization {
  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(3);
  Eigen::RowVectorXd stddev = Eigen::RowVectorXd::Ones(3);

  Eigen::MatrixXd Apply(const Eigen::MatrixXd& raw) const;
};

struct Checkpoint {
  NetworkParams params;
  InputNormalization normalization;
  std::vector<std::string> muscle_names;
  int window = 25;
  // Windowing the model was trained with; evaluation recomputes the same
  // test split from these.
  int stride = 2;
  double split = 0.8;
  std::uint64_t config_hash = 0;
  int iteration = 0;  // training step the parameters were taken at
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Binary container: "MYODYNCK", version, metadata, then every tensor with its
// name and shape. Little-endian doubles.
std::string SerializeCheckpoint(const Checkpoint& ckpt);
Checkpoint DeserializeCheckpoint(const std::string& bytes);
void SaveCheckpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint LoadCheckpoint(const std::string& path);

}  // namespace myodyn

#endif  // MYODYN_NETWORK_CHECKPOINT_H_
