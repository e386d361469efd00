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

#ifndef MYODYN_TRAINER_DATASET_H_
#define MYODYN_TRAINER_DATASET_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "myodyn/harness/io.h"
#include "myodyn/harness/kinematics.h"
#include "myodyn/losses/losses.h"
#include "myodyn/msk/model.h"
#include "myodyn/network/checkpoint.h"
#include "myodyn/trainer/windows.h"

namespace myodyn {

// Per-sample network inputs and physics constants of one trajectory.
struct PreparedTrajectory {
  int trajectory_id = 0;
  std::vector<double> time;
  Eigen::MatrixXd inputs;   // L x 3: q, qdot, qddot (unnormalized)
  Eigen::MatrixXd c, d, r;  // L x N
  Eigen::VectorXd tau_req;  // L
  Eigen::MatrixXd label_a;  // L x N, empty without labels
  Eigen::MatrixXd label_f;  // L x N, empty without labels

  std::size_t size() const { return static_cast<std::size_t>(inputs.rows()); }
};

struct PreparedData {
  std::vector<std::string> muscles;
  Eigen::RowVectorXd f_o;  // max isometric force per muscle
  std::vector<PreparedTrajectory> trajectories;
  bool has_labels = false;

  std::vector<std::size_t> Lengths() const;
};

// Evaluates the musculoskeletal model at every sample. `labels`, when given,
// must align with `data`.
PreparedData PrepareData(const MusculoskeletalModel& model,
                         const KinematicDataset& data,
                         const LabelSet* labels = nullptr);

// Mean and standard deviation of each input channel over the distinct samples
// covered by `windows`.
InputNormalization FitNormalization(const PreparedData& data,
                                    std::span<const WindowRef> windows,
                                    int window);

// Time-major stack of windows: row t * B + b is step t of window b.
struct Batch {
  int steps = 0;
  int size = 0;
  Eigen::MatrixXd inputs;  // normalized
  PhysicsBatch physics;
  Eigen::MatrixXd label_a;  // empty without labels
  Eigen::MatrixXd label_f;
};

Batch AssembleBatch(const PreparedData& data, std::span<const WindowRef> windows,
                    int window, const InputNormalization& normalization);

}  // namespace myodyn

#endif  // MYODYN_TRAINER_DATASET_H_
