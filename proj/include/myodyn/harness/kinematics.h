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

#ifndef MYODYN_HARNESS_KINEMATICS_H_
#define MYODYN_HARNESS_KINEMATICS_H_

#include <cstddef>
#include <vector>

namespace myodyn {

// One uniformly sampled joint trajectory.
struct KinematicSeries {
  int trajectory_id = 0;
  double rate_hz = 250.0;
  std::vector<double> time;   // s
  std::vector<double> q;      // rad
  std::vector<double> qdot;   // rad/s
  std::vector<double> qddot;  // rad/s^2

  std::size_t size() const { return q.size(); }
  // Throws kDimension on unequal lengths and kContract on non-uniform time.
  void Validate() const;
};

// Trajectories of one experiment, in trajectory-id order.
using KinematicDataset = std::vector<KinematicSeries>;

}  // namespace myodyn

#endif  // MYODYN_HARNESS_KINEMATICS_H_
