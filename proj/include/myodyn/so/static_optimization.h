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

#ifndef MYODYN_SO_STATIC_OPTIMIZATION_H_
#define MYODYN_SO_STATIC_OPTIMIZATION_H_

#include <string>
#include <vector>

#include "myodyn/harness/kinematics.h"
#include "myodyn/msk/model.h"

// Per-timestep static optimization: minimize sum(a^2) subject to the joint
// torque equality and activation bounds. Tendon force is affine in
// activation, F_n = c_n a_n + d_n, so each step is a separable QP with a
// single linear equality.

namespace myodyn {

inline constexpr double kMinActivation = 0.01;
inline constexpr double kMaxActivation = 1.0;

struct SoProblem {
  std::vector<double> c;  // dF/da per muscle, N
  std::vector<double> d;  // passive force per muscle, N
  std::vector<double> r;  // moment arms, m
  double tau_req = 0.0;   // N m
  double lower = kMinActivation;
  double upper = kMaxActivation;

  std::size_t size() const { return c.size(); }
};

enum class SoStatus { kOptimal, kClamped, kInfeasible };

const char* SoStatusName(SoStatus status);

struct SoSolution {
  std::vector<double> a;
  std::vector<double> forces;   // c * a + d
  double torque_residual = 0.0; // tau_req - sum(forces * r), N m
  // Largest violation of stationarity / multiplier sign conditions. Zero for
  // infeasible steps, where the multiplier is undefined.
  double kkt_residual = 0.0;
  double lambda = 0.0;          // torque-equality multiplier
  SoStatus status = SoStatus::kOptimal;
};

SoProblem BuildProblem(const MusculoskeletalModel& model, double q,
                       double qdot, double qddot);

SoSolution SolveTimestep(const SoProblem& problem);

struct SoTrajectory {
  std::vector<SoSolution> steps;
  std::size_t infeasible = 0;
};

// Independent per-step solves over one trajectory, in time order.
SoTrajectory SolveTrajectory(const MusculoskeletalModel& model,
                             const KinematicSeries& series);

}  // namespace myodyn

#endif  // MYODYN_SO_STATIC_OPTIMIZATION_H_
