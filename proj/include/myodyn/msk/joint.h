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

#ifndef MYODYN_MSK_JOINT_H_
#define MYODYN_MSK_JOINT_H_

#include <string>

namespace myodyn {

inline constexpr double kGravity = 9.81;

// Single-DOF hinge with constant inertia. Such a joint has no Coriolis or
// centrifugal term; C(q, qdot) reduces to viscous damping.
struct JointModel {
  std::string name;
  double inertia = 0.0;       // kg m^2
  double mass = 0.0;          // kg
  double com_dist = 0.0;      // pivot to segment center of mass, m
  double gravity_sign = 1.0;  // +1 or -1
  double damping = 0.0;       // N m s / rad
  double q_min = -3.14159;    // rad
  double q_max = 3.14159;

  void Validate() const;
};

// mass * g * com_dist * sin(q) * gravity_sign
double GravityTorque(const JointModel& joint, double q);

// inertia * qddot + damping * qdot + G(q)
double InverseDynamicsTorque(const JointModel& joint, double q, double qdot,
                             double qddot);

// Potential energy whose derivative in q is GravityTorque.
double PotentialEnergy(const JointModel& joint, double q);

}  // namespace myodyn

#endif  // MYODYN_MSK_JOINT_H_
