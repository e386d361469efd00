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

#include "myodyn/msk/joint.h"

#include <cmath>

#include "myodyn/error.h"

namespace myodyn {

void JointModel::Validate() const {
  auto bad = [&](const std::string& what) {
    Fail(ErrorKind::kConfig, "joint '" + name + "': " + what);
  };
  if (!(inertia > 0.0)) bad("inertia must be > 0");
  if (!(mass >= 0.0)) bad("mass must be >= 0");
  if (!(com_dist >= 0.0)) bad("com_dist must be >= 0");
  if (gravity_sign != 1.0 && gravity_sign != -1.0) {
    bad("gravity_sign must be +1 or -1");
  }
  if (!(damping >= 0.0)) bad("damping must be >= 0");
  if (!(q_min < q_max)) bad("empty angle range");
}

double GravityTorque(const JointModel& joint, double q) {
  return joint.mass * kGravity * joint.com_dist * std::sin(q) *
         joint.gravity_sign;
}

double InverseDynamicsTorque(const JointModel& joint, double q, double qdot,
                             double qddot) {
  return joint.inertia * qddot + joint.damping * qdot + GravityTorque(joint, q);
}

double PotentialEnergy(const JointModel& joint, double q) {
  return -joint.mass * kGravity * joint.com_dist * std::cos(q) *
         joint.gravity_sign;
}

}  // namespace myodyn
