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

#ifndef MYODYN_HARNESS_TRAJECTORY_H_
#define MYODYN_HARNESS_TRAJECTORY_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "myodyn/harness/kinematics.h"

namespace myodyn {

enum class Protocol { kKnee, kElbow };

Protocol ParseProtocol(std::string_view name);
const char* ProtocolName(Protocol protocol);

struct TrajectoryOptions {
  Protocol protocol = Protocol::kKnee;
  int trials = 4;
  double duration_s = 12.0;
  double rate_hz = 250.0;
  std::uint64_t seed = 1;
  // RMS of the smooth perturbation added to each trial, degrees.
  double noise_rms_deg = 0.5;
};

// Noise-free protocol angle at time t for a trial cycling at `frequency_hz`.
// Knee: (pi/4)(1 - cos(2 pi f t)), reaching pi/2 at t = 1/(2f).
// Elbow: 0.2 + 1.1 (1 - cos(2 pi f t)).
double ProtocolAngle(Protocol protocol, double frequency_hz, double t);

// Per-trial cycle frequency range, Hz.
std::pair<double, double> ProtocolFrequencyRange(Protocol protocol);

// Seeded synthetic flexion/extension trials, differentiated to qdot/qddot.
KinematicDataset GenerateTrajectories(const TrajectoryOptions& options);

struct Derivatives {
  std::vector<double> qdot;
  std::vector<double> qddot;
};

// Centered 5-point moving average; the window shrinks symmetrically near the
// ends.
std::vector<double> SmoothMovingAverage(std::span<const double> q);

// Smooths q, then takes central differences (second-order one-sided at the
// ends). Requires at least 5 samples.
Derivatives Differentiate(std::span<const double> q, double rate_hz);

}  // namespace myodyn

#endif  // MYODYN_HARNESS_TRAJECTORY_H_
