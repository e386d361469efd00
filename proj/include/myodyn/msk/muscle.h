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

#ifndef MYODYN_MSK_MUSCLE_H_
#define MYODYN_MSK_MUSCLE_H_

#include <span>
#include <string>
#include <vector>

// Hill-type musculotendon mechanics under a rigid-tendon assumption. Units
// are N, m, rad and s throughout.

namespace myodyn {

// Musculotendon length as a polynomial in joint angle. The moment arm is the
// negated analytic derivative; it is never stored separately.
struct MusclePath {
  std::vector<double> coeffs;  // c_0 .. c_d, d <= 5
  double q_min = -3.14159;     // declared joint range, rad
  double q_max = 3.14159;
};

struct MuscleParams {
  std::string name;
  double f_o = 0.0;    // max isometric force, N
  double l_o = 0.0;    // optimal fiber length, m
  double phi_o = 0.0;  // pennation at optimal fiber length, rad
  double l_ts = 0.0;   // tendon slack length, m
  double v_o = 10.0;   // max contraction velocity, optimal lengths per second
  MusclePath path;

  // Throws kConfig on violated parameter bounds and kGeometry when the path
  // drops to or below tendon slack length inside the declared range.
  void Validate() const;
};

struct MuscleState {
  double l_mt = 0.0;    // musculotendon length, m
  double l_m = 0.0;     // fiber length, m
  double phi = 0.0;     // pennation, rad
  double l_norm = 0.0;  // l_m / l_o
  double v_norm = 0.0;  // fiber velocity / (v_o * l_o), in [-1.5, 1.5]
};

inline constexpr double kMaxNormalizedVelocity = 1.5;

double MusculotendonLength(const MusclePath& path, double q);
// r(q) = -d l_mt / dq. Positive arms produce positive joint torque.
double MomentArm(const MusclePath& path, double q);

// Fiber length and pennation from musculotendon length, holding the fiber's
// perpendicular height l_o * sin(phi_o) constant.
MuscleState ResolveFiber(const MuscleParams& params, double l_mt);
// Normalized fiber velocity for the resolved `state` at (q, qdot), clamped to
// [-1.5, 1.5].
double FiberVelocity(const MuscleParams& params, const MuscleState& state,
                     double q, double qdot);
// ResolveFiber at l_mt(q) followed by FiberVelocity.
MuscleState ResolveState(const MuscleParams& params, double q, double qdot);

// Normalized force-length-velocity characteristics.
double ActiveForceLength(double l_norm);
double ForceVelocity(double v_norm);
double PassiveForceLength(double l_norm);
double ActiveForceLengthDerivative(double l_norm);
double ForceVelocityDerivative(double v_norm);
double PassiveForceLengthDerivative(double l_norm);

// F = f_o * (a * f_v * f_a + f_p) * cos(phi)
double TendonForce(const MuscleParams& params, const MuscleState& state,
                   double activation);

struct TendonForcePartials {
  double activation = 0.0;
  double l_norm = 0.0;
  double v_norm = 0.0;
  double phi = 0.0;
};
TendonForcePartials TendonForceGradient(const MuscleParams& params,
                                        const MuscleState& state,
                                        double activation);

// Tendon force is affine in activation: F = active * a + passive.
struct HillCoefficients {
  double active = 0.0;   // f_o * f_v * f_a * cos(phi), N
  double passive = 0.0;  // f_o * f_p * cos(phi), N
};
HillCoefficients HillDecomposition(const MuscleParams& params,
                                   const MuscleState& state);

// sum_n forces[n] * arms[n]
double JointTorque(std::span<const double> forces, std::span<const double> arms);

}  // namespace myodyn

#endif  // MYODYN_MSK_MUSCLE_H_
