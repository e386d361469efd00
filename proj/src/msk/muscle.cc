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

#include "myodyn/msk/muscle.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "myodyn/error.h"

namespace myodyn {
namespace {

// Curve constants.
constexpr double kActiveWidth = 0.45;     // Gaussian width of f_a
constexpr double kHillShortening = 0.25;  // concentric curvature of f_v
constexpr double kEccentricPlateau = 1.4;
constexpr double kEccentricShape = 0.0375;
constexpr double kPassiveShape = 5.0;
constexpr double kPassiveStrain = 0.6;

void CheckAngle(const MusclePath& path, double q) {
  if (!std::isfinite(q) || q < path.q_min || q > path.q_max) {
    std::ostringstream os;
    os << "joint angle " << q << " rad outside declared range [" << path.q_min
       << ", " << path.q_max << "]";
    Fail(ErrorKind::kRange, os.str());
  }
}

}  // namespace

void MuscleParams::Validate() const {
  auto bad = [&](const std::string& what) {
    Fail(ErrorKind::kConfig, "muscle '" + name + "': " + what);
  };
  if (!(f_o > 0.0)) bad("f_o must be > 0");
  if (!(l_o > 0.0)) bad("l_o must be > 0");
  if (!(phi_o >= 0.0 && phi_o < std::numbers::pi / 2)) {
    bad("phi_o must lie in [0, pi/2)");
  }
  if (!(l_ts >= 0.0)) bad("l_ts must be >= 0");
  if (!(v_o > 0.0)) bad("v_o must be > 0");
  if (path.coeffs.empty() || path.coeffs.size() > 6) {
    bad("path needs 1 to 6 polynomial coefficients");
  }
  if (!(path.q_min < path.q_max)) bad("empty path angle range");
  constexpr int kSamples = 200;
  for (int i = 0; i <= kSamples; ++i) {
    const double q =
        path.q_min + (path.q_max - path.q_min) * i / static_cast<double>(kSamples);
    const double l_mt = MusculotendonLength(path, q);
    if (!(l_mt > l_ts)) {
      std::ostringstream os;
      os << "muscle '" << name << "': musculotendon length " << l_mt
         << " m does not exceed tendon slack length " << l_ts << " m at q="
         << q;
      Fail(ErrorKind::kGeometry, os.str());
    }
  }
}

double MusculotendonLength(const MusclePath& path, double q) {
  CheckAngle(path, q);
  double acc = 0.0;
  for (auto it = path.coeffs.rbegin(); it != path.coeffs.rend(); ++it) {
    acc = acc * q + *it;
  }
  return acc;
}

double MomentArm(const MusclePath& path, double q) {
  CheckAngle(path, q);
  double acc = 0.0;
  for (std::size_t k = path.coeffs.size(); k-- > 1;) {
    acc = acc * q + static_cast<double>(k) * path.coeffs[k];
  }
  return -acc;
}

MuscleState ResolveFiber(const MuscleParams& params, double l_mt) {
  const double along = l_mt - params.l_ts;
  if (!(along > 0.0)) {
    std::ostringstream os;
    os << "muscle '" << params.name << "': musculotendon length " << l_mt
       << " m leaves no fiber beyond tendon slack length " << params.l_ts
       << " m";
    Fail(ErrorKind::kGeometry, os.str());
  }
  const double height = params.l_o * std::sin(params.phi_o);
  MuscleState s;
  s.l_mt = l_mt;
  s.l_m = std::sqrt(along * along + height * height);
  s.phi = std::asin(height / s.l_m);
  s.l_norm = s.l_m / params.l_o;
  return s;
}

double FiberVelocity(const MuscleParams& params, const MuscleState& state,
                     double q, double qdot) {
  const double mt_rate = -MomentArm(params.path, q) * qdot;
  const double fiber_rate = (state.l_mt - params.l_ts) * mt_rate / state.l_m;
  const double v = fiber_rate / (params.v_o * params.l_o);
  return std::clamp(v, -kMaxNormalizedVelocity, kMaxNormalizedVelocity);
}

MuscleState ResolveState(const MuscleParams& params, double q, double qdot) {
  MuscleState s = ResolveFiber(params, MusculotendonLength(params.path, q));
  s.v_norm = FiberVelocity(params, s, q, qdot);
  return s;
}

double ActiveForceLength(double l_norm) {
  const double d = l_norm - 1.0;
  return std::exp(-d * d / kActiveWidth);
}

double ActiveForceLengthDerivative(double l_norm) {
  return ActiveForceLength(l_norm) * (-2.0 * (l_norm - 1.0) / kActiveWidth);
}

double ForceVelocity(double v_norm) {
  if (v_norm < -1.0) return 0.0;
  if (v_norm < 0.0) return (1.0 + v_norm) / (1.0 - v_norm / kHillShortening);
  return (kEccentricPlateau * v_norm + kEccentricShape) /
         (v_norm + kEccentricShape);
}

double ForceVelocityDerivative(double v_norm) {
  if (v_norm < -1.0) return 0.0;
  if (v_norm < 0.0) {
    const double den = 1.0 - v_norm / kHillShortening;
    return (den + (1.0 + v_norm) / kHillShortening) / (den * den);
  }
  const double den = v_norm + kEccentricShape;
  return (kEccentricPlateau - 1.0) * kEccentricShape / (den * den);
}

double PassiveForceLength(double l_norm) {
  if (l_norm <= 1.0) return 0.0;
  return (std::exp(kPassiveShape * (l_norm - 1.0) / kPassiveStrain) - 1.0) /
         (std::exp(kPassiveShape) - 1.0);
}

double PassiveForceLengthDerivative(double l_norm) {
  if (l_norm <= 1.0) return 0.0;
  const double k = kPassiveShape / kPassiveStrain;
  return k * std::exp(k * (l_norm - 1.0)) / (std::exp(kPassiveShape) - 1.0);
}

double TendonForce(const MuscleParams& params, const MuscleState& state,
                   double activation) {
  const HillCoefficients h = HillDecomposition(params, state);
  return h.active * activation + h.passive;
}

TendonForcePartials TendonForceGradient(const MuscleParams& params,
                                        const MuscleState& state,
                                        double activation) {
  const double fa = ActiveForceLength(state.l_norm);
  const double fv = ForceVelocity(state.v_norm);
  const double fp = PassiveForceLength(state.l_norm);
  const double c = std::cos(state.phi);
  TendonForcePartials g;
  g.activation = params.f_o * fv * fa * c;
  g.l_norm = params.f_o *
             (activation * fv * ActiveForceLengthDerivative(state.l_norm) +
              PassiveForceLengthDerivative(state.l_norm)) *
             c;
  g.v_norm =
      params.f_o * activation * ForceVelocityDerivative(state.v_norm) * fa * c;
  g.phi = -params.f_o * (activation * fv * fa + fp) * std::sin(state.phi);
  return g;
}

HillCoefficients HillDecomposition(const MuscleParams& params,
                                   const MuscleState& state) {
  const double c = std::cos(state.phi);
  return {params.f_o * ForceVelocity(state.v_norm) *
              ActiveForceLength(state.l_norm) * c,
          params.f_o * PassiveForceLength(state.l_norm) * c};
}

double JointTorque(std::span<const double> forces,
                   std::span<const double> arms) {
  if (forces.size() != arms.size()) {
    std::ostringstream os;
    os << "joint torque: " << forces.size() << " forces vs " << arms.size()
       << " moment arms";
    Fail(ErrorKind::kDimension, os.str());
  }
  double tau = 0.0;
  for (std::size_t n = 0; n < forces.size(); ++n) tau += forces[n] * arms[n];
  return tau;
}

}  // namespace myodyn
