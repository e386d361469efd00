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


#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "myodyn/msk/joint.h"
#include "myodyn/msk/model.h"
#include "myodyn/msk/muscle.h"
#include "test_util.h"

namespace myodyn {
namespace {

// Independent re-statements of the muscle curves.
double RefFa(double l) { return std::exp(-(l - 1) * (l - 1) / 0.45); }
double RefFv(double v) {
  if (v < -1) return 0.0;
  if (v < 0) return (1 + v) / (1 - v / 0.25);
  return (1.4 * v + 0.0375) / (v + 0.0375);
}
double RefFp(double l) {
  if (l <= 1) return 0.0;
  return (std::exp(5 * (l - 1) / 0.6) - 1) / (std::exp(5.0) - 1);
}

MuscleParams TestMuscle(double phi_o = 0.0) {
  MuscleParams p;
  p.name = "test";
  p.f_o = 500.0;
  p.l_o = 0.1;
  p.phi_o = phi_o;
  p.l_ts = 0.2;
  p.v_o = 10.0;
  p.path.coeffs = {0.32, -0.03, -0.004};
  return p;
}

TEST(MusculotendonLengthTest, LinearPath) {
  MusclePath path{{0.3, -0.04}};
  EXPECT_DOUBLE_EQ(MusculotendonLength(path, 0.0), 0.3);
  EXPECT_NEAR(MusculotendonLength(path, 0.5), 0.28, 1e-15);
}

TEST(MusculotendonLengthTest, CubicMatchesTermSum) {
  MusclePath path{{0.41, -0.021, 0.0037, -0.0011}};
  const double q = 1.1;
  double expected = 0.0;
  for (std::size_t k = 0; k < path.coeffs.size(); ++k) {
    expected += path.coeffs[k] * std::pow(q, static_cast<double>(k));
  }
  EXPECT_NEAR(MusculotendonLength(path, q), expected, 1e-15);
}

TEST(MusculotendonLengthTest, RejectsAngleOutsideRange) {
  MusclePath path{{0.3, -0.04}, -0.2, 2.0};
  EXPECT_ERROR_KIND(MusculotendonLength(path, 2.5), ErrorKind::kRange);
  EXPECT_ERROR_KIND(MomentArm(path, -0.3), ErrorKind::kRange);
  EXPECT_ERROR_KIND(MusculotendonLength(path, std::nan("")), ErrorKind::kRange);
}

TEST(MomentArmTest, LinearPathSigns) {
  for (double q : {-1.0, 0.0, 0.7, 2.0}) {
    EXPECT_DOUBLE_EQ(MomentArm(MusclePath{{0.3, -0.04}}, q), 0.04);
    EXPECT_DOUBLE_EQ(MomentArm(MusclePath{{0.3, 0.04}}, q), -0.04);
  }
}

TEST(MomentArmTest, MatchesFiniteDifferenceOfLength) {
  MusclePath path{{0.45, -0.028, -0.003, 0.0009}};
  const double h = 1e-6;
  for (double q = -0.5; q <= 2.0; q += 0.05) {
    const double fd =
        -(MusculotendonLength(path, q + h) - MusculotendonLength(path, q - h)) /
        (2 * h);
    EXPECT_NEAR(MomentArm(path, q), fd, 1e-8) << "q=" << q;
  }
}

TEST(ResolveFiberTest, ZeroPennationIsSubtraction) {
  MuscleParams p = TestMuscle(0.0);
  const MuscleState s = ResolveFiber(p, 0.3);
  EXPECT_NEAR(s.l_m, 0.1, 1e-15);
  EXPECT_DOUBLE_EQ(s.phi, 0.0);
  EXPECT_NEAR(s.l_norm, 1.0, 1e-14);
}

TEST(ResolveFiberTest, OptimalLengthGivesOptimalPennation) {
  MuscleParams p = TestMuscle(0.3);
  const double l_mt = p.l_ts + p.l_o * std::cos(p.phi_o);
  const MuscleState s = ResolveFiber(p, l_mt);
  EXPECT_NEAR(s.l_m, p.l_o, 1e-15);
  EXPECT_NEAR(s.phi, p.phi_o, 1e-12);
}

TEST(ResolveFiberTest, PennatedClosedForm) {
  MuscleParams p = TestMuscle(0.1);
  const MuscleState s = ResolveFiber(p, p.l_ts + 0.05);
  const double height = 0.1 * std::sin(0.1);
  const double l_m = std::sqrt(0.05 * 0.05 + height * height);
  EXPECT_NEAR(s.l_m, l_m, 1e-15);
  EXPECT_NEAR(s.phi, std::asin(height / l_m), 1e-15);
  // Fiber projected on the tendon line spans the muscle belly.
  EXPECT_LT(std::abs(s.l_m * std::cos(s.phi) - 0.05), 1e-12);
}

TEST(ResolveFiberTest, ConstantHeightIdentity) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> phi(0.0, 0.6), gap(0.01, 0.2);
  for (int i = 0; i < 200; ++i) {
    MuscleParams p = TestMuscle(phi(rng));
    const MuscleState s = ResolveFiber(p, p.l_ts + gap(rng));
    EXPECT_NEAR(s.l_m * std::sin(s.phi), p.l_o * std::sin(p.phi_o), 1e-12);
    EXPECT_GT(s.l_m, 0.0);
    EXPECT_GE(s.phi, 0.0);
    EXPECT_LT(s.phi, std::numbers::pi / 2);
  }
}

TEST(ResolveFiberTest, SlackTendonIsGeometryError) {
  MuscleParams p = TestMuscle(0.1);
  EXPECT_ERROR_KIND(ResolveFiber(p, p.l_ts), ErrorKind::kGeometry);
  EXPECT_ERROR_KIND(ResolveFiber(p, p.l_ts - 0.01), ErrorKind::kGeometry);
}

TEST(FiberVelocityTest, StaticPostureHasZeroVelocity) {
  MuscleParams p = TestMuscle(0.2);
  const MuscleState s = ResolveState(p, 0.9, 0.0);
  EXPECT_DOUBLE_EQ(s.v_norm, 0.0);
}

TEST(FiberVelocityTest, ZeroPennationChainRule) {
  MuscleParams p = TestMuscle(0.0);
  const double q = 0.6, qdot = 1.3;
  const double r = MomentArm(p.path, q);
  const MuscleState s = ResolveState(p, q, qdot);
  EXPECT_NEAR(s.v_norm, -r * qdot / (p.v_o * p.l_o), 1e-15);
}

TEST(FiberVelocityTest, PennatedMatchesFiniteDifference) {
  MuscleParams p = TestMuscle(0.35);
  const double q0 = 0.8, qdot = 2.0, dt = 1e-6;
  auto fiber = [&](double t) {
    return ResolveFiber(p, MusculotendonLength(p.path, q0 + qdot * t)).l_m;
  };
  const double fd = (fiber(dt) - fiber(-dt)) / (2 * dt) / (p.v_o * p.l_o);
  EXPECT_NEAR(ResolveState(p, q0, qdot).v_norm, fd, 1e-6);
}

TEST(FiberVelocityTest, ClampedToBounds) {
  MuscleParams p = TestMuscle(0.0);
  // Positive moment arm: fast flexion shortens the fiber.
  EXPECT_DOUBLE_EQ(ResolveState(p, 0.5, 1e4).v_norm, -kMaxNormalizedVelocity);
  EXPECT_DOUBLE_EQ(ResolveState(p, 0.5, -1e4).v_norm, kMaxNormalizedVelocity);
}

TEST(CurvesTest, NormalizationPoints) {
  EXPECT_DOUBLE_EQ(ActiveForceLength(1.0), 1.0);
  EXPECT_DOUBLE_EQ(ForceVelocity(0.0), 1.0);
  EXPECT_DOUBLE_EQ(PassiveForceLength(1.0), 0.0);
  EXPECT_DOUBLE_EQ(ForceVelocity(-1.0), 0.0);
  EXPECT_DOUBLE_EQ(ForceVelocity(-1.4), 0.0);
  EXPECT_NEAR(ActiveForceLength(1.3), std::exp(-0.2), 1e-15);
  EXPECT_NEAR(ActiveForceLength(1.3), 0.8187, 1e-4);
}

TEST(CurvesTest, MatchReferenceFormulas) {
  for (double l = 0.3; l <= 1.8; l += 0.01) {
    EXPECT_NEAR(ActiveForceLength(l), RefFa(l), 1e-14);
    EXPECT_NEAR(PassiveForceLength(l), RefFp(l), 1e-14);
  }
  for (double v = -1.5; v <= 1.5; v += 0.01) {
    EXPECT_NEAR(ForceVelocity(v), RefFv(v), 1e-13) << v;
  }
}

TEST(CurvesTest, MonotoneAndBounded) {
  double prev_v = -1.0, prev_p = -1.0;
  for (double x = -1.0; x <= 1.5; x += 1e-3) {
    const double fv = ForceVelocity(x);
    EXPECT_GE(fv, prev_v - 1e-15);
    EXPECT_GE(fv, 0.0);
    EXPECT_LE(fv, 1.4);
    prev_v = fv;
  }
  for (double l = 0.2; l <= 2.0; l += 1e-3) {
    const double fp = PassiveForceLength(l);
    EXPECT_GE(fp, prev_p);
    if (l <= 1.0) {
      EXPECT_EQ(fp, 0.0);
    }
    prev_p = fp;
  }
}

TEST(CurvesTest, DerivativesMatchFiniteDifferences) {
  const double h = 1e-6;
  for (double l : {0.6, 0.95, 1.2, 1.45}) {
    EXPECT_NEAR(ActiveForceLengthDerivative(l),
                (ActiveForceLength(l + h) - ActiveForceLength(l - h)) / (2 * h), 1e-7);
    EXPECT_NEAR(PassiveForceLengthDerivative(l),
                (PassiveForceLength(l + h) - PassiveForceLength(l - h)) / (2 * h), 1e-6);
  }
  for (double v : {-0.8, -0.3, 0.2, 0.9}) {
    EXPECT_NEAR(ForceVelocityDerivative(v),
                (ForceVelocity(v + h) - ForceVelocity(v - h)) / (2 * h), 1e-5);
  }
}

MuscleState State(double l_norm, double v_norm, double phi) {
  MuscleState s;
  s.l_norm = l_norm;
  s.v_norm = v_norm;
  s.phi = phi;
  return s;
}

TEST(TendonForceTest, IsometricOptimum) {
  MuscleParams p = TestMuscle();
  p.f_o = 1000.0;
  EXPECT_DOUBLE_EQ(TendonForce(p, State(1, 0, 0), 0.0), 0.0);
  EXPECT_DOUBLE_EQ(TendonForce(p, State(1, 0, 0), 1.0), 1000.0);
}

TEST(TendonForceTest, HandEvaluation) {
  MuscleParams p = TestMuscle(0.1);
  p.f_o = 500.0;
  // Pennation at l_norm = 1.1 follows the constant-height construction.
  const double phi = std::asin(std::sin(0.1) / 1.1);
  const double fa = std::exp(-0.01 / 0.45);
  const double fv = (1 - 0.2) / (1 + 0.2 / 0.25);
  const double fp = (std::exp(5 * 0.1 / 0.6) - 1) / (std::exp(5.0) - 1);
  const double expected = 500 * (0.5 * fv * fa + fp) * std::cos(phi);
  EXPECT_NEAR(TendonForce(p, State(1.1, -0.2, phi), 0.5), expected, 1e-10);
}

TEST(TendonForceTest, MonotoneAndNonNegativeInActivation) {
  MuscleParams p = TestMuscle(0.2);
  for (double l : {0.7, 1.0, 1.3}) {
    for (double v : {-0.9, 0.0, 0.8}) {
      double prev = -1.0;
      for (double a = 0.0; a <= 1.0; a += 0.05) {
        const double f = TendonForce(p, State(l, v, 0.2), a);
        EXPECT_GE(f, 0.0);
        EXPECT_GE(f, prev);
        prev = f;
      }
    }
  }
}

TEST(TendonForceTest, GradientMatchesFiniteDifferences) {
  MuscleParams p = TestMuscle(0.25);
  const MuscleState s = State(1.12, -0.3, 0.27);
  const double a = 0.4, h = 1e-7;
  const TendonForcePartials g = TendonForceGradient(p, s, a);
  auto perturbed = [&](double da, double dl, double dv, double dphi) {
    return TendonForce(p, State(s.l_norm + dl, s.v_norm + dv, s.phi + dphi), a + da);
  };
  EXPECT_NEAR(g.activation, (perturbed(h, 0, 0, 0) - perturbed(-h, 0, 0, 0)) / (2 * h), 1e-5);
  EXPECT_NEAR(g.l_norm, (perturbed(0, h, 0, 0) - perturbed(0, -h, 0, 0)) / (2 * h), 1e-4);
  EXPECT_NEAR(g.v_norm, (perturbed(0, 0, h, 0) - perturbed(0, 0, -h, 0)) / (2 * h), 1e-4);
  EXPECT_NEAR(g.phi, (perturbed(0, 0, 0, h) - perturbed(0, 0, 0, -h)) / (2 * h), 1e-4);
}

TEST(TendonForceTest, AffineDecomposition) {
  MuscleParams p = TestMuscle(0.15);
  const MuscleState s = ResolveState(p, 1.4, -0.7);
  const HillCoefficients h = HillDecomposition(p, s);
  for (double a : {0.0, 0.3, 1.0}) {
    EXPECT_NEAR(TendonForce(p, s, a), h.active * a + h.passive, 1e-10);
  }
  EXPECT_NEAR(h.active,
              p.f_o * RefFv(s.v_norm) * RefFa(s.l_norm) * std::cos(s.phi), 1e-10);
}

TEST(JointTorqueTest, SumOfProducts) {
  const std::vector<double> f = {100, 50}, r = {0.04, -0.02};
  EXPECT_NEAR(JointTorque(f, r), 3.0, 1e-15);
  const std::vector<double> zero = {0, 0};
  EXPECT_EQ(JointTorque(zero, r), 0.0);
}

TEST(JointTorqueTest, RandomInstanceAndLinearity) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> f(5), r(5), f2(5);
  double expected = 0.0;
  for (int i = 0; i < 5; ++i) {
    f[i] = 500 * (u(rng) + 1);
    r[i] = 0.05 * u(rng);
    f2[i] = 2.5 * f[i];
    expected += f[i] * r[i];
  }
  EXPECT_NEAR(JointTorque(f, r), expected, 1e-12);
  EXPECT_NEAR(JointTorque(f2, r), 2.5 * JointTorque(f, r), 1e-12);
}

TEST(JointTorqueTest, LengthMismatchIsDimensionError) {
  const std::vector<double> f = {1, 2, 3}, r = {1, 2};
  EXPECT_ERROR_KIND(JointTorque(f, r), ErrorKind::kDimension);
}

JointModel TestJoint() {
  JointModel j;
  j.name = "test";
  j.inertia = 0.15;
  j.mass = 3.0;
  j.com_dist = 0.25;
  return j;
}

TEST(InverseDynamicsTest, HangingEquilibrium) {
  EXPECT_DOUBLE_EQ(InverseDynamicsTorque(TestJoint(), 0, 0, 0), 0.0);
}

TEST(InverseDynamicsTest, InertialPlusGravity) {
  JointModel j = TestJoint();
  j.mass = 2.0 / (kGravity * j.com_dist);  // G(pi/2) = 2 N m
  EXPECT_NEAR(InverseDynamicsTorque(j, std::numbers::pi / 2, 0.0, 1.0), 2.15, 1e-12);
  EXPECT_NEAR(GravityTorque(j, std::numbers::pi / 2), 2.0, 1e-12);
  j.gravity_sign = -1.0;
  EXPECT_NEAR(GravityTorque(j, std::numbers::pi / 2), -2.0, 1e-12);
  j.damping = 0.5;
  EXPECT_NEAR(InverseDynamicsTorque(j, 0.0, 2.0, 0.0), 1.0, 1e-15);
}

TEST(InverseDynamicsTest, WorkEqualsEnergyChange) {
  const JointModel j = TestJoint();
  const double amp = 0.8, w = 2.1, t_end = 2.3;
  auto q = [&](double t) { return amp * std::sin(w * t) + 0.4; };
  auto qd = [&](double t) { return amp * w * std::cos(w * t); };
  auto qdd = [&](double t) { return -amp * w * w * std::sin(w * t); };
  auto energy = [&](double t) {
    return 0.5 * j.inertia * qd(t) * qd(t) +
           j.mass * kGravity * j.com_dist * (1 - std::cos(q(t)));
  };
  const int n = 200000;
  const double dt = t_end / n;
  double work = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = i * dt;
    const double p = InverseDynamicsTorque(j, q(t), qd(t), qdd(t)) * qd(t);
    work += (i == 0 || i == n ? 0.5 : 1.0) * p * dt;
  }
  const double delta = energy(t_end) - energy(0.0);
  EXPECT_NEAR(work, delta, 1e-4 * std::abs(delta));
  EXPECT_NEAR(PotentialEnergy(j, q(t_end)) - PotentialEnergy(j, q(0)),
              j.mass * kGravity * j.com_dist * (std::cos(q(0)) - std::cos(q(t_end))),
              1e-12);
}

TEST(ValidationTest, RejectsBadParameters) {
  MuscleParams p = TestMuscle();
  p.f_o = 0.0;
  EXPECT_ERROR_KIND(p.Validate(), ErrorKind::kConfig);
  p = TestMuscle();
  p.phi_o = std::numbers::pi / 2;
  EXPECT_ERROR_KIND(p.Validate(), ErrorKind::kConfig);
  p = TestMuscle();
  p.v_o = -1.0;
  EXPECT_ERROR_KIND(p.Validate(), ErrorKind::kConfig);
  p = TestMuscle();
  p.l_ts = 0.5;  // path never exceeds the slack length
  p.path.q_min = -0.2;
  p.path.q_max = 2.0;
  EXPECT_ERROR_KIND(p.Validate(), ErrorKind::kGeometry);
  JointModel j = TestJoint();
  j.inertia = 0.0;
  EXPECT_ERROR_KIND(j.Validate(), ErrorKind::kConfig);
  j = TestJoint();
  j.mass = -1.0;
  EXPECT_ERROR_KIND(j.Validate(), ErrorKind::kConfig);
}

constexpr char kTinyModel[] = R"(
joint:
  name: hinge
  inertia: {value: 0.2, unit: kg*m^2}
  mass: {value: 2.0, unit: kg}
  com_dist: {value: 0.2, unit: m}
  gravity_sign: 1
  range: {min: -10, max: 120, unit: deg}
muscles:
  - name: flexor
    f_o: {value: 300, unit: N}
    l_o: {value: 0.1, unit: m}
    phi_o: {value: 10, unit: deg}
    l_ts: {value: 0.2, unit: m}
    v_o: {value: 10, unit: l_o/s}
    path: {unit: m, coeffs: [0.33, -0.03]}
)";

TEST(ModelTest, ParsesUnitsAndRange) {
  const MusculoskeletalModel m = ParseModel(kTinyModel);
  ASSERT_EQ(m.muscle_count(), 1u);
  EXPECT_EQ(m.muscle_names(), std::vector<std::string>{"flexor"});
  EXPECT_NEAR(m.muscles[0].phi_o, 10 * std::numbers::pi / 180, 1e-15);
  EXPECT_NEAR(m.joint.q_max, 120 * std::numbers::pi / 180, 1e-15);
  EXPECT_NEAR(m.muscles[0].path.q_min, -10 * std::numbers::pi / 180, 1e-15);
  EXPECT_DOUBLE_EQ(m.joint.inertia, 0.2);
}

TEST(ModelTest, RejectsMalformedDocuments) {
  std::string text = kTinyModel;
  EXPECT_ERROR_KIND(ParseModel(text.replace(text.find("unit: N"), 7, "unit: lbf")),
                    ErrorKind::kConfig);
  text = kTinyModel;
  EXPECT_ERROR_KIND(ParseModel(text.replace(text.find("f_o"), 3, "f_x")),
                    ErrorKind::kConfig);
  EXPECT_ERROR_KIND(ParseModel("joint: [1, 2"), ErrorKind::kConfig);
  EXPECT_ERROR_KIND(LoadModel("/nonexistent/model.cfg"), ErrorKind::kIo);
}

TEST(ModelTest, BundledModelsLoad) {
  const MusculoskeletalModel knee = LoadModel(MYODYN_MODELS_DIR "/knee5.cfg");
  EXPECT_EQ(knee.muscle_names(),
            (std::vector<std::string>{"BFS", "BFL", "SEMT", "MG", "LG"}));
  const MusculoskeletalModel elbow = LoadModel(MYODYN_MODELS_DIR "/elbow5.cfg");
  EXPECT_EQ(elbow.muscle_count(), 5u);
  // Every knee flexor pulls with a positive moment arm over the flexion range.
  for (const auto& m : knee.muscles) {
    for (double q = 0.0; q <= std::numbers::pi / 2; q += 0.1) {
      EXPECT_GT(MomentArm(m.path, q), 0.0) << m.name;
    }
  }
}

}  // namespace
}  // namespace myodyn
