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

#include "myodyn/losses/losses.h"

#include <optional>
#include <sstream>

#include "myodyn/error.h"
#include "myodyn/so/static_optimization.h"

namespace myodyn {

using ad::Var;

namespace {

void CheckShape(const Var& v, const Eigen::MatrixXd& m, const char* what) {
  if (v.rows() != m.rows() || v.cols() != m.cols()) {
    std::ostringstream os;
    os << what << ": predictions " << v.rows() << "x" << v.cols() << " vs "
       << m.rows() << "x" << m.cols();
    Fail(ErrorKind::kDimension, os.str());
  }
}

Var RowMean(const Var& per_element) {
  return ad::Scale(ad::Sum(per_element),
                   1.0 / static_cast<double>(per_element.rows()));
}

}  // namespace

std::string LossMask::ToString() const {
  std::string s;
  if (m) s += 'm';
  if (f) s += 'f';
  if (p) s += 'p';
  if (b) s += 'b';
  return s;
}

LossMask LossMask::Parse(std::string_view letters) {
  LossMask mask{false, false, false, false};
  for (char c : letters) {
    switch (c) {
      case 'm': mask.m = true; break;
      case 'f': mask.f = true; break;
      case 'p': mask.p = true; break;
      case 'b': mask.b = true; break;
      case ',': case ' ': break;
      default:
        Fail(ErrorKind::kConfig,
             "unknown loss term '" + std::string(1, c) + "' (use m, f, p, b)");
    }
  }
  return mask;
}

Var HillForces(const Var& activations, const PhysicsBatch& physics) {
  CheckShape(activations, physics.c, "hill forces");
  CheckShape(activations, physics.d, "hill forces");
  ad::Tape& tape = *activations.tape();
  return activations * tape.Constant(physics.c) + tape.Constant(physics.d);
}

Var LossForwardDynamics(const Var& activations, const PhysicsBatch& physics) {
  CheckShape(activations, physics.r, "forward dynamics loss");
  if (physics.tau_req.rows() != activations.rows() || physics.tau_req.cols() != 1) {
    Fail(ErrorKind::kDimension, "forward dynamics loss: tau_req must be rows x 1");
  }
  ad::Tape& tape = *activations.tape();
  const Var torque =
      ad::RowSum(HillForces(activations, physics) * tape.Constant(physics.r));
  return RowMean(ad::Square(tape.Constant(physics.tau_req) - torque));
}

Var LossPhysiological(const Var& activations, double beta) {
  return RowMean(ad::PowConst(activations, beta));
}

Var LossBoundary(const Var& activations) {
  const Var below = ad::MaxWithConst(kMinActivation - activations, 0.0);
  const Var above = ad::MaxWithConst(activations - kMaxActivation, 0.0);
  return RowMean(ad::Square(below) + ad::Square(above));
}

Var LossForceFit(const Var& forces_hat, const Var& forces_hill) {
  if (forces_hat.rows() != forces_hill.rows() ||
      forces_hat.cols() != forces_hill.cols()) {
    Fail(ErrorKind::kDimension, "force fit loss: shape mismatch");
  }
  return RowMean(ad::Square(forces_hat - forces_hill));
}

KnowledgeLoss LossTotal(const Var& activations, const Var& forces_hat,
                        const PhysicsBatch& physics, double omega, double beta,
                        LossMask mask) {
  if (!(omega >= 0.0)) {
    Fail(ErrorKind::kConfig, "omega must be >= 0");
  }
  ad::Tape& tape = *activations.tape();
  const Var l_m = LossForwardDynamics(activations, physics);
  const Var l_f = LossForceFit(forces_hat, HillForces(activations, physics));
  const Var l_p = LossPhysiological(activations, beta);
  const Var l_b = LossBoundary(activations);

  auto sum = [&](bool use_a, const Var& a, bool use_b, const Var& b) {
    if (use_a && use_b) return a + b;
    if (use_a) return a;
    if (use_b) return b;
    return tape.Constant(0.0);
  };
  const Var fit = sum(mask.m, l_m, mask.f, l_f);
  const Var reg = sum(mask.p, l_p, mask.b, l_b);

  KnowledgeLoss out;
  out.total = fit + ad::Scale(reg, omega);
  out.breakdown.l_m = l_m.scalar();
  out.breakdown.l_f = l_f.scalar();
  out.breakdown.l_p = l_p.scalar();
  out.breakdown.l_b = l_b.scalar();
  out.breakdown.total = out.total.scalar();
  out.breakdown.omega = omega;
  out.breakdown.beta = beta;
  return out;
}

SupervisedLoss LossSupervisedMse(const Var& activations, const Var& forces_hat,
                                 const Eigen::MatrixXd& label_a,
                                 const Eigen::MatrixXd& label_f) {
  CheckShape(activations, label_a, "supervised activation loss");
  CheckShape(forces_hat, label_f, "supervised force loss");
  ad::Tape& tape = *activations.tape();
  SupervisedLoss out;
  out.mse_a = RowMean(ad::Square(activations - tape.Constant(label_a)));
  out.mse_f = RowMean(ad::Square(forces_hat - tape.Constant(label_f)));
  out.total = out.mse_a + out.mse_f;
  return out;
}

}  // namespace myodyn
