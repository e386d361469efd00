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

#ifndef MYODYN_LOSSES_LOSSES_H_
#define MYODYN_LOSSES_LOSSES_H_

#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "myodyn/autodiff/tape.h"

// Training objectives over a batch of predictions laid out as rows x muscles,
// one row per (window, step). Every loss is a mean over rows of a per-row sum
// over muscles, so the weight balance is independent of batch size.

namespace myodyn {

// Kinematics-derived constants for each prediction row. Tendon force is
// affine in activation: F = c . a + d.
struct PhysicsBatch {
  Eigen::MatrixXd c;        // rows x N, N
  Eigen::MatrixXd d;        // rows x N, N
  Eigen::MatrixXd r;        // rows x N, m
  Eigen::MatrixXd tau_req;  // rows x 1, N m
};

// Which knowledge terms enter the objective.
struct LossMask {
  bool m = true;  // forward-dynamics residual
  bool f = true;  // force fit
  bool p = true;  // activation power
  bool b = true;  // activation bounds

  // Letters of the enabled terms, e.g. "mfpb".
  std::string ToString() const;
  // Accepts any subset of the letters m, f, p, b.
  static LossMask Parse(std::string_view letters);
  bool operator==(const LossMask&) const = default;
};

struct LossBreakdown {
  double l_m = 0.0;
  double l_f = 0.0;
  double l_p = 0.0;
  double l_b = 0.0;
  double total = 0.0;
  double omega = 0.0;
  double beta = 0.0;
};

// c . a + d
ad::Var HillForces(const ad::Var& activations, const PhysicsBatch& physics);

// mean_rows (tau_req - sum_n F_n r_n)^2 with F from HillForces.
ad::Var LossForwardDynamics(const ad::Var& activations,
                            const PhysicsBatch& physics);
// mean_rows sum_n a^beta
ad::Var LossPhysiological(const ad::Var& activations, double beta = 2.0);
// mean_rows sum_n [max(0, 0.01 - a)^2 + max(0, a - 1)^2]
ad::Var LossBoundary(const ad::Var& activations);
// mean_rows sum_n (F_hat - F_hill)^2
ad::Var LossForceFit(const ad::Var& forces_hat, const ad::Var& forces_hill);

struct KnowledgeLoss {
  ad::Var total;
  LossBreakdown breakdown;
};

// (m ? L_m : 0) + (f ? L_f : 0) + omega * ((p ? L_p : 0) + (b ? L_b : 0)).
// Disabled terms are still evaluated for reporting.
KnowledgeLoss LossTotal(const ad::Var& activations, const ad::Var& forces_hat,
                        const PhysicsBatch& physics, double omega,
                        double beta = 2.0, LossMask mask = {});

struct SupervisedLoss {
  ad::Var total;  // mse_a + mse_f
  ad::Var mse_a;
  ad::Var mse_f;
};

// Mean over rows of the per-row summed squared error against oracle labels.
SupervisedLoss LossSupervisedMse(const ad::Var& activations,
                                 const ad::Var& forces_hat,
                                 const Eigen::MatrixXd& label_a,
                                 const Eigen::MatrixXd& label_f);

}  // namespace myodyn

#endif  // MYODYN_LOSSES_LOSSES_H_
