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

#include "myodyn/trainer/adam.h"

#include <cmath>

#include "myodyn/error.h"

namespace myodyn {

AdamState InitAdam(std::span<const Eigen::MatrixXd* const> params) {
  AdamState s;
  for (const Eigen::MatrixXd* p : params) {
    s.m.push_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
    s.v.push_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
  }
  return s;
}

void AdamStep(std::span<Eigen::MatrixXd* const> params,
              std::span<const std::string> names,
              std::span<const Eigen::MatrixXd> grads, AdamState& state,
              double lr) {
  const std::size_t n = params.size();
  if (grads.size() != n || names.size() != n || state.m.size() != n ||
      state.v.size() != n) {
    Fail(ErrorKind::kDimension, "adam: parameter, gradient and state counts differ");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = *params[i];
    if (grads[i].rows() != p.rows() || grads[i].cols() != p.cols() ||
        state.m[i].rows() != p.rows() || state.m[i].cols() != p.cols()) {
      Fail(ErrorKind::kDimension, "adam: shape mismatch for '" + names[i] + "'");
    }
    if (!grads[i].allFinite()) {
      Fail(ErrorKind::kNumeric, "adam: non-finite gradient for '" + names[i] + "'");
    }
  }
  ++state.t;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < n; ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
    state.v[i] = state.beta2 * state.v[i] +
                 (1.0 - state.beta2) * grads[i].cwiseProduct(grads[i]);
    params[i]->array() -=
        lr * (state.m[i].array() / c1) /
        ((state.v[i].array() / c2).sqrt() + state.eps);
  }
}

}  // namespace myodyn
