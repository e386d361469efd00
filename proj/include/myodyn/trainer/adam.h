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

#ifndef MYODYN_TRAINER_ADAM_H_
#define MYODYN_TRAINER_ADAM_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace myodyn {

struct AdamState {
  std::vector<Eigen::MatrixXd> m;  // first moments, shaped like the params
  std::vector<Eigen::MatrixXd> v;  // second moments
  std::int64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Zero moments shaped like `params`.
AdamState InitAdam(std::span<const Eigen::MatrixXd* const> params);

// One bias-corrected Adam update in place. Every gradient is checked before
// any parameter changes; a non-finite entry raises kNumeric naming the tensor.
void AdamStep(std::span<Eigen::MatrixXd* const> params,
              std::span<const std::string> names,
              std::span<const Eigen::MatrixXd> grads, AdamState& state,
              double lr);

}  // namespace myodyn

#endif  // MYODYN_TRAINER_ADAM_H_
