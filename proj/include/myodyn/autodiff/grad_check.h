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

#ifndef MYODYN_AUTODIFF_GRAD_CHECK_H_
#define MYODYN_AUTODIFF_GRAD_CHECK_H_

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "myodyn/autodiff/tape.h"

namespace myodyn::ad {

// Builds a scalar on `tape` from the given leaves.
using ScalarFunction = std::function<Var(Tape& tape, std::span<const Var>)>;

struct GradCheckReport {
  bool ok = true;
  double max_rel_err = 0.0;
  // Coordinate with the largest relative error.
  std::size_t input = 0;
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  double ad_value = 0.0;
  double fd_value = 0.0;
  std::size_t coordinates = 0;
  // Non-empty when a non-finite value stopped the comparison.
  std::string diagnostic;
};

// |ad - fd| / max(1, |ad|, |fd|)
double RelativeError(double ad, double fd);

// Compares reverse-mode gradients of `f` at `point` against central
// differences with step `h`, coordinate by coordinate.
GradCheckReport GradCheck(const ScalarFunction& f,
                          std::span<const Matrix> point, double h = 1e-6,
                          double tol = 1e-4);

}  // namespace myodyn::ad

#endif  // MYODYN_AUTODIFF_GRAD_CHECK_H_
