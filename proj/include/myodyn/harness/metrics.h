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

#ifndef MYODYN_HARNESS_METRICS_H_
#define MYODYN_HARNESS_METRICS_H_

#include <span>

namespace myodyn {

double Rmse(std::span<const double> y, std::span<const double> yhat);

// Coefficient of determination; negative when the residual sum of squares
// exceeds the spread of y. A constant y with non-zero residuals has no
// defined R^2 and raises kNumeric.
double RSquared(std::span<const double> y, std::span<const double> yhat);

}  // namespace myodyn

#endif  // MYODYN_HARNESS_METRICS_H_
