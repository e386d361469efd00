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

#include "myodyn/harness/metrics.h"

#include <cmath>
#include <sstream>

#include "myodyn/error.h"

namespace myodyn {
namespace {

void CheckLengths(std::span<const double> y, std::span<const double> yhat,
                  std::size_t min_len, const char* what) {
  if (y.size() != yhat.size() || y.size() < min_len) {
    std::ostringstream os;
    os << what << ": lengths " << y.size() << " and " << yhat.size()
       << " (need equal, >= " << min_len << ")";
    Fail(ErrorKind::kDimension, os.str());
  }
}

}  // namespace

double Rmse(std::span<const double> y, std::span<const double> yhat) {
  CheckLengths(y, yhat, 1, "rmse");
  double ss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = y[i] - yhat[i];
    ss += e * e;
  }
  return std::sqrt(ss / static_cast<double>(y.size()));
}

double RSquared(std::span<const double> y, std::span<const double> yhat) {
  CheckLengths(y, yhat, 2, "r_squared");
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  if (ss_tot == 0.0) {
    if (ss_res == 0.0) return 1.0;
    Fail(ErrorKind::kNumeric,
         "r_squared undefined: constant target with non-zero residuals");
  }
  return 1.0 - ss_res / ss_tot;
}

}  // namespace myodyn
