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

#include "myodyn/autodiff/grad_check.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace myodyn::ad {
namespace {

double Evaluate(const ScalarFunction& f, std::span<const Matrix> point) {
  Tape tape;
  std::vector<Var> leaves;
  leaves.reserve(point.size());
  for (const Matrix& m : point) leaves.push_back(tape.Leaf(m));
  return f(tape, leaves).scalar();
}

}  // namespace

double RelativeError(double ad, double fd) {
  const double scale = std::max({1.0, std::abs(ad), std::abs(fd)});
  return std::abs(ad - fd) / scale;
}

GradCheckReport GradCheck(const ScalarFunction& f,
                          std::span<const Matrix> point, double h,
                          double tol) {
  GradCheckReport report;

  Tape tape;
  std::vector<Var> leaves;
  leaves.reserve(point.size());
  for (const Matrix& m : point) leaves.push_back(tape.Leaf(m));
  const Var root = f(tape, leaves);
  if (!std::isfinite(root.scalar())) {
    report.ok = false;
    report.diagnostic = "function value is not finite at the check point";
    return report;
  }
  const Gradients grads = tape.Backward(root);

  std::vector<Matrix> probe(point.begin(), point.end());
  for (std::size_t k = 0; k < probe.size(); ++k) {
    const Matrix ad = grads[leaves[k]];
    for (Eigen::Index j = 0; j < probe[k].cols(); ++j) {
      for (Eigen::Index i = 0; i < probe[k].rows(); ++i) {
        const double x0 = probe[k](i, j);
        probe[k](i, j) = x0 + h;
        const double up = Evaluate(f, probe);
        probe[k](i, j) = x0 - h;
        const double down = Evaluate(f, probe);
        probe[k](i, j) = x0;
        const double fd = (up - down) / (2.0 * h);
        ++report.coordinates;
        if (!std::isfinite(fd) || !std::isfinite(ad(i, j))) {
          std::ostringstream os;
          os << "non-finite derivative at input " << k << " (" << i << ", "
             << j << "): ad=" << ad(i, j) << " fd=" << fd;
          report.ok = false;
          report.diagnostic = os.str();
          report.input = k;
          report.row = i;
          report.col = j;
          report.ad_value = ad(i, j);
          report.fd_value = fd;
          report.max_rel_err = std::numeric_limits<double>::infinity();
          return report;
        }
        const double err = RelativeError(ad(i, j), fd);
        if (err > report.max_rel_err || report.coordinates == 1) {
          report.max_rel_err = err;
          report.input = k;
          report.row = i;
          report.col = j;
          report.ad_value = ad(i, j);
          report.fd_value = fd;
        }
      }
    }
  }
  report.ok = report.max_rel_err <= tol;
  return report;
}

}  // namespace myodyn::ad
