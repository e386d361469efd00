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

#include "myodyn/trainer/dataset.h"

#include <cmath>
#include <string>

#include "myodyn/error.h"
#include "myodyn/so/static_optimization.h"

namespace myodyn {

std::vector<std::size_t> PreparedData::Lengths() const {
  std::vector<std::size_t> out;
  out.reserve(trajectories.size());
  for (const auto& t : trajectories) out.push_back(t.size());
  return out;
}

PreparedData PrepareData(const MusculoskeletalModel& model,
                         const KinematicDataset& data, const LabelSet* labels) {
  const auto n = static_cast<Eigen::Index>(model.muscle_count());
  PreparedData out;
  out.muscles = model.muscle_names();
  out.f_o.resize(n);
  for (Eigen::Index m = 0; m < n; ++m) out.f_o[m] = model.muscles[m].f_o;
  if (labels != nullptr) {
    if (labels->trajectories.size() != data.size()) {
      Fail(ErrorKind::kDimension, "labels cover " +
                                      std::to_string(labels->trajectories.size()) +
                                      " trajectories, kinematics " +
                                      std::to_string(data.size()));
    }
    if (labels->muscles != out.muscles) {
      Fail(ErrorKind::kDimension, "label muscles do not match the model");
    }
    out.has_labels = true;
  }
  out.trajectories.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const KinematicSeries& s = data[i];
    s.Validate();
    const auto len = static_cast<Eigen::Index>(s.size());
    PreparedTrajectory p;
    p.trajectory_id = s.trajectory_id;
    p.time = s.time;
    p.inputs.resize(len, 3);
    p.c.resize(len, n);
    p.d.resize(len, n);
    p.r.resize(len, n);
    p.tau_req.resize(len);
    for (Eigen::Index t = 0; t < len; ++t) {
      p.inputs(t, 0) = s.q[t];
      p.inputs(t, 1) = s.qdot[t];
      p.inputs(t, 2) = s.qddot[t];
      const SoProblem prob = BuildProblem(model, s.q[t], s.qdot[t], s.qddot[t]);
      for (Eigen::Index m = 0; m < n; ++m) {
        p.c(t, m) = prob.c[m];
        p.d(t, m) = prob.d[m];
        p.r(t, m) = prob.r[m];
      }
      p.tau_req[t] = prob.tau_req;
    }
    if (labels != nullptr) {
      const TrajectoryLabels& l = labels->trajectories[i];
      if (l.a.rows() != len || l.a.cols() != n || l.forces.rows() != len ||
          l.forces.cols() != n) {
        Fail(ErrorKind::kDimension,
             "labels of trajectory " + std::to_string(s.trajectory_id) +
                 " do not match its kinematics");
      }
      p.label_a = l.a;
      p.label_f = l.forces;
    }
    out.trajectories.push_back(std::move(p));
  }
  return out;
}

InputNormalization FitNormalization(const PreparedData& data,
                                    std::span<const WindowRef> windows,
                                    int window) {
  std::vector<std::vector<char>> covered(data.trajectories.size());
  for (std::size_t i = 0; i < covered.size(); ++i) {
    covered[i].assign(data.trajectories[i].size(), 0);
  }
  for (const WindowRef& w : windows) {
    auto& mask = covered.at(w.trajectory);
    for (int k = 0; k < window; ++k) mask.at(w.start + k) = 1;
  }
  Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(3);
  double count = 0.0;
  for (std::size_t i = 0; i < covered.size(); ++i) {
    for (std::size_t t = 0; t < covered[i].size(); ++t) {
      if (!covered[i][t]) continue;
      sum += data.trajectories[i].inputs.row(t);
      count += 1.0;
    }
  }
  if (count < 2.0) {
    Fail(ErrorKind::kConfig, "too few samples to fit input normalization");
  }
  InputNormalization norm;
  norm.mean = sum / count;
  Eigen::RowVectorXd sq = Eigen::RowVectorXd::Zero(3);
  for (std::size_t i = 0; i < covered.size(); ++i) {
    for (std::size_t t = 0; t < covered[i].size(); ++t) {
      if (!covered[i][t]) continue;
      sq += (data.trajectories[i].inputs.row(t) - norm.mean).array().square().matrix();
    }
  }
  norm.stddev = (sq / count).array().sqrt().matrix();
  for (Eigen::Index k = 0; k < 3; ++k) {
    if (!(norm.stddev[k] > 1e-12)) norm.stddev[k] = 1.0;  // constant channel
  }
  return norm;
}

Batch AssembleBatch(const PreparedData& data, std::span<const WindowRef> windows,
                    int window, const InputNormalization& normalization) {
  if (windows.empty()) Fail(ErrorKind::kContract, "empty batch");
  const auto n = static_cast<Eigen::Index>(data.muscles.size());
  const auto b = static_cast<Eigen::Index>(windows.size());
  const Eigen::Index rows = window * b;
  Batch out;
  out.steps = window;
  out.size = static_cast<int>(b);
  Eigen::MatrixXd raw(rows, 3);
  out.physics.c.resize(rows, n);
  out.physics.d.resize(rows, n);
  out.physics.r.resize(rows, n);
  out.physics.tau_req.resize(rows, 1);
  if (data.has_labels) {
    out.label_a.resize(rows, n);
    out.label_f.resize(rows, n);
  }
  for (Eigen::Index j = 0; j < b; ++j) {
    const WindowRef& w = windows[j];
    const PreparedTrajectory& p = data.trajectories.at(w.trajectory);
    if (w.start + static_cast<std::size_t>(window) > p.size()) {
      Fail(ErrorKind::kDimension, "window runs past the end of its trajectory");
    }
    for (Eigen::Index t = 0; t < window; ++t) {
      const Eigen::Index src = static_cast<Eigen::Index>(w.start) + t;
      const Eigen::Index dst = t * b + j;
      raw.row(dst) = p.inputs.row(src);
      out.physics.c.row(dst) = p.c.row(src);
      out.physics.d.row(dst) = p.d.row(src);
      out.physics.r.row(dst) = p.r.row(src);
      out.physics.tau_req(dst, 0) = p.tau_req[src];
      if (data.has_labels) {
        out.label_a.row(dst) = p.label_a.row(src);
        out.label_f.row(dst) = p.label_f.row(src);
      }
    }
  }
  out.inputs = normalization.Apply(raw);
  return out;
}

}  // namespace myodyn
