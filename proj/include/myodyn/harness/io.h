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

#ifndef MYODYN_HARNESS_IO_H_
#define MYODYN_HARNESS_IO_H_

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "myodyn/harness/kinematics.h"
#include "myodyn/so/static_optimization.h"

// CSV files: mandatory header row, '.' decimal separator, newline-terminated
// rows. Every file is written whole to a temporary and renamed into place.

namespace myodyn {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Index of a named column; kIo if absent.
  std::size_t Column(std::string_view name) const;
};

CsvTable ReadCsv(const std::string& path);
void WriteCsv(const std::string& path, const std::vector<std::string>& header,
              const std::vector<std::vector<double>>& rows);
void WriteFileAtomic(const std::string& path, const std::string& content);
// Shortest decimal text that parses back to the same double.
std::string FormatNumber(double value);

// time_s, q_rad, qdot, qddot, trajectory_id
void WriteKinematicsCsv(const std::string& path, const KinematicDataset& data);
KinematicDataset ReadKinematicsCsv(const std::string& path);

// Oracle labels for one trajectory, one row per sample.
struct TrajectoryLabels {
  Eigen::MatrixXd a;       // T x N
  Eigen::MatrixXd forces;  // T x N, newtons
};

struct LabelSet {
  std::vector<std::string> muscles;
  std::vector<TrajectoryLabels> trajectories;  // aligned with the dataset
};

LabelSet LabelsFromOracle(const std::vector<std::string>& muscles,
                          const std::vector<SoTrajectory>& solved);

// time_s, a_<muscle>..., F_<muscle>_N...; rows follow the kinematics file.
void WriteLabelsCsv(const std::string& path, const KinematicDataset& data,
                    const LabelSet& labels);
// Splits rows by the trajectory lengths of `data` and checks time alignment.
LabelSet ReadLabelsCsv(const std::string& path, const KinematicDataset& data);

}  // namespace myodyn

#endif  // MYODYN_HARNESS_IO_H_
