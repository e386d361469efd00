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

#include "myodyn/harness/io.h"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "myodyn/error.h"

namespace myodyn {
namespace {

std::vector<std::string> SplitLine(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double ParseNumber(const std::string& text, const std::string& path,
                   std::size_t line) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  while (begin < end && *begin == ' ') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    std::ostringstream os;
    os << path << ":" << line << ": cannot parse number '" << text << "'";
    Fail(ErrorKind::kIo, os.str());
  }
  return v;
}

}  // namespace

std::size_t CsvTable::Column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  Fail(ErrorKind::kIo, "CSV column '" + std::string(name) + "' not found");
}

std::string FormatNumber(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

CsvTable ReadCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, "cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) Fail(ErrorKind::kIo, path + ": missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = SplitLine(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = SplitLine(line);
    if (cells.size() != t.header.size()) {
      std::ostringstream os;
      os << path << ":" << lineno << ": " << cells.size() << " cells, header has "
         << t.header.size();
      Fail(ErrorKind::kIo, os.str());
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const std::string& c : cells) row.push_back(ParseNumber(c, path, lineno));
    t.rows.push_back(std::move(row));
  }
  return t;
}

void WriteFileAtomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(target.parent_path(), ec);
  }
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) Fail(ErrorKind::kIo, "cannot write '" + tmp + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) Fail(ErrorKind::kIo, "write failed for '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    Fail(ErrorKind::kIo, "cannot move file into place at '" + path + "'");
  }
}

void WriteCsv(const std::string& path, const std::vector<std::string>& header,
              const std::vector<std::vector<double>>& rows) {
  std::string s;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) s += ',';
    s += header[i];
  }
  s += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) s += ',';
      s += FormatNumber(row[i]);
    }
    s += '\n';
  }
  WriteFileAtomic(path, s);
}

void WriteKinematicsCsv(const std::string& path, const KinematicDataset& data) {
  std::vector<std::vector<double>> rows;
  for (const KinematicSeries& s : data) {
    s.Validate();
    for (std::size_t i = 0; i < s.size(); ++i) {
      rows.push_back({s.time[i], s.q[i], s.qdot[i], s.qddot[i],
                      static_cast<double>(s.trajectory_id)});
    }
  }
  WriteCsv(path, {"time_s", "q_rad", "qdot", "qddot", "trajectory_id"}, rows);
}

KinematicDataset ReadKinematicsCsv(const std::string& path) {
  const CsvTable t = ReadCsv(path);
  const std::size_t c_time = t.Column("time_s"), c_q = t.Column("q_rad"),
                    c_qd = t.Column("qdot"), c_qdd = t.Column("qddot"),
                    c_id = t.Column("trajectory_id");
  KinematicDataset data;
  for (const auto& row : t.rows) {
    const int id = static_cast<int>(row[c_id]);
    if (data.empty() || data.back().trajectory_id != id) {
      for (const KinematicSeries& s : data) {
        if (s.trajectory_id == id) {
          Fail(ErrorKind::kIo, path + ": rows of trajectory " +
                                   std::to_string(id) + " are not contiguous");
        }
      }
      data.emplace_back();
      data.back().trajectory_id = id;
    }
    KinematicSeries& s = data.back();
    s.time.push_back(row[c_time]);
    s.q.push_back(row[c_q]);
    s.qdot.push_back(row[c_qd]);
    s.qddot.push_back(row[c_qdd]);
  }
  for (KinematicSeries& s : data) {
    if (s.size() >= 2) s.rate_hz = 1.0 / (s.time[1] - s.time[0]);
    s.Validate();
  }
  return data;
}

LabelSet LabelsFromOracle(const std::vector<std::string>& muscles,
                          const std::vector<SoTrajectory>& solved) {
  LabelSet labels;
  labels.muscles = muscles;
  const auto n = static_cast<Eigen::Index>(muscles.size());
  for (const SoTrajectory& traj : solved) {
    TrajectoryLabels tl;
    const auto steps = static_cast<Eigen::Index>(traj.steps.size());
    tl.a.resize(steps, n);
    tl.forces.resize(steps, n);
    for (Eigen::Index t = 0; t < steps; ++t) {
      const SoSolution& s = traj.steps[t];
      if (static_cast<Eigen::Index>(s.a.size()) != n) {
        Fail(ErrorKind::kDimension, "oracle solution width differs from muscle count");
      }
      for (Eigen::Index m = 0; m < n; ++m) {
        tl.a(t, m) = s.a[m];
        tl.forces(t, m) = s.forces[m];
      }
    }
    labels.trajectories.push_back(std::move(tl));
  }
  return labels;
}

void WriteLabelsCsv(const std::string& path, const KinematicDataset& data,
                    const LabelSet& labels) {
  if (labels.trajectories.size() != data.size()) {
    Fail(ErrorKind::kDimension, "label set and kinematics differ in trajectory count");
  }
  std::vector<std::string> header{"time_s"};
  for (const auto& m : labels.muscles) header.push_back("a_" + m);
  for (const auto& m : labels.muscles) header.push_back("F_" + m + "_N");
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < data.size(); ++k) {
    const TrajectoryLabels& tl = labels.trajectories[k];
    if (static_cast<std::size_t>(tl.a.rows()) != data[k].size()) {
      Fail(ErrorKind::kDimension, "labels misaligned with trajectory " +
                                      std::to_string(data[k].trajectory_id));
    }
    for (Eigen::Index t = 0; t < tl.a.rows(); ++t) {
      std::vector<double> row{data[k].time[t]};
      for (Eigen::Index m = 0; m < tl.a.cols(); ++m) row.push_back(tl.a(t, m));
      for (Eigen::Index m = 0; m < tl.forces.cols(); ++m) {
        row.push_back(tl.forces(t, m));
      }
      rows.push_back(std::move(row));
    }
  }
  WriteCsv(path, header, rows);
}

LabelSet ReadLabelsCsv(const std::string& path, const KinematicDataset& data) {
  const CsvTable t = ReadCsv(path);
  if (t.header.empty() || t.header[0] != "time_s" || (t.header.size() - 1) % 2) {
    Fail(ErrorKind::kIo, path + ": expected time_s, a_<m>..., F_<m>_N...");
  }
  const std::size_t n = (t.header.size() - 1) / 2;
  LabelSet labels;
  for (std::size_t m = 0; m < n; ++m) {
    const std::string& h = t.header[1 + m];
    if (h.rfind("a_", 0) != 0) Fail(ErrorKind::kIo, path + ": bad column " + h);
    labels.muscles.push_back(h.substr(2));
    if (t.header[1 + n + m] != "F_" + labels.muscles.back() + "_N") {
      Fail(ErrorKind::kIo, path + ": force column for " + labels.muscles.back() +
                               " missing or out of order");
    }
  }
  std::size_t total = 0;
  for (const auto& s : data) total += s.size();
  if (t.rows.size() != total) {
    std::ostringstream os;
    os << path << ": " << t.rows.size() << " label rows for " << total
       << " kinematic samples";
    Fail(ErrorKind::kDimension, os.str());
  }
  std::size_t row = 0;
  for (const KinematicSeries& s : data) {
    TrajectoryLabels tl;
    tl.a.resize(static_cast<Eigen::Index>(s.size()), static_cast<Eigen::Index>(n));
    tl.forces.resizeLike(tl.a);
    for (std::size_t i = 0; i < s.size(); ++i, ++row) {
      const auto& r = t.rows[row];
      if (std::abs(r[0] - s.time[i]) > 1e-9) {
        std::ostringstream os;
        os << path << ": label row " << row << " time " << r[0]
           << " does not match kinematics time " << s.time[i];
        Fail(ErrorKind::kDimension, os.str());
      }
      for (std::size_t m = 0; m < n; ++m) {
        tl.a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) = r[1 + m];
        tl.forces(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) =
            r[1 + n + m];
      }
    }
    labels.trajectories.push_back(std::move(tl));
  }
  return labels;
}

}  // namespace myodyn
