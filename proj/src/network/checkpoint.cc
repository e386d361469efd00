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

#include "myodyn/network/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "myodyn/error.h"
#include "myodyn/harness/io.h"

namespace myodyn {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint encoding assumes a little-endian host");

constexpr char kMagic[8] = {'M', 'Y', 'O', 'D', 'Y', 'N', 'C', 'K'};

class Writer {
 public:
  template <typename T>
  void Put(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void PutString(const std::string& s) {
    Put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    out_ += s;
  }
  void PutMatrix(const Eigen::MatrixXd& m) {
    Put<std::uint32_t>(static_cast<std::uint32_t>(m.rows()));
    Put<std::uint32_t>(static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.size(); ++i) Put<double>(m(i));
  }
  std::string& str() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& in) : in_(in) {}
  template <typename T>
  T Get() {
    Need(sizeof(T));
    T v;
    std::memcpy(&v, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string GetString() {
    const auto n = Get<std::uint32_t>();
    Need(n);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  Eigen::MatrixXd GetMatrix() {
    const auto rows = Get<std::uint32_t>();
    const auto cols = Get<std::uint32_t>();
    Need(static_cast<std::size_t>(rows) * cols * sizeof(double));
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = Get<double>();
    return m;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void Need(std::size_t n) const {
    if (pos_ + n > in_.size()) Fail(ErrorKind::kIo, "checkpoint truncated");
  }
  const std::string& in_;
  std::size_t pos_ = 0;
};

}  // namespace

Eigen::MatrixXd InputNormalization::Apply(const Eigen::MatrixXd& raw) const {
  if (raw.cols() != mean.size()) {
    Fail(ErrorKind::kDimension, "normalization width differs from input width");
  }
  return (raw.rowwise() - mean).array().rowwise() / stddev.array();
}

std::string SerializeCheckpoint(const Checkpoint& c) {
  Writer w;
  w.str().append(kMagic, sizeof(kMagic));
  w.Put<std::uint32_t>(kCheckpointVersion);
  w.Put<std::uint64_t>(c.config_hash);
  w.Put<std::int32_t>(c.iteration);
  w.Put<std::int32_t>(c.window);
  w.Put<std::int32_t>(c.stride);
  w.Put<double>(c.split);
  const NetworkConfig& nc = c.params.config;
  w.Put<std::int32_t>(nc.input_size);
  w.Put<std::int32_t>(nc.hidden);
  w.Put<std::int32_t>(nc.layers);
  w.Put<std::int32_t>(nc.fc);
  w.Put<std::int32_t>(nc.muscles);
  w.Put<double>(nc.dropout);
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(c.muscle_names.size()));
  for (const auto& n : c.muscle_names) w.PutString(n);
  w.PutMatrix(c.normalization.mean);
  w.PutMatrix(c.normalization.stddev);
  w.PutMatrix(c.params.force_scale);
  std::uint32_t count = 0;
  VisitTensors(c.params.weights,
               [&](const std::string&, const Eigen::MatrixXd&) { ++count; });
  w.Put<std::uint32_t>(count);
  VisitTensors(c.params.weights,
               [&](const std::string& name, const Eigen::MatrixXd& m) {
                 w.PutString(name);
                 w.PutMatrix(m);
               });
  return std::move(w.str());
}

Checkpoint DeserializeCheckpoint(const std::string& bytes) {
  if (bytes.size() < sizeof(kMagic) ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    Fail(ErrorKind::kIo, "not a checkpoint file (bad magic)");
  }
  const std::string body = bytes.substr(sizeof(kMagic));
  Reader r(body);
  const auto version = r.Get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    Fail(ErrorKind::kIo, "unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint c;
  c.config_hash = r.Get<std::uint64_t>();
  c.iteration = r.Get<std::int32_t>();
  c.window = r.Get<std::int32_t>();
  c.stride = r.Get<std::int32_t>();
  c.split = r.Get<double>();
  if (c.window < 2 || c.stride < 1 || !(c.split > 0.0 && c.split < 1.0)) {
    Fail(ErrorKind::kIo, "checkpoint has invalid windowing metadata");
  }
  NetworkConfig nc;
  nc.input_size = r.Get<std::int32_t>();
  nc.hidden = r.Get<std::int32_t>();
  nc.layers = r.Get<std::int32_t>();
  nc.fc = r.Get<std::int32_t>();
  nc.muscles = r.Get<std::int32_t>();
  nc.dropout = r.Get<double>();
  nc.Validate();
  const auto names = r.Get<std::uint32_t>();
  for (std::uint32_t i = 0; i < names; ++i) c.muscle_names.push_back(r.GetString());
  c.normalization.mean = r.GetMatrix();
  c.normalization.stddev = r.GetMatrix();
  const Eigen::MatrixXd scale = r.GetMatrix();
  if (static_cast<int>(c.muscle_names.size()) != nc.muscles || scale.rows() != 1 ||
      scale.cols() != nc.muscles || c.normalization.mean.cols() != nc.input_size ||
      c.normalization.stddev.cols() != nc.input_size) {
    Fail(ErrorKind::kIo, "checkpoint metadata is inconsistent with its network shape");
  }

  // Shapes come from the config; the stored tensors must agree.
  c.params = InitParams(nc, 0, scale.row(0));
  const auto count = r.Get<std::uint32_t>();
  std::uint32_t seen = 0;
  VisitTensors(c.params.weights, [&](const std::string& name, Eigen::MatrixXd& m) {
    if (seen++ >= count) Fail(ErrorKind::kIo, "checkpoint missing tensor " + name);
    const std::string stored = r.GetString();
    Eigen::MatrixXd value = r.GetMatrix();
    if (stored != name || value.rows() != m.rows() || value.cols() != m.cols()) {
      std::ostringstream os;
      os << "checkpoint tensor '" << stored << "' " << value.rows() << "x"
         << value.cols() << " does not match expected '" << name << "' "
         << m.rows() << "x" << m.cols();
      Fail(ErrorKind::kIo, os.str());
    }
    m = std::move(value);
  });
  if (seen != count || !r.done()) Fail(ErrorKind::kIo, "checkpoint has trailing data");
  return c;
}

void SaveCheckpoint(const std::string& path, const Checkpoint& ckpt) {
  WriteFileAtomic(path, SerializeCheckpoint(ckpt));
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open checkpoint '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return DeserializeCheckpoint(ss.str());
}

}  // namespace myodyn
