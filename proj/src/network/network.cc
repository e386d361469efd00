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

#include "myodyn/network/network.h"

#include <cmath>
#include <sstream>

#include "myodyn/error.h"

namespace myodyn {

using ad::Axis;
using ad::Tape;
using ad::Var;
using Eigen::MatrixXd;

void NetworkConfig::Validate() const {
  if (input_size < 1 || hidden < 1 || layers < 1 || fc < 1 || muscles < 1) {
    Fail(ErrorKind::kConfig, "network sizes must all be >= 1");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    Fail(ErrorKind::kConfig, "dropout rate must lie in [0, 1)");
  }
}

NetworkParams InitParams(const NetworkConfig& config, std::uint64_t seed,
                         const Eigen::RowVectorXd& force_scale) {
  config.Validate();
  if (force_scale.size() != config.muscles) {
    Fail(ErrorKind::kDimension, "force scale length differs from muscle count");
  }
  NetworkParams p;
  p.config = config;
  p.force_scale = force_scale;
  const int h = config.hidden;
  auto shape_dir = [h](GruDirection<MatrixXd>& d, int in) {
    d.w_z.resize(in, h);
    d.w_r.resize(in, h);
    d.w_h.resize(in, h);
    d.u_z.resize(h, h);
    d.u_r.resize(h, h);
    d.u_h.resize(h, h);
    d.b_z.resize(1, h);
    d.b_r.resize(1, h);
    d.b_h.resize(1, h);
  };
  auto& w = p.weights;
  w.gru.resize(config.layers);
  for (int l = 0; l < config.layers; ++l) {
    const int in = l == 0 ? config.input_size : 2 * h;
    shape_dir(w.gru[l].fwd, in);
    shape_dir(w.gru[l].bwd, in);
  }
  w.fc1_w.resize(2 * h, config.fc);
  w.fc1_b.resize(1, config.fc);
  w.fc2_w.resize(config.fc, config.fc);
  w.fc2_b.resize(1, config.fc);
  w.head_w.resize(config.fc, 2 * config.muscles);
  w.head_b.resize(1, 2 * config.muscles);

  std::mt19937_64 rng(seed);
  VisitTensors(w, [&](const std::string&, MatrixXd& m) {
    if (m.rows() == 1) {
      m.setZero();
      return;
    }
    const double bound = 1.0 / std::sqrt(static_cast<double>(m.rows()));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = u(rng);
    }
  });
  return p;
}

NetworkWeights<Var> BindWeights(Tape& tape, const NetworkParams& params,
                                bool trainable) {
  NetworkWeights<Var> vars;
  vars.gru.resize(params.weights.gru.size());
  std::vector<Var*> slots;
  VisitTensors(vars, [&](const std::string&, Var& v) { slots.push_back(&v); });
  std::size_t k = 0;
  VisitTensors(params.weights, [&](const std::string&, const MatrixXd& m) {
    *slots[k++] = trainable ? tape.Leaf(m) : tape.Constant(m);
  });
  return vars;
}

std::vector<MatrixXd> CollectGradients(const ad::Gradients& grads,
                                       const NetworkWeights<Var>& vars) {
  std::vector<MatrixXd> out;
  VisitTensors(vars, [&](const std::string&, const Var& v) {
    out.push_back(grads[v]);
  });
  return out;
}

Var GruCellStep(const GruDirection<Var>& p, const Var& x, const Var& h_prev) {
  const Var z = ad::Sigmoid(ad::MatMul(x, p.w_z) + ad::MatMul(h_prev, p.u_z) + p.b_z);
  const Var r = ad::Sigmoid(ad::MatMul(x, p.w_r) + ad::MatMul(h_prev, p.u_r) + p.b_r);
  const Var cand =
      ad::Tanh(ad::MatMul(x, p.w_h) + ad::MatMul(r * h_prev, p.u_h) + p.b_h);
  return (1.0 - z) * h_prev + z * cand;
}

Var RunGruDirection(const GruDirection<Var>& p, const Var& inputs, int steps,
                    int batch, bool reverse) {
  if (inputs.rows() != static_cast<Eigen::Index>(steps) * batch) {
    std::ostringstream os;
    os << "GRU input has " << inputs.rows() << " rows, expected " << steps
       << " x " << batch;
    Fail(ErrorKind::kDimension, os.str());
  }
  Tape& tape = *inputs.tape();
  const Eigen::Index h = p.u_z.cols();
  const Var w_cat = ad::Concat(std::vector<Var>{p.w_z, p.w_r, p.w_h}, Axis::kCols);
  const Var b_cat = ad::Concat(std::vector<Var>{p.b_z, p.b_r, p.b_h}, Axis::kCols);
  const Var u_zr = ad::Concat(std::vector<Var>{p.u_z, p.u_r}, Axis::kCols);
  // Input projections for every step at once.
  const Var proj = ad::MatMul(inputs, w_cat) + b_cat;

  Var state = tape.Constant(MatrixXd::Zero(batch, h));
  std::vector<Var> outputs(steps);
  for (int s = 0; s < steps; ++s) {
    const int t = reverse ? steps - 1 - s : s;
    const Var x_t = ad::Slice(proj, static_cast<Eigen::Index>(t) * batch, 0,
                              batch, 3 * h);
    const Var gates =
        ad::Sigmoid(ad::Slice(x_t, 0, 0, batch, 2 * h) + ad::MatMul(state, u_zr));
    const Var z = ad::Slice(gates, 0, 0, batch, h);
    const Var r = ad::Slice(gates, 0, h, batch, h);
    const Var cand = ad::Tanh(ad::Slice(x_t, 0, 2 * h, batch, h) +
                              ad::MatMul(r * state, p.u_h));
    state = state + z * (cand - state);
    outputs[t] = state;
  }
  return ad::Concat(outputs, Axis::kRows);
}

Var BiGruForward(const std::vector<GruLayer<Var>>& layers, const Var& inputs,
                 int steps, int batch) {
  Var x = inputs;
  for (const GruLayer<Var>& layer : layers) {
    const Var f = RunGruDirection(layer.fwd, x, steps, batch, false);
    const Var b = RunGruDirection(layer.bwd, x, steps, batch, true);
    x = ad::Concat(std::vector<Var>{f, b}, Axis::kCols);
  }
  return x;
}

MatrixXd DropoutMask(Eigen::Index rows, Eigen::Index cols, double rate,
                     std::mt19937_64& rng) {
  const double keep = 1.0 - rate;
  MatrixXd mask(rows, cols);
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    // 53 random bits -> uniform [0, 1)
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    mask(i) = u < keep ? 1.0 / keep : 0.0;
  }
  return mask;
}

NetworkOutputs NetworkForward(Tape& tape, const NetworkParams& params,
                              const NetworkWeights<Var>& vars,
                              const MatrixXd& inputs, int steps, Mode mode,
                              std::mt19937_64* rng) {
  const NetworkConfig& cfg = params.config;
  if (steps < 1 || inputs.rows() % steps != 0 ||
      inputs.cols() != cfg.input_size) {
    std::ostringstream os;
    os << "network input " << inputs.rows() << "x" << inputs.cols()
       << " does not split into " << steps << " steps of width "
       << cfg.input_size;
    Fail(ErrorKind::kDimension, os.str());
  }
  const int batch = static_cast<int>(inputs.rows() / steps);
  const bool drop = mode == Mode::kTrain && cfg.dropout > 0.0;
  if (drop && rng == nullptr) {
    Fail(ErrorKind::kContract, "train-mode dropout needs a random generator");
  }

  const Var x = tape.Constant(inputs);
  const Var features = BiGruForward(vars.gru, x, steps, batch);
  Var h1 = ad::Relu(ad::MatMul(features, vars.fc1_w) + vars.fc1_b);
  if (drop) h1 = h1 * tape.Constant(DropoutMask(h1.rows(), h1.cols(), cfg.dropout, *rng));
  Var h2 = ad::Relu(ad::MatMul(h1, vars.fc2_w) + vars.fc2_b);
  if (drop) h2 = h2 * tape.Constant(DropoutMask(h2.rows(), h2.cols(), cfg.dropout, *rng));
  const Var out = ad::MatMul(h2, vars.head_w) + vars.head_b;

  const Eigen::Index rows = out.rows();
  const Eigen::Index n = cfg.muscles;
  NetworkOutputs o;
  o.activations = ad::Slice(out, 0, 0, rows, n);
  o.forces = ad::Slice(out, 0, n, rows, n) *
             tape.Constant(MatrixXd(params.force_scale));
  return o;
}

}  // namespace myodyn
