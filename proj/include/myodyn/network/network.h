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

#ifndef MYODYN_NETWORK_NETWORK_H_
#define MYODYN_NETWORK_NETWORK_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "myodyn/autodiff/tape.h"

// Sequence-to-sequence surrogate: a stacked bidirectional GRU, two rectified
// fully connected layers with dropout, and a linear head emitting N
// activations and N forces per time step.
//
// Batched tensors are time-major: row t * B + b holds step t of window b.
// Weights act on row vectors, so a layer computes x * W + b.

namespace myodyn {

struct NetworkConfig {
  int input_size = 3;
  int hidden = 64;  // per direction
  int layers = 2;
  int fc = 128;
  int muscles = 5;
  double dropout = 0.3;

  void Validate() const;
};

template <typename T>
struct GruDirection {
  T w_z, w_r, w_h;  // input -> hidden
  T u_z, u_r, u_h;  // hidden -> hidden
  T b_z, b_r, b_h;  // 1 x hidden
};

template <typename T>
struct GruLayer {
  GruDirection<T> fwd;
  GruDirection<T> bwd;
};

template <typename T>
struct NetworkWeights {
  std::vector<GruLayer<T>> gru;
  T fc1_w, fc1_b;
  T fc2_w, fc2_b;
  T head_w, head_b;
};

namespace internal {

template <typename Weights, typename F>
void VisitTensorsImpl(Weights& w, F&& f) {
  auto dir = [&](const std::string& p, auto& d) {
    f(p + ".w_z", d.w_z);
    f(p + ".w_r", d.w_r);
    f(p + ".w_h", d.w_h);
    f(p + ".u_z", d.u_z);
    f(p + ".u_r", d.u_r);
    f(p + ".u_h", d.u_h);
    f(p + ".b_z", d.b_z);
    f(p + ".b_r", d.b_r);
    f(p + ".b_h", d.b_h);
  };
  for (std::size_t l = 0; l < w.gru.size(); ++l) {
    dir("gru" + std::to_string(l) + ".fwd", w.gru[l].fwd);
    dir("gru" + std::to_string(l) + ".bwd", w.gru[l].bwd);
  }
  f(std::string("fc1.w"), w.fc1_w);
  f(std::string("fc1.b"), w.fc1_b);
  f(std::string("fc2.w"), w.fc2_w);
  f(std::string("fc2.b"), w.fc2_b);
  f(std::string("head.w"), w.head_w);
  f(std::string("head.b"), w.head_b);
}

}  // namespace internal

// Calls f(name, tensor) for every tensor in a fixed order.
template <typename T, typename F>
void VisitTensors(NetworkWeights<T>& w, F&& f) {
  internal::VisitTensorsImpl(w, f);
}
template <typename T, typename F>
void VisitTensors(const NetworkWeights<T>& w, F&& f) {
  internal::VisitTensorsImpl(w, f);
}

struct NetworkParams {
  NetworkConfig config;
  NetworkWeights<Eigen::MatrixXd> weights;
  // Per-muscle multiplier on the force outputs (the muscles' max isometric
  // forces), so the head regresses forces in units of f_o. Not trained.
  Eigen::RowVectorXd force_scale;
};

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.
NetworkParams InitParams(const NetworkConfig& config, std::uint64_t seed,
                         const Eigen::RowVectorXd& force_scale);

// Tape nodes mirroring `params`: leaves when trainable, constants otherwise
// (inference records no backward closures).
NetworkWeights<ad::Var> BindWeights(ad::Tape& tape, const NetworkParams& params,
                                    bool trainable = true);

// Gradient of each bound tensor, in VisitTensors order.
std::vector<Eigen::MatrixXd> CollectGradients(const ad::Gradients& grads,
                                              const NetworkWeights<ad::Var>& vars);

// One GRU step: z = sig(x Wz + h Uz + bz), r = sig(x Wr + h Ur + br),
// h~ = tanh(x Wh + (r . h) Uh + bh), h' = (1 - z) . h + z . h~.
ad::Var GruCellStep(const GruDirection<ad::Var>& p, const ad::Var& x,
                    const ad::Var& h_prev);

// Runs one direction over a time-major (T*B) x in sequence and returns the
// (T*B) x H hidden states in time order.
ad::Var RunGruDirection(const GruDirection<ad::Var>& p, const ad::Var& inputs,
                        int steps, int batch, bool reverse);

// Stacked bidirectional GRU over a time-major (T*B) x in sequence. Returns
// (T*B) x 2H features, each row [h_fwd, h_bwd].
ad::Var BiGruForward(const std::vector<GruLayer<ad::Var>>& layers,
                     const ad::Var& inputs, int steps, int batch);

enum class Mode { kTrain, kEval };

struct NetworkOutputs {
  ad::Var activations;  // (T*B) x N, unbounded
  ad::Var forces;       // (T*B) x N, newtons
};

// Full forward pass. Dropout (inverted) is applied after each rectified FC
// layer in train mode only; `rng` may be null in eval mode.
NetworkOutputs NetworkForward(ad::Tape& tape, const NetworkParams& params,
                              const NetworkWeights<ad::Var>& vars,
                              const Eigen::MatrixXd& inputs, int steps,
                              Mode mode, std::mt19937_64* rng);

// Keep-mask scaled by 1/(1 - rate).
Eigen::MatrixXd DropoutMask(Eigen::Index rows, Eigen::Index cols, double rate,
                            std::mt19937_64& rng);

}  // namespace myodyn

#endif  // MYODYN_NETWORK_NETWORK_H_
