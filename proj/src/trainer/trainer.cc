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

#include "myodyn/trainer/trainer.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "myodyn/autodiff/tape.h"
#include "myodyn/error.h"
#include "myodyn/harness/evaluate.h"
#include "myodyn/harness/io.h"
#include "myodyn/log.h"
#include "myodyn/trainer/adam.h"

namespace myodyn {
namespace {

// Independent streams so that, e.g., changing the dropout rate does not
// change the batch order.
constexpr std::uint64_t kShuffleStream = 0x5deece66dull;
constexpr std::uint64_t kDropoutStream = 0x2545f4914f6cdd1dull;

Checkpoint MakeCheckpoint(const NetworkParams& params,
                          const InputNormalization& norm,
                          const PreparedData& data, const TrainConfig& config,
                          int iteration) {
  Checkpoint c;
  c.params = params;
  c.normalization = norm;
  c.muscle_names = data.muscles;
  c.window = config.window;
  c.stride = config.stride;
  c.split = config.split;
  c.config_hash = config.Hash();
  c.iteration = iteration;
  return c;
}

bool AllFinite(const LossBreakdown& b, double objective) {
  return std::isfinite(b.l_m) && std::isfinite(b.l_f) && std::isfinite(b.l_p) &&
         std::isfinite(b.l_b) && std::isfinite(b.total) && std::isfinite(objective);
}

}  // namespace

TrainResult Train(const TrainConfig& config, const PreparedData& data,
                  const TrainCallback& callback) {
  config.Validate();
  if (config.loss_mode == LossMode::kSupervised && !data.has_labels) {
    Fail(ErrorKind::kConfig, "supervised training needs oracle labels");
  }
  TrainResult result;
  const auto lengths = data.Lengths();
  result.split = SplitTrainTest(
      lengths, SegmentWindows(lengths, config.window, config.stride),
      config.window, config.split);
  const std::vector<WindowRef>& train = result.split.train;
  const std::vector<WindowRef>& test = result.split.test;
  if (train.empty()) Fail(ErrorKind::kConfig, "no training windows");
  const InputNormalization norm = FitNormalization(data, train, config.window);

  NetworkConfig net = config.network;
  net.muscles = static_cast<int>(data.muscles.size());
  NetworkParams params = InitParams(net, config.seed, data.f_o);

  std::vector<Eigen::MatrixXd*> slots;
  std::vector<std::string> names;
  VisitTensors(params.weights, [&](const std::string& name, Eigen::MatrixXd& m) {
    slots.push_back(&m);
    names.push_back(name);
  });
  AdamState adam = InitAdam(std::span<Eigen::MatrixXd* const>(slots));

  std::mt19937_64 shuffle_rng(config.seed ^ kShuffleStream);
  std::mt19937_64 dropout_rng(config.seed ^ kDropoutStream);
  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t batch_size =
      std::min(train.size(), static_cast<std::size_t>(config.batch_size));
  std::size_t cursor = order.size();  // forces a shuffle on the first step

  const bool select_best = data.has_labels && !test.empty();
  double best_r2f = -std::numeric_limits<double>::infinity();
  bool have_best = false;
  std::vector<WindowRef> batch_refs(batch_size);

  int last_good_iteration = 0;
  NetworkParams last_good = params;
  for (int it = 1; it <= config.max_iters; ++it) {
    if (cursor + batch_size > order.size()) {
      std::shuffle(order.begin(), order.end(), shuffle_rng);
      cursor = 0;
    }
    for (std::size_t k = 0; k < batch_size; ++k) {
      batch_refs[k] = train[order[cursor + k]];
    }
    cursor += batch_size;
    const Batch batch = AssembleBatch(data, batch_refs, config.window, norm);

    ad::Tape tape;
    const auto vars = BindWeights(tape, params);
    const NetworkOutputs y = NetworkForward(tape, params, vars, batch.inputs,
                                            batch.steps, Mode::kTrain, &dropout_rng);
    const KnowledgeLoss knowledge =
        LossTotal(y.activations, y.forces, batch.physics, config.omega,
                  config.beta, config.enabled_losses);
    ad::Var objective = knowledge.total;
    if (config.loss_mode == LossMode::kSupervised) {
      objective = LossSupervisedMse(y.activations, y.forces, batch.label_a,
                                    batch.label_f)
                      .total;
    }
    LossRecord record{it, knowledge.breakdown, objective.scalar()};
    if (!AllFinite(record.knowledge, record.objective)) {
      result.diverged = true;
      result.message = "training diverged at iteration " + std::to_string(it) +
                       ": loss is not finite";
      break;
    }
    const ad::Gradients grads = tape.Backward(objective);
    const std::vector<Eigen::MatrixXd> g = CollectGradients(grads, vars);
    try {
      AdamStep(slots, names, g, adam, config.lr);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kNumeric) throw;
      result.diverged = true;
      result.message = "training diverged at iteration " + std::to_string(it) +
                       ": " + e.what();
      break;
    }
    last_good = params;
    last_good_iteration = it;
    result.trace.push_back(record);
    if (callback && !callback(record)) break;

    if (select_best && (it % config.eval_every == 0 || it == config.max_iters)) {
      const Checkpoint candidate = MakeCheckpoint(params, norm, data, config, it);
      const MetricsReport m =
          ComputeMetrics(PredictWindows(candidate, data, test), data);
      result.evals.push_back({it, m.r2_a, m.r2_f, m.rmse_a, m.rmse_f});
      if (std::isfinite(m.r2_f) && (!have_best || m.r2_f > best_r2f)) {
        best_r2f = m.r2_f;
        result.checkpoint = candidate;
        have_best = true;
      }
    }
  }
  if (result.diverged) LogWarning(result.message);
  if (!have_best) {
    result.checkpoint =
        MakeCheckpoint(last_good, norm, data, config, last_good_iteration);
  }
  return result;
}

void WriteLossTraceCsv(const std::string& path,
                       const std::vector<LossRecord>& trace) {
  std::ostringstream os;
  os << "iteration,l_m,l_f,l_p,l_b,total,objective\n";
  for (const LossRecord& r : trace) {
    os << r.iteration << ',' << FormatNumber(r.knowledge.l_m) << ','
       << FormatNumber(r.knowledge.l_f) << ',' << FormatNumber(r.knowledge.l_p)
       << ',' << FormatNumber(r.knowledge.l_b) << ','
       << FormatNumber(r.knowledge.total) << ',' << FormatNumber(r.objective)
       << '\n';
  }
  WriteFileAtomic(path, os.str());
}

void WriteEvalTraceCsv(const std::string& path,
                       const std::vector<EvalRecord>& evals) {
  std::ostringstream os;
  os << "iteration,r2_a,r2_F,rmse_a,rmse_F_N\n";
  for (const EvalRecord& e : evals) {
    os << e.iteration << ',' << FormatNumber(e.r2_a) << ','
       << FormatNumber(e.r2_f) << ',' << FormatNumber(e.rmse_a) << ','
       << FormatNumber(e.rmse_f) << '\n';
  }
  WriteFileAtomic(path, os.str());
}

}  // namespace myodyn
