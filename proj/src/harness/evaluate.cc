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

#include "myodyn/harness/evaluate.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "myodyn/autodiff/tape.h"
#include "myodyn/error.h"
#include "myodyn/harness/io.h"
#include "myodyn/harness/metrics.h"

namespace myodyn {

std::size_t PredictionSet::CoveredSamples() const {
  std::size_t n = 0;
  for (const auto& c : count) {
    for (int k : c) n += k > 0;
  }
  return n;
}

PredictionSet PredictWindows(const Checkpoint& ckpt, const PreparedData& data,
                             std::span<const WindowRef> windows,
                             int batch_size) {
  if (ckpt.muscle_names != data.muscles) {
    Fail(ErrorKind::kDimension, "checkpoint muscles do not match the data");
  }
  const auto n = static_cast<Eigen::Index>(data.muscles.size());
  const int w = ckpt.window;
  PredictionSet out;
  out.muscles = data.muscles;
  for (const auto& t : data.trajectories) {
    const auto len = static_cast<Eigen::Index>(t.size());
    out.a.push_back(Eigen::MatrixXd::Zero(len, n));
    out.forces.push_back(Eigen::MatrixXd::Zero(len, n));
    out.count.emplace_back(t.size(), 0);
  }
  out.raw_activations.resize(static_cast<Eigen::Index>(windows.size()) * w, n);
  Eigen::Index raw_row = 0;
  for (std::size_t begin = 0; begin < windows.size();
       begin += static_cast<std::size_t>(batch_size)) {
    const std::size_t end =
        std::min(windows.size(), begin + static_cast<std::size_t>(batch_size));
    const auto chunk = windows.subspan(begin, end - begin);
    const Batch batch = AssembleBatch(data, chunk, w, ckpt.normalization);
    ad::Tape tape;
    const auto vars = BindWeights(tape, ckpt.params, /*trainable=*/false);
    const NetworkOutputs y = NetworkForward(tape, ckpt.params, vars, batch.inputs,
                                            w, Mode::kEval, nullptr);
    const Eigen::MatrixXd& a = y.activations.value();
    const Eigen::MatrixXd& f = y.forces.value();
    const auto b = static_cast<Eigen::Index>(chunk.size());
    for (Eigen::Index j = 0; j < b; ++j) {
      const WindowRef& ref = chunk[j];
      for (Eigen::Index t = 0; t < w; ++t) {
        const Eigen::Index src = t * b + j;
        const Eigen::Index dst = static_cast<Eigen::Index>(ref.start) + t;
        out.a[ref.trajectory].row(dst) += a.row(src);
        out.forces[ref.trajectory].row(dst) += f.row(src);
        ++out.count[ref.trajectory][dst];
        out.raw_activations.row(raw_row++) = a.row(src);
      }
    }
  }
  for (std::size_t i = 0; i < out.a.size(); ++i) {
    for (std::size_t t = 0; t < out.count[i].size(); ++t) {
      if (out.count[i][t] > 1) {
        out.a[i].row(t) /= out.count[i][t];
        out.forces[i].row(t) /= out.count[i][t];
      }
    }
  }
  return out;
}

MetricsReport ComputeMetrics(const PredictionSet& predictions,
                             const PreparedData& data) {
  if (!data.has_labels) Fail(ErrorKind::kContract, "evaluation needs labels");
  if (predictions.a.size() != data.trajectories.size() ||
      predictions.muscles != data.muscles) {
    Fail(ErrorKind::kDimension, "predictions are not aligned with the labels");
  }
  const std::size_t n = data.muscles.size();
  MetricsReport report;
  report.samples = predictions.CoveredSamples();
  if (report.samples < 2) {
    Fail(ErrorKind::kContract, "evaluation needs at least two covered samples");
  }
  std::vector<std::vector<double>> ya(n), yha(n), yf(n), yhf(n);
  for (std::size_t i = 0; i < data.trajectories.size(); ++i) {
    const PreparedTrajectory& p = data.trajectories[i];
    if (static_cast<std::size_t>(predictions.a[i].rows()) != p.size()) {
      Fail(ErrorKind::kDimension, "prediction length differs from trajectory " +
                                      std::to_string(p.trajectory_id));
    }
    for (std::size_t t = 0; t < p.size(); ++t) {
      if (predictions.count[i][t] == 0) continue;
      for (std::size_t m = 0; m < n; ++m) {
        ya[m].push_back(p.label_a(t, m));
        yha[m].push_back(predictions.a[i](t, m));
        yf[m].push_back(p.label_f(t, m));
        yhf[m].push_back(predictions.forces[i](t, m));
      }
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto r2 = [&](const std::string& what, const std::vector<double>& y,
                const std::vector<double>& yh) {
    try {
      return RSquared(y, yh);
    } catch (const Error& e) {
      report.diagnostics.push_back(what + ": " + e.what());
      return nan;
    }
  };
  double sum_r2a = 0.0, sum_r2f = 0.0;
  int def_a = 0, def_f = 0;
  for (std::size_t m = 0; m < n; ++m) {
    MuscleMetrics mm;
    mm.name = data.muscles[m];
    mm.rmse_a = Rmse(ya[m], yha[m]);
    mm.rmse_f = Rmse(yf[m], yhf[m]);
    mm.r2_a = r2("R2(a) " + mm.name, ya[m], yha[m]);
    mm.r2_f = r2("R2(F) " + mm.name, yf[m], yhf[m]);
    report.rmse_a += mm.rmse_a / static_cast<double>(n);
    report.rmse_f += mm.rmse_f / static_cast<double>(n);
    if (!std::isnan(mm.r2_a)) sum_r2a += mm.r2_a, ++def_a;
    if (!std::isnan(mm.r2_f)) sum_r2f += mm.r2_f, ++def_f;
    report.muscles.push_back(mm);
  }
  report.r2_a = def_a > 0 ? sum_r2a / def_a : nan;
  report.r2_f = def_f > 0 ? sum_r2f / def_f : nan;
  return report;
}

LatencyStats MeasureLatency(const Checkpoint& ckpt, const PreparedData& data,
                            std::span<const WindowRef> windows,
                            std::size_t runs) {
  LatencyStats stats;
  if (windows.empty() || runs == 0) return stats;
  std::vector<Batch> inputs;
  const std::size_t distinct = std::min(windows.size(), runs);
  inputs.reserve(distinct);
  for (std::size_t k = 0; k < distinct; ++k) {
    inputs.push_back(
        AssembleBatch(data, windows.subspan(k, 1), ckpt.window, ckpt.normalization));
  }
  std::vector<double> ms;
  ms.reserve(runs);
  double sink = 0.0;
  for (std::size_t k = 0; k < runs; ++k) {
    const Batch& b = inputs[k % distinct];
    const auto t0 = std::chrono::steady_clock::now();
    ad::Tape tape;
    const auto vars = BindWeights(tape, ckpt.params, /*trainable=*/false);
    const NetworkOutputs y = NetworkForward(tape, ckpt.params, vars, b.inputs,
                                            ckpt.window, Mode::kEval, nullptr);
    sink += y.forces.value()(0, 0);
    const auto t1 = std::chrono::steady_clock::now();
    ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  (void)sink;
  std::sort(ms.begin(), ms.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(ms.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, ms.size() - 1);
    return ms[lo] + (pos - static_cast<double>(lo)) * (ms[hi] - ms[lo]);
  };
  stats.median_ms = quantile(0.5);
  stats.p95_ms = quantile(0.95);
  stats.runs = runs;
  return stats;
}

MetricsReport Evaluate(const Checkpoint& ckpt, const PreparedData& data,
                       std::span<const WindowRef> windows,
                       const EvalOptions& options, PredictionSet* predictions) {
  PredictionSet pred = PredictWindows(ckpt, data, windows);
  MetricsReport report = ComputeMetrics(pred, data);
  report.windows = windows.size();
  if (options.measure_latency) {
    const LatencyStats lat =
        MeasureLatency(ckpt, data, windows, options.latency_runs);
    report.latency_median_ms = lat.median_ms;
    report.latency_p95_ms = lat.p95_ms;
    report.latency_runs = lat.runs;
  }
  if (predictions != nullptr) *predictions = std::move(pred);
  return report;
}

void WriteMetricsCsv(const std::string& path, const MetricsReport& report) {
  std::ostringstream os;
  os << "metric,muscle,value\n";
  auto row = [&](const char* metric, const std::string& muscle, double v) {
    os << metric << ',' << muscle << ',' << FormatNumber(v) << '\n';
  };
  for (const auto& m : report.muscles) {
    row("rmse_a", m.name, m.rmse_a);
    row("rmse_F_N", m.name, m.rmse_f);
    row("r2_a", m.name, m.r2_a);
    row("r2_F", m.name, m.r2_f);
  }
  row("rmse_a", "mean", report.rmse_a);
  row("rmse_F_N", "mean", report.rmse_f);
  row("r2_a", "mean", report.r2_a);
  row("r2_F", "mean", report.r2_f);
  row("samples", "all", static_cast<double>(report.samples));
  row("windows", "all", static_cast<double>(report.windows));
  row("latency_median_ms", "all", report.latency_median_ms);
  row("latency_p95_ms", "all", report.latency_p95_ms);
  WriteFileAtomic(path, os.str());
}

std::string FormatMetricsTable(const MetricsReport& report) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %10s %10s %12s %10s\n", "muscle",
                "RMSE(a)", "R2(a)", "RMSE(F) N", "R2(F)");
  os << line;
  auto emit = [&](const std::string& name, double ra, double r2a, double rf,
                  double r2f) {
    std::snprintf(line, sizeof line, "%-10s %10.4f %10.4f %12.3f %10.4f\n",
                  name.c_str(), ra, r2a, rf, r2f);
    os << line;
  };
  for (const auto& m : report.muscles) emit(m.name, m.rmse_a, m.r2_a, m.rmse_f, m.r2_f);
  emit("mean", report.rmse_a, report.r2_a, report.rmse_f, report.r2_f);
  os << report.samples << " samples from " << report.windows << " windows";
  if (report.latency_runs > 0) {
    std::snprintf(line, sizeof line,
                  "; latency median %.3f ms, p95 %.3f ms per window (%zu runs)",
                  report.latency_median_ms, report.latency_p95_ms,
                  report.latency_runs);
    os << line;
  }
  os << '\n';
  for (const auto& d : report.diagnostics) os << "warning: " << d << '\n';
  return os.str();
}

void WritePredictionsCsv(const std::string& path, const PredictionSet& predictions,
                         const PreparedData& data) {
  std::ostringstream os;
  os << "trajectory_id,sample,time_s";
  for (const auto& m : predictions.muscles) os << ",a_hat_" << m;
  for (const auto& m : predictions.muscles) os << ",F_hat_" << m << "_N";
  os << '\n';
  for (std::size_t i = 0; i < predictions.a.size(); ++i) {
    const PreparedTrajectory& p = data.trajectories.at(i);
    for (std::size_t t = 0; t < predictions.count[i].size(); ++t) {
      if (predictions.count[i][t] == 0) continue;
      os << p.trajectory_id << ',' << t << ',' << FormatNumber(p.time[t]);
      for (Eigen::Index m = 0; m < predictions.a[i].cols(); ++m) {
        os << ',' << FormatNumber(predictions.a[i](t, m));
      }
      for (Eigen::Index m = 0; m < predictions.forces[i].cols(); ++m) {
        os << ',' << FormatNumber(predictions.forces[i](t, m));
      }
      os << '\n';
    }
  }
  WriteFileAtomic(path, os.str());
}

}  // namespace myodyn
