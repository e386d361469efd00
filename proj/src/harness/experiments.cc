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

#include "myodyn/harness/experiments.h"

#include <cstdio>
#include <sstream>

#include "myodyn/error.h"
#include "myodyn/harness/io.h"
#include "myodyn/log.h"
#include "myodyn/trainer/trainer.h"

namespace myodyn {

ExperimentResult RunExperiment(const std::string& label, const TrainConfig& config,
                               const PreparedData& data) {
  ExperimentResult r;
  r.label = label;
  r.config = config;
  try {
    const TrainResult trained = Train(config, data);
    r.diverged = trained.diverged;
    r.checkpoint_iteration = trained.checkpoint.iteration;
    EvalOptions options;
    options.measure_latency = false;
    r.metrics = Evaluate(trained.checkpoint, data, trained.split.test, options);
    r.ok = true;
  } catch (const std::exception& e) {
    r.error = e.what();
    LogWarning("experiment '" + label + "' failed: " + r.error);
  }
  return r;
}

std::vector<ExperimentResult> RunAblation(const TrainConfig& base,
                                          const ExperimentRunner& run) {
  struct Cell {
    const char* label;
    const char* mask;
  };
  static constexpr Cell kCells[] = {
      {"no_b", "mfp"}, {"no_p", "mfb"}, {"no_f", "mpb"}, {"no_m", "fpb"},
      {"full", "mfpb"}};
  std::vector<ExperimentResult> out;
  for (const Cell& cell : kCells) {
    TrainConfig c = base;
    c.loss_mode = LossMode::kKnowledge;
    c.enabled_losses = LossMask::Parse(cell.mask);
    out.push_back(run(cell.label, c));
  }
  return out;
}

std::vector<ExperimentResult> RunAblation(const TrainConfig& base,
                                          const PreparedData& data) {
  return RunAblation(base, [&](const std::string& label, const TrainConfig& c) {
    return RunExperiment(label, c, data);
  });
}

std::vector<ExperimentResult> SweepOmega(const TrainConfig& base,
                                         std::span<const double> grid,
                                         const ExperimentRunner& run) {
  if (grid.empty()) Fail(ErrorKind::kConfig, "omega grid is empty");
  std::vector<ExperimentResult> out;
  for (double omega : grid) {
    TrainConfig c = base;
    c.omega = omega;
    std::string label = "omega=" + FormatNumber(omega);
    try {
      c.Validate();
      out.push_back(run(label, c));
    } catch (const std::exception& e) {
      ExperimentResult r;
      r.label = std::move(label);
      r.config = c;
      r.error = e.what();
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<ExperimentResult> SweepOmega(const TrainConfig& base,
                                         const PreparedData& data,
                                         std::span<const double> grid) {
  return SweepOmega(base, grid, [&](const std::string& label, const TrainConfig& c) {
    return RunExperiment(label, c, data);
  });
}

void WriteExperimentsCsv(const std::string& path,
                         const std::vector<ExperimentResult>& results) {
  std::ostringstream os;
  os << "label,enabled_losses,loss_mode,omega,r2_a,r2_F,rmse_a,rmse_F_N,"
        "checkpoint_iteration,status\n";
  for (const ExperimentResult& r : results) {
    os << r.label << ',' << r.config.enabled_losses.ToString() << ','
       << LossModeName(r.config.loss_mode) << ',' << FormatNumber(r.config.omega);
    if (r.ok) {
      os << ',' << FormatNumber(r.metrics.r2_a) << ',' << FormatNumber(r.metrics.r2_f)
         << ',' << FormatNumber(r.metrics.rmse_a) << ','
         << FormatNumber(r.metrics.rmse_f) << ',' << r.checkpoint_iteration << ','
         << (r.diverged ? "diverged" : "ok");
    } else {
      os << ",,,,,,error";
    }
    os << '\n';
  }
  WriteFileAtomic(path, os.str());
}

std::string FormatExperimentsTable(const std::vector<ExperimentResult>& results) {
  std::ostringstream os;
  char line[200];
  std::snprintf(line, sizeof line, "%-12s %-6s %8s %9s %9s %9s %11s\n", "label",
                "losses", "omega", "R2(a)", "R2(F)", "RMSE(a)", "RMSE(F) N");
  os << line;
  for (const ExperimentResult& r : results) {
    if (r.ok) {
      std::snprintf(line, sizeof line, "%-12s %-6s %8g %9.4f %9.4f %9.4f %11.3f%s\n",
                    r.label.c_str(), r.config.enabled_losses.ToString().c_str(),
                    r.config.omega, r.metrics.r2_a, r.metrics.r2_f, r.metrics.rmse_a,
                    r.metrics.rmse_f, r.diverged ? "  (diverged)" : "");
    } else {
      std::snprintf(line, sizeof line, "%-12s %-6s %8g  error: %s\n", r.label.c_str(),
                    r.config.enabled_losses.ToString().c_str(), r.config.omega,
                    r.error.c_str());
    }
    os << line;
  }
  return os.str();
}

}  // namespace myodyn
