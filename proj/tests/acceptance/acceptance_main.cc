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


// End-to-end acceptance run on the synthetic knee task. Prints one PASS/FAIL
// line per criterion and writes the same report to <out>/acceptance_report.txt.
// Exits 0 once every criterion has been evaluated; --strict exits 1 if any
// criterion failed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "../oracles.h"
#include "myodyn/harness/evaluate.h"
#include "myodyn/harness/experiments.h"
#include "myodyn/harness/gradient_audit.h"
#include "myodyn/harness/io.h"
#include "myodyn/log.h"
#include "myodyn/harness/trajectory.h"
#include "myodyn/msk/model.h"
#include "myodyn/msk/muscle.h"
#include "myodyn/msk/joint.h"
#include "myodyn/runtime.h"
#include "myodyn/so/static_optimization.h"
#include "myodyn/trainer/dataset.h"
#include "myodyn/trainer/trainer.h"

namespace myodyn {
namespace {

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

class Report {
 public:
  explicit Report(std::string path) : path_(std::move(path)) {}

  void Criterion(int id, bool pass, const std::string& detail) {
    const std::string line =
        Fmt("[%s] criterion %d: %s", pass ? "PASS" : "FAIL", id, detail.c_str());
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    lines_ << line << "\n";
    failed_ += pass ? 0 : 1;
    ++count_;
  }
  void Note(const std::string& text) {
    std::fprintf(stderr, "%s\n", text.c_str());
    notes_ << "  " << text << "\n";
  }
  int failed() const { return failed_; }
  void Write() const {
    std::ofstream out(path_);
    out << lines_.str() << Fmt("%d/%d criteria passed\n", count_ - failed_, count_)
        << "\nrun log:\n" << notes_.str();
  }

 private:
  std::string path_;
  std::ostringstream lines_, notes_;
  int failed_ = 0;
  int count_ = 0;
};

// Central-difference audit of the differentiation engine.
void GradientAudit(Report& report) {
  const AuditResult a = RunGradientAudit(7);
  report.Criterion(1, a.ok() && a.seconds <= 120.0,
                   Fmt("%zu checks, max rel err %.3e (tol 1e-4), %.2f s (limit 120 s)",
                       a.entries.size(), a.max_rel_err(), a.seconds));
}

// Static-optimization solver against a grid brute force on random problems.
void OracleCorrectness(Report& report) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  double worst_err = 0.0, worst_kkt = 0.0;
  int optimal = 0, failures = 0;
  for (int i = 0; i < 200; ++i) {
    const SoProblem p = testing::RandomTwoMuscleProblem(rng);
    const SoSolution s = SolveTimestep(p);
    double a1 = 0.0, a2 = 0.0;
    if (!testing::BruteForceTwoMuscle(p, 1e-3, &a1, &a2) ||
        s.status == SoStatus::kInfeasible) {
      ++failures;
      continue;
    }
    worst_err = std::max({worst_err, std::abs(s.a[0] - a1), std::abs(s.a[1] - a2)});
    if (s.status == SoStatus::kOptimal) {
      ++optimal;
      worst_kkt = std::max(worst_kkt, testing::InteriorStationarity(p, s.a));
    }
  }
  const double secs = Since(t0);
  report.Criterion(2, failures == 0 && worst_err <= 2e-3 && worst_kkt <= 1e-8 && secs <= 60.0,
                   Fmt("200 problems, max |a - a_grid| %.2e (tol 2e-3), max KKT %.2e on %d "
                       "optimal (tol 1e-8), %d unsolved, %.2f s",
                       worst_err, worst_kkt, optimal, failures, secs));
}

// Torque from oracle activations through the muscle model, independently of
// the solver's own bookkeeping.
void PhysicsRoundTrip(Report& report, const MusculoskeletalModel& model,
                      const KinematicDataset& kin, const std::vector<SoTrajectory>& solved) {
  double worst = 0.0;
  std::size_t feasible = 0, infeasible = 0;
  for (std::size_t i = 0; i < kin.size(); ++i) {
    const KinematicSeries& s = kin[i];
    for (std::size_t t = 0; t < s.size(); ++t) {
      const SoSolution& sol = solved[i].steps[t];
      if (sol.status == SoStatus::kInfeasible) {
        ++infeasible;
        continue;
      }
      ++feasible;
      double tau = 0.0;
      for (std::size_t m = 0; m < model.muscle_count(); ++m) {
        const MuscleParams& mp = model.muscles[m];
        const MuscleState st = ResolveState(mp, s.q[t], s.qdot[t]);
        tau += TendonForce(mp, st, sol.a[m]) * MomentArm(mp.path, s.q[t]);
      }
      const double req = InverseDynamicsTorque(model.joint, s.q[t], s.qdot[t], s.qddot[t]);
      worst = std::max(worst, std::abs(req - tau));
    }
  }
  report.Criterion(3, feasible > 0 && worst <= 1e-6,
                   Fmt("%zu feasible steps, max |tau_req - tau| %.2e N m (tol 1e-6); "
                       "%zu infeasible steps excluded",
                       feasible, worst, infeasible));
}

struct Run {
  TrainResult train;
  MetricsReport metrics;
  PredictionSet predictions;
  double seconds = 0.0;
};

Run TrainAndEvaluate(Report& report, const std::string& label, const TrainConfig& config,
                     const PreparedData& data) {
  const auto t0 = Clock::now();
  Run r;
  r.train = Train(config, data);
  r.seconds = Since(t0);
  EvalOptions opts;
  opts.measure_latency = false;
  r.metrics = Evaluate(r.train.checkpoint, data, r.train.split.test, opts, &r.predictions);
  report.Note(Fmt("%-12s losses=%-4s omega=%-6g mode=%-10s iters=%zu best@%d  R2(a)=%.4f  "
                  "R2(F)=%.4f  %.0f s%s",
                  label.c_str(), config.enabled_losses.ToString().c_str(), config.omega,
                  LossModeName(config.loss_mode), r.train.trace.size(),
                  r.train.checkpoint.iteration, r.metrics.r2_a, r.metrics.r2_f, r.seconds,
                  r.train.diverged ? "  DIVERGED" : ""));
  return r;
}

bool SameTraces(const std::vector<LossRecord>& a, const std::vector<LossRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const LossBreakdown &x = a[i].knowledge, &y = b[i].knowledge;
    if (a[i].iteration != b[i].iteration || a[i].objective != b[i].objective ||
        x.l_m != y.l_m || x.l_f != y.l_f || x.l_p != y.l_p || x.l_b != y.l_b ||
        x.total != y.total) {
      return false;
    }
  }
  return true;
}

int Main(int argc, char** argv) {
  CLI::App app{"Acceptance run on the synthetic knee task"};
  std::string out = "acceptance_out";
  std::string model_path = MYODYN_MODELS_DIR "/knee5.cfg";
  int iters = 0;
  bool strict = false;
  app.add_option("--out", out, "Directory for the report and run artifacts");
  app.add_option("--model", model_path, "Musculoskeletal model")->check(CLI::ExistingFile);
  app.add_option("--iters", iters, "Override max_iters (smoke runs only)");
  app.add_flag("--strict", strict, "Exit 1 if any criterion fails");
  CLI11_PARSE(app, argc, argv);

  ConfigureAllocatorForTraining();
  SetLogLevel(LogLevel::kWarning);
  std::filesystem::create_directories(out);
  Report report(out + "/acceptance_report.txt");

  GradientAudit(report);
  OracleCorrectness(report);

  const MusculoskeletalModel model = LoadModel(model_path);
  const KinematicDataset kin = GenerateTrajectories(TrajectoryOptions{});
  std::vector<SoTrajectory> solved;
  for (const KinematicSeries& s : kin) solved.push_back(SolveTrajectory(model, s));
  PhysicsRoundTrip(report, model, kin, solved);

  const LabelSet labels = LabelsFromOracle(model.muscle_names(), solved);
  const PreparedData data = PrepareData(model, kin, &labels);
  TrainConfig base;  // lr 5e-4, batch 64, 2000 iterations, omega 100, beta 2
  if (iters > 0) base.max_iters = iters;
  report.Note(Fmt("config hash %016llx, max_iters %d",
                  static_cast<unsigned long long>(base.Hash()), base.max_iters));

  const Run full = TrainAndEvaluate(report, "full", base, data);
  const Run again = TrainAndEvaluate(report, "full_repeat", base, data);
  WriteLossTraceCsv(out + "/full_loss_trace.csv", full.train.trace);
  WriteEvalTraceCsv(out + "/full_eval_trace.csv", full.train.evals);
  SaveCheckpoint(out + "/full_checkpoint.bin", full.train.checkpoint);
  WriteMetricsCsv(out + "/full_metrics.csv", full.metrics);

  report.Criterion(4, !full.train.diverged && full.metrics.r2_a >= 0.90 && full.metrics.r2_f >= 0.85,
                   Fmt("test R2(a) %.4f (>= 0.90), R2(F) %.4f (>= 0.85); %zu/%zu train/test "
                       "windows, best checkpoint at iteration %d, %.0f s (target 900 s)",
                       full.metrics.r2_a, full.metrics.r2_f, full.train.split.train.size(),
                       full.train.split.test.size(), full.train.checkpoint.iteration,
                       full.seconds));

  auto variant = [&](const std::string& label, const std::function<void(TrainConfig&)>& edit) {
    TrainConfig c = base;
    edit(c);
    return TrainAndEvaluate(report, label, c, data).metrics;
  };
  const MetricsReport no_m = variant("no_m", [](TrainConfig& c) {
    c.enabled_losses = LossMask::Parse("fpb");
  });
  const MetricsReport no_f = variant("no_f", [](TrainConfig& c) {
    c.enabled_losses = LossMask::Parse("mpb");
  });
  const MetricsReport no_p = variant("no_p", [](TrainConfig& c) {
    c.enabled_losses = LossMask::Parse("mfb");
  });
  const bool m_drop = full.metrics.r2_f - no_m.r2_f >= 0.3;
  const bool f_shape = no_f.r2_f < 0.0 && no_f.r2_a >= 0.8;
  const bool p_drop = full.metrics.r2_a - no_p.r2_a >= 0.2;
  report.Criterion(
      5, m_drop && f_shape && p_drop,
      Fmt("no_m R2(F) %.4f vs full %.4f (drop >= 0.3: %s); no_f R2(F) %.4f (< 0) and R2(a) "
          "%.4f (>= 0.8): %s; no_p R2(a) %.4f vs full %.4f (drop >= 0.2: %s)",
          no_m.r2_f, full.metrics.r2_f, m_drop ? "yes" : "no", no_f.r2_f, no_f.r2_a,
          f_shape ? "yes" : "no", no_p.r2_a, full.metrics.r2_a, p_drop ? "yes" : "no"));

  const MetricsReport sup = variant("supervised", [](TrainConfig& c) {
    c.loss_mode = LossMode::kSupervised;
  });
  const double da = std::abs(sup.r2_a - full.metrics.r2_a);
  const double df = std::abs(sup.r2_f - full.metrics.r2_f);
  report.Criterion(6, da <= 0.05 && df <= 0.05,
                   Fmt("supervised R2(a) %.4f, R2(F) %.4f vs knowledge %.4f, %.4f; "
                       "|dR2(a)| %.4f, |dR2(F)| %.4f (tol 0.05)",
                       sup.r2_a, sup.r2_f, full.metrics.r2_a, full.metrics.r2_f, da, df));

  std::vector<std::pair<double, double>> sweep;  // omega, R2(F)
  for (double omega : {1.0, 10.0, 100.0, 1000.0}) {
    if (omega == base.omega) {
      sweep.emplace_back(omega, full.metrics.r2_f);
      continue;
    }
    const MetricsReport m =
        variant(Fmt("omega_%g", omega), [&](TrainConfig& c) { c.omega = omega; });
    sweep.emplace_back(omega, m.r2_f);
  }
  double best = -INFINITY;
  std::string cells;
  for (const auto& [omega, r2f] : sweep) {
    best = std::max(best, r2f);
    cells += Fmt("%s%g: %.4f", cells.empty() ? "" : ", ", omega, r2f);
  }
  report.Criterion(7, full.metrics.r2_f >= best - 0.02,
                   Fmt("R2(F) by omega {%s}; omega=100 is %.4f below the grid maximum "
                       "(tol 0.02)",
                       cells.c_str(), best - full.metrics.r2_f));

  const Eigen::MatrixXd& raw = full.predictions.raw_activations;
  const Eigen::Index inside =
      ((raw.array() >= 0.005) && (raw.array() <= 1.005)).cast<Eigen::Index>().sum();
  const double frac = raw.size() > 0 ? static_cast<double>(inside) / raw.size() : 0.0;
  report.Criterion(8, frac >= 0.99,
                   Fmt("%.2f%% of %td test-window activations in [0.005, 1.005] (>= 99%%), "
                       "range [%.4f, %.4f]",
                       100.0 * frac, raw.size(), raw.minCoeff(), raw.maxCoeff()));

  const bool traces = SameTraces(full.train.trace, again.train.trace);
  const bool ckpts = SerializeCheckpoint(full.train.checkpoint) ==
                     SerializeCheckpoint(again.train.checkpoint);
  report.Criterion(9, traces && ckpts,
                   Fmt("loss traces %s (%zu steps), checkpoints %s",
                       traces ? "bit-identical" : "DIFFER", full.train.trace.size(),
                       ckpts ? "bit-identical" : "DIFFER"));

  report.Write();
  std::printf("%d/9 criteria passed; report in %s/acceptance_report.txt\n",
              9 - report.failed(), out.c_str());
  return strict && report.failed() > 0 ? 1 : 0;
}

}  // namespace
}  // namespace myodyn

int main(int argc, char** argv) {
  try {
    return myodyn::Main(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance run aborted: %s\n", e.what());
    return 2;
  }
}
