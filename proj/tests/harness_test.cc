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


#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "myodyn/harness/evaluate.h"
#include "myodyn/harness/experiments.h"
#include "myodyn/harness/gradient_audit.h"
#include "myodyn/harness/io.h"
#include "myodyn/harness/metrics.h"
#include "myodyn/harness/trajectory.h"
#include "myodyn/msk/model.h"
#include "myodyn/so/static_optimization.h"
#include "myodyn/trainer/dataset.h"
#include "myodyn/trainer/trainer.h"
#include "myodyn/trainer/windows.h"
#include "test_util.h"

namespace myodyn {
namespace {

using Eigen::MatrixXd;
constexpr double kPi = std::numbers::pi;

// ---- Trajectories ----

TEST(TrajectoryTest, ProtocolAngles) {
  for (double f : {0.3, 0.5, 0.8}) {
    EXPECT_EQ(ProtocolAngle(Protocol::kKnee, f, 0.0), 0.0);
    EXPECT_NEAR(ProtocolAngle(Protocol::kKnee, f, 1.0 / (2.0 * f)), kPi / 2, 1e-15);
    EXPECT_NEAR(ProtocolAngle(Protocol::kElbow, f, 0.0), 0.2, 1e-15);
    EXPECT_NEAR(ProtocolAngle(Protocol::kElbow, f, 1.0 / (2.0 * f)), 2.4, 1e-15);
  }
  EXPECT_EQ(ParseProtocol("elbow"), Protocol::kElbow);
  EXPECT_STREQ(ProtocolName(Protocol::kKnee), "knee");
  EXPECT_ERROR_KIND(ParseProtocol("hip"), ErrorKind::kConfig);
}

TEST(TrajectoryTest, DefaultDatasetSizeAndDeterminism) {
  const KinematicDataset a = GenerateTrajectories({});
  ASSERT_EQ(a.size(), 4u);
  std::size_t total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i].Validate();
    EXPECT_EQ(a[i].trajectory_id, static_cast<int>(i));
    EXPECT_EQ(a[i].time.front(), 0.0);
    EXPECT_NEAR(a[i].time[1], 1.0 / 250.0, 1e-15);
    total += a[i].size();
  }
  EXPECT_EQ(total, 12000u);
  const KinematicDataset b = GenerateTrajectories({});
  EXPECT_EQ(a[3].q, b[3].q);
  EXPECT_EQ(a[3].qddot, b[3].qddot);
  TrajectoryOptions other;
  other.seed = 2;
  EXPECT_NE(GenerateTrajectories(other)[0].q, a[0].q);
}

TEST(TrajectoryTest, NoiseFreeTrialFollowsProtocol) {
  TrajectoryOptions opts;
  opts.trials = 1;
  opts.noise_rms_deg = 0.0;
  const KinematicSeries s = GenerateTrajectories(opts).front();
  // Recover the cycle frequency from the first peak and compare pointwise.
  std::size_t peak = 0;
  for (std::size_t t = 0; t < s.size() / 2; ++t) {
    if (s.q[t] > s.q[peak]) peak = t;
  }
  EXPECT_NEAR(s.q[peak], kPi / 2, 1e-3);
  const auto [lo, hi] = ProtocolFrequencyRange(Protocol::kKnee);
  const double f = 1.0 / (2.0 * s.time[peak]);
  EXPECT_GE(f, lo * 0.99);
  EXPECT_LE(f, hi * 1.01);
}

TEST(DifferentiateTest, ConstantSeries) {
  const std::vector<double> q(50, 0.7);
  const Derivatives d = Differentiate(q, 250.0);
  for (std::size_t i = 0; i < q.size(); ++i) {
    EXPECT_NEAR(d.qdot[i], 0.0, 1e-9);
    EXPECT_NEAR(d.qddot[i], 0.0, 1e-6);
  }
}

TEST(DifferentiateTest, QuadraticIsExactInTheInterior) {
  const double h = 1.0 / 250.0;
  std::vector<double> q(200);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = std::pow(i * h, 2);
  const Derivatives d = Differentiate(q, 250.0);
  // The moving average shifts a quadratic by a constant wherever the full
  // five-point window fits, which differencing removes.
  for (std::size_t i = 3; i + 3 < q.size(); ++i) {
    EXPECT_NEAR(d.qddot[i], 2.0, 1e-6) << i;
    EXPECT_NEAR(d.qdot[i], 2.0 * i * h, 1e-9) << i;
  }
}

TEST(DifferentiateTest, SineVelocity) {
  const double w = 2.0 * kPi * 0.5, h = 1.0 / 250.0;
  std::vector<double> q(3000);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = std::sin(w * i * h);
  const Derivatives d = Differentiate(q, 250.0);
  double worst = 0.0;
  for (std::size_t i = 3; i + 3 < q.size(); ++i) {
    worst = std::max(worst, std::abs(d.qdot[i] - w * std::cos(w * i * h)));
  }
  EXPECT_LE(worst, 1e-3 * w);
  EXPECT_ERROR_KIND(Differentiate(std::vector<double>(4, 0.0), 250.0), ErrorKind::kDimension);
}

// ---- Metrics ----

double RefR2(const std::vector<double>& y, const std::vector<double>& yh) {
  double mean = 0.0;
  for (double v : y) mean += v / y.size();
  double res = 0.0, tot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    res += (y[i] - yh[i]) * (y[i] - yh[i]);
    tot += (y[i] - mean) * (y[i] - mean);
  }
  return 1.0 - res / tot;
}

TEST(MetricsTest, Examples) {
  const std::vector<double> y{0.0, 2.0}, mean{1.0, 1.0};
  EXPECT_EQ(Rmse(y, y), 0.0);
  EXPECT_EQ(RSquared(y, y), 1.0);
  EXPECT_DOUBLE_EQ(Rmse(y, mean), 1.0);
  EXPECT_DOUBLE_EQ(RSquared(y, mean), 0.0);
  EXPECT_ERROR_KIND(RSquared(mean, y), ErrorKind::kNumeric);
  EXPECT_ERROR_KIND(Rmse(y, std::vector<double>{1.0}), ErrorKind::kDimension);
}

TEST(MetricsTest, RandomVectorsMatchLoopOracle) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> y(100), yh(100);
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = g(rng);
    yh[i] = y[i] + 0.5 * g(rng);
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) ss += (y[i] - yh[i]) * (y[i] - yh[i]);
  EXPECT_NEAR(Rmse(y, yh), std::sqrt(ss / y.size()), 1e-14);
  EXPECT_EQ(Rmse(y, yh), Rmse(yh, y));
  EXPECT_NEAR(RSquared(y, yh), RefR2(y, yh), 1e-13);
  EXPECT_NE(RSquared(y, yh), RSquared(yh, y));
}

// ---- CSV I/O ----

TEST(IoTest, CsvRoundTripIsExact) {
  const std::string dir = testing::ScratchDir("csv");
  const std::vector<std::vector<double>> rows = {{0.1, -1e-300, 1.0 / 3.0}, {1e20, 0.0, -2.5}};
  WriteCsv(dir + "/t.csv", {"a", "b", "c"}, rows);
  const CsvTable t = ReadCsv(dir + "/t.csv");
  EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(t.rows, rows);
  EXPECT_EQ(t.Column("c"), 2u);
  EXPECT_ERROR_KIND(t.Column("d"), ErrorKind::kIo);
  EXPECT_ERROR_KIND(ReadCsv(dir + "/missing.csv"), ErrorKind::kIo);
  for (double v : {0.1, 1.0 / 3.0, -123.456e-7, 5e-324}) {
    EXPECT_EQ(std::strtod(FormatNumber(v).c_str(), nullptr), v);
  }
}

TEST(IoTest, AtomicWriteReplacesWithoutLeftovers) {
  const std::string dir = testing::ScratchDir("atomic");
  WriteFileAtomic(dir + "/f.txt", "first");
  WriteFileAtomic(dir + "/f.txt", "second");
  std::ifstream in(dir + "/f.txt");
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "second");
  int files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  EXPECT_EQ(files, 1);
  // A regular file cannot serve as a parent directory.
  EXPECT_ERROR_KIND(WriteFileAtomic(dir + "/f.txt/g.txt", "x"), ErrorKind::kIo);
}

TEST(IoTest, KinematicsAndLabelsRoundTrip) {
  const std::string dir = testing::ScratchDir("kin");
  TrajectoryOptions opts;
  opts.trials = 2;
  opts.duration_s = 1.0;
  const KinematicDataset kin = GenerateTrajectories(opts);
  WriteKinematicsCsv(dir + "/k.csv", kin);
  const KinematicDataset back = ReadKinematicsCsv(dir + "/k.csv");
  ASSERT_EQ(back.size(), 2u);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].q, kin[i].q);
    EXPECT_EQ(back[i].qddot, kin[i].qddot);
    EXPECT_EQ(back[i].time, kin[i].time);
  }
  const MusculoskeletalModel model = LoadModel(std::string(MYODYN_MODELS_DIR) + "/knee5.cfg");
  std::vector<SoTrajectory> solved;
  for (const auto& s : kin) solved.push_back(SolveTrajectory(model, s));
  const LabelSet labels = LabelsFromOracle(model.muscle_names(), solved);
  WriteLabelsCsv(dir + "/l.csv", kin, labels);
  const LabelSet lb = ReadLabelsCsv(dir + "/l.csv", kin);
  EXPECT_EQ(lb.muscles, model.muscle_names());
  EXPECT_EQ(lb.trajectories[1].a, labels.trajectories[1].a);
  EXPECT_EQ(lb.trajectories[1].forces, labels.trajectories[1].forces);
  // Labels written for a different dataset must not load.
  KinematicDataset shorter = kin;
  shorter.pop_back();
  EXPECT_ERROR_KIND(ReadLabelsCsv(dir + "/l.csv", shorter), ErrorKind::kDimension);
}

// ---- Evaluation ----

class EvaluateTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const MusculoskeletalModel model =
        LoadModel(std::string(MYODYN_MODELS_DIR) + "/knee5.cfg");
    TrajectoryOptions opts;
    opts.trials = 2;
    opts.duration_s = 2.0;
    const KinematicDataset kin = GenerateTrajectories(opts);
    std::vector<SoTrajectory> solved;
    for (const auto& s : kin) solved.push_back(SolveTrajectory(model, s));
    const LabelSet labels = LabelsFromOracle(model.muscle_names(), solved);
    data_ = new PreparedData(PrepareData(model, kin, &labels));
    TrainConfig c;
    c.batch_size = 8;
    c.max_iters = 20;
    c.eval_every = 10;
    c.window = 10;
    c.stride = 3;
    c.network.hidden = 8;
    c.network.fc = 16;
    config_ = new TrainConfig(c);
    result_ = new TrainResult(Train(c, *data_));
  }
  static void TearDownTestSuite() {
    delete result_;
    delete config_;
    delete data_;
  }

  static PredictionSet FromLabels(double scale) {
    PredictionSet p;
    p.muscles = data_->muscles;
    for (const auto& t : data_->trajectories) {
      p.a.push_back(scale * t.label_a);
      p.forces.push_back(scale * t.label_f);
      p.count.emplace_back(t.size(), 1);
    }
    return p;
  }

  static PreparedData* data_;
  static TrainConfig* config_;
  static TrainResult* result_;
};

PreparedData* EvaluateTest::data_ = nullptr;
TrainConfig* EvaluateTest::config_ = nullptr;
TrainResult* EvaluateTest::result_ = nullptr;

TEST_F(EvaluateTest, LabelsAgainstThemselves) {
  const MetricsReport r = ComputeMetrics(FromLabels(1.0), *data_);
  EXPECT_EQ(r.samples, 1000u);
  ASSERT_EQ(r.muscles.size(), 5u);
  for (const auto& m : r.muscles) {
    EXPECT_EQ(m.r2_a, 1.0) << m.name;
    EXPECT_EQ(m.r2_f, 1.0) << m.name;
    EXPECT_EQ(m.rmse_f, 0.0) << m.name;
  }
  EXPECT_EQ(r.r2_f, 1.0);
}

TEST_F(EvaluateTest, ZeroBaselineHasNoSkill) {
  const MetricsReport r = ComputeMetrics(FromLabels(0.0), *data_);
  for (const auto& m : r.muscles) EXPECT_LE(m.r2_f, 0.0) << m.name;
  EXPECT_LE(r.r2_f, 0.0);
}

TEST_F(EvaluateTest, MisalignedPredictionsAreRejected) {
  PredictionSet p = FromLabels(1.0);
  p.a.pop_back();
  EXPECT_ERROR_KIND(ComputeMetrics(p, *data_), ErrorKind::kDimension);
}

TEST_F(EvaluateTest, ReportMatchesRecomputationFromPredictionCsv) {
  const auto& test = result_->split.test;
  ASSERT_FALSE(test.empty());
  PredictionSet pred;
  EvalOptions opts;
  opts.latency_runs = 20;
  const MetricsReport r = Evaluate(result_->checkpoint, *data_, test, opts, &pred);
  EXPECT_EQ(r.windows, test.size());
  EXPECT_EQ(r.latency_runs, 20u);
  EXPECT_GT(r.latency_median_ms, 0.0);
  EXPECT_LE(r.latency_median_ms, r.latency_p95_ms);

  const std::string dir = testing::ScratchDir("pred");
  WritePredictionsCsv(dir + "/p.csv", pred, *data_);
  const CsvTable t = ReadCsv(dir + "/p.csv");
  EXPECT_EQ(t.rows.size(), r.samples);
  const std::size_t traj_col = t.Column("trajectory_id"), sample_col = t.Column("sample");
  double sum_r2a = 0.0, sum_r2f = 0.0;
  for (std::size_t m = 0; m < 5; ++m) {
    const std::string& name = data_->muscles[m];
    const std::size_t ca = t.Column("a_hat_" + name), cf = t.Column("F_hat_" + name + "_N");
    std::vector<double> ya, yha, yf, yhf;
    for (const auto& row : t.rows) {
      const auto& src = data_->trajectories[static_cast<std::size_t>(row[traj_col])];
      const auto s = static_cast<Eigen::Index>(row[sample_col]);
      ya.push_back(src.label_a(s, m));
      yha.push_back(row[ca]);
      yf.push_back(src.label_f(s, m));
      yhf.push_back(row[cf]);
    }
    EXPECT_NEAR(r.muscles[m].r2_a, RefR2(ya, yha), 1e-10) << name;
    EXPECT_NEAR(r.muscles[m].r2_f, RefR2(yf, yhf), 1e-10) << name;
    sum_r2a += RefR2(ya, yha);
    sum_r2f += RefR2(yf, yhf);
  }
  EXPECT_NEAR(r.r2_a, sum_r2a / 5, 1e-10);
  EXPECT_NEAR(r.r2_f, sum_r2f / 5, 1e-10);

  WriteMetricsCsv(dir + "/m.csv", r);
  std::ifstream in(dir + "/m.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "metric,muscle,value");
  EXPECT_NE(FormatMetricsTable(r).find(data_->muscles[0]), std::string::npos);
}

TEST_F(EvaluateTest, OverlappingWindowsAreAveraged) {
  const Checkpoint& ck = result_->checkpoint;
  const std::vector<WindowRef> windows = {{0, 0}, {0, 4}};
  const PredictionSet p = PredictWindows(ck, *data_, windows);
  ASSERT_EQ(p.raw_activations.rows(), 20);
  EXPECT_EQ(p.CoveredSamples(), 14u);
  EXPECT_EQ(p.count[0][3], 1);
  EXPECT_EQ(p.count[0][5], 2);
  EXPECT_EQ(p.count[1][0], 0);
  // Raw rows are window-major: window w, step k at row w * T + k.
  for (int m = 0; m < 5; ++m) {
    EXPECT_DOUBLE_EQ(p.a[0](2, m), p.raw_activations(2, m));
    EXPECT_NEAR(p.a[0](6, m), 0.5 * (p.raw_activations(6, m) + p.raw_activations(10 + 2, m)),
                1e-15);
  }
}

TEST_F(EvaluateTest, DisjointWindowsReproduceSingleWindowOutputs) {
  const Checkpoint& ck = result_->checkpoint;
  const auto starts = WindowStarts(data_->trajectories[1].size(), 10, 10);
  std::vector<WindowRef> windows;
  for (std::size_t s : starts) windows.push_back({1, s});
  const PredictionSet all = PredictWindows(ck, *data_, windows, 7);
  for (std::size_t w : {0u, 13u, 49u}) {
    const PredictionSet one = PredictWindows(ck, *data_, std::span(&windows[w], 1));
    for (int k = 0; k < 10; ++k) {
      EXPECT_EQ(all.count[1][windows[w].start + k], 1);
      for (int m = 0; m < 5; ++m) {
        EXPECT_NEAR(all.forces[1](windows[w].start + k, m),
                    one.forces[1](windows[w].start + k, m), 1e-9);
      }
    }
  }
}

// ---- Experiments ----

TEST(ExperimentsTest, AblationGridOrderAndMasks) {
  TrainConfig base;
  base.max_iters = 3;
  std::vector<std::string> seen;
  const auto rows = RunAblation(base, [&](const std::string& label, const TrainConfig& c) {
    seen.push_back(label + ":" + c.enabled_losses.ToString());
    EXPECT_EQ(c.max_iters, 3);
    EXPECT_EQ(c.seed, base.seed);
    ExperimentResult r;
    r.label = label;
    r.config = c;
    r.ok = true;
    return r;
  });
  EXPECT_EQ(seen, (std::vector<std::string>{"no_b:mfp", "no_p:mfb", "no_f:mpb", "no_m:fpb",
                                            "full:mfpb"}));
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows.back().label, "full");
}

TEST(ExperimentsTest, OmegaSweepRecordsFailuresAndContinues) {
  const std::vector<double> grid{1, 10, 100};
  const auto rows = SweepOmega(TrainConfig{}, grid, [](const std::string& label,
                                                       const TrainConfig& c) {
    ExperimentResult r;
    r.label = label;
    r.config = c;
    r.ok = c.omega != 10.0;
    if (!r.ok) r.error = "boom";
    return r;
  });
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].config.omega, 1.0);
  EXPECT_FALSE(rows[1].ok);
  EXPECT_EQ(rows[2].config.omega, 100.0);
  EXPECT_ERROR_KIND(SweepOmega(TrainConfig{}, std::vector<double>{}, nullptr), ErrorKind::kConfig);

  const std::string path = testing::ScratchDir("sweep") + "/omega.csv";
  WriteExperimentsCsv(path, rows);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header,
            "label,enabled_losses,loss_mode,omega,r2_a,r2_F,rmse_a,rmse_F_N,"
            "checkpoint_iteration,status");
}

// ---- Gradient audit ----

TEST(GradientAuditTest, PassesWithinBudget) {
  const AuditResult r = RunGradientAudit();
  EXPECT_TRUE(r.ok()) << FormatAudit(r);
  EXPECT_LE(r.max_rel_err(), 1e-4);
  EXPECT_GT(r.entries.size(), 20u);
  EXPECT_LT(r.seconds, 120.0);
  bool has_net = false, has_loss = false;
  for (const auto& e : r.entries) {
    has_net |= e.name.find("gru") != std::string::npos;
    has_loss |= e.name.find("loss_total") != std::string::npos;
  }
  EXPECT_TRUE(has_net);
  EXPECT_TRUE(has_loss);
}

}  // namespace
}  // namespace myodyn
