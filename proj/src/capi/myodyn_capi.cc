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

#include "myodyn/myodyn.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <map>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "myodyn/error.h"
#include "myodyn/harness/evaluate.h"
#include "myodyn/harness/experiments.h"
#include "myodyn/harness/gradient_audit.h"
#include "myodyn/harness/io.h"
#include "myodyn/harness/trajectory.h"
#include "myodyn/log.h"
#include "myodyn/msk/model.h"
#include "myodyn/network/checkpoint.h"
#include "myodyn/runtime.h"
#include "myodyn/so/static_optimization.h"
#include "myodyn/trainer/train_config.h"
#include "myodyn/trainer/trainer.h"

struct myodyn_model {
  myodyn::MusculoskeletalModel model;
  std::vector<std::string> names;
};

struct myodyn_kinematics {
  myodyn::KinematicDataset data;
};

struct myodyn_train_config {
  myodyn::TrainConfig config;
  std::string yaml;
};

struct myodyn_dataset {
  myodyn::PreparedData data;
};

struct myodyn_checkpoint {
  myodyn::Checkpoint ckpt;
};

struct myodyn_report {
  std::string text;
  std::map<std::string, double> values;
};

namespace {

using myodyn::ErrorKind;

thread_local std::string g_last_error;

myodyn_status FromKind(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kRange: return MYODYN_ERR_RANGE;
    case ErrorKind::kGeometry: return MYODYN_ERR_GEOMETRY;
    case ErrorKind::kDimension: return MYODYN_ERR_DIMENSION;
    case ErrorKind::kConfig: return MYODYN_ERR_CONFIG;
    case ErrorKind::kContract: return MYODYN_ERR_CONTRACT;
    case ErrorKind::kNumeric: return MYODYN_ERR_NUMERIC;
    case ErrorKind::kIo: return MYODYN_ERR_IO;
  }
  return MYODYN_ERR_INTERNAL;
}

myodyn_status SetError(myodyn_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

struct InvalidArgument : std::exception {
  explicit InvalidArgument(std::string m) : message(std::move(m)) {}
  const char* what() const noexcept override { return message.c_str(); }
  std::string message;
};

// Runs `body`, translating exceptions into status codes.
template <typename F>
myodyn_status Call(F&& body) {
  g_last_error.clear();
  try {
    body();
    return MYODYN_OK;
  } catch (const InvalidArgument& e) {
    return SetError(MYODYN_ERR_INVALID_ARGUMENT, e.what());
  } catch (const myodyn::Error& e) {
    return SetError(FromKind(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return SetError(MYODYN_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return SetError(MYODYN_ERR_INTERNAL, e.what());
  }
}

void NotNull(const void* p, const char* name) {
  if (p == nullptr) throw InvalidArgument(std::string(name) + " must not be NULL");
}

void EnsureDir(const char* dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw myodyn::Error(ErrorKind::kIo, std::string("cannot create directory '") +
                                            dir + "': " + ec.message());
  }
}

std::string OutPath(const char* dir, const char* file) {
  return (std::filesystem::path(dir) / file).string();
}

void PutMetrics(myodyn_report& r, const myodyn::MetricsReport& m) {
  r.values["r2_a"] = m.r2_a;
  r.values["r2_F"] = m.r2_f;
  r.values["rmse_a"] = m.rmse_a;
  r.values["rmse_F_N"] = m.rmse_f;
  r.values["samples"] = static_cast<double>(m.samples);
  r.values["windows"] = static_cast<double>(m.windows);
  r.values["latency_median_ms"] = m.latency_median_ms;
  r.values["latency_p95_ms"] = m.latency_p95_ms;
}

void PutExperiments(myodyn_report& r,
                    const std::vector<myodyn::ExperimentResult>& results) {
  r.text = myodyn::FormatExperimentsTable(results);
  std::size_t failed = 0;
  for (const auto& e : results) {
    if (!e.ok) {
      ++failed;
      continue;
    }
    r.values[e.label + ".r2_a"] = e.metrics.r2_a;
    r.values[e.label + ".r2_F"] = e.metrics.r2_f;
    r.values[e.label + ".rmse_a"] = e.metrics.rmse_a;
    r.values[e.label + ".rmse_F_N"] = e.metrics.rmse_f;
  }
  r.values["rows"] = static_cast<double>(results.size());
  r.values["failed"] = static_cast<double>(failed);
}

}  // namespace

extern "C" {

const char* myodyn_version(void) { return "1.0.0"; }

const char* myodyn_status_name(myodyn_status status) {
  switch (status) {
    case MYODYN_OK: return "ok";
    case MYODYN_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case MYODYN_ERR_RANGE: return "range";
    case MYODYN_ERR_GEOMETRY: return "geometry";
    case MYODYN_ERR_DIMENSION: return "dimension";
    case MYODYN_ERR_CONFIG: return "config";
    case MYODYN_ERR_CONTRACT: return "contract";
    case MYODYN_ERR_NUMERIC: return "numeric";
    case MYODYN_ERR_IO: return "io";
    case MYODYN_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* myodyn_last_error(void) { return g_last_error.c_str(); }

int myodyn_status_is_validation(myodyn_status status) {
  switch (status) {
    case MYODYN_ERR_INVALID_ARGUMENT:
    case MYODYN_ERR_RANGE:
    case MYODYN_ERR_DIMENSION:
    case MYODYN_ERR_CONFIG:
    case MYODYN_ERR_IO:
      return 1;
    default:
      return 0;
  }
}

void myodyn_set_log_level(int level) {
  if (level < 0) level = 0;
  if (level > 4) level = 4;
  myodyn::SetLogLevel(static_cast<myodyn::LogLevel>(level));
}

void myodyn_configure_for_training(void) { myodyn::ConfigureAllocatorForTraining(); }

// ---- model ----

myodyn_status myodyn_model_load(const char* path, myodyn_model** out) {
  return Call([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    auto m = std::make_unique<myodyn_model>();
    m->model = myodyn::LoadModel(path);
    m->names = m->model.muscle_names();
    *out = m.release();
  });
}

myodyn_status myodyn_model_parse(const char* yaml_text, myodyn_model** out) {
  return Call([&] {
    NotNull(yaml_text, "yaml_text");
    NotNull(out, "out");
    auto m = std::make_unique<myodyn_model>();
    m->model = myodyn::ParseModel(yaml_text);
    m->names = m->model.muscle_names();
    *out = m.release();
  });
}

void myodyn_model_free(myodyn_model* model) { delete model; }

size_t myodyn_model_muscle_count(const myodyn_model* model) {
  return model == nullptr ? 0 : model->model.muscle_count();
}

const char* myodyn_model_muscle_name(const myodyn_model* model, size_t index) {
  if (model == nullptr || index >= model->names.size()) return nullptr;
  return model->names[index].c_str();
}

myodyn_status myodyn_model_tendon_forces(const myodyn_model* model, double q,
                                         double qdot, const double* activations,
                                         double* forces_out) {
  return Call([&] {
    NotNull(model, "model");
    NotNull(activations, "activations");
    NotNull(forces_out, "forces_out");
    const auto& muscles = model->model.muscles;
    for (std::size_t i = 0; i < muscles.size(); ++i) {
      const auto state = myodyn::ResolveState(muscles[i], q, qdot);
      forces_out[i] = myodyn::TendonForce(muscles[i], state, activations[i]);
    }
  });
}

myodyn_status myodyn_model_muscle_torque(const myodyn_model* model, double q,
                                         double qdot, const double* activations,
                                         double* torque_out) {
  return Call([&] {
    NotNull(model, "model");
    NotNull(activations, "activations");
    NotNull(torque_out, "torque_out");
    const auto& muscles = model->model.muscles;
    std::vector<double> f(muscles.size()), r(muscles.size());
    for (std::size_t i = 0; i < muscles.size(); ++i) {
      const auto state = myodyn::ResolveState(muscles[i], q, qdot);
      f[i] = myodyn::TendonForce(muscles[i], state, activations[i]);
      r[i] = myodyn::MomentArm(muscles[i].path, q);
    }
    *torque_out = myodyn::JointTorque(f, r);
  });
}

myodyn_status myodyn_model_required_torque(const myodyn_model* model, double q,
                                           double qdot, double qddot,
                                           double* torque_out) {
  return Call([&] {
    NotNull(model, "model");
    NotNull(torque_out, "torque_out");
    *torque_out = myodyn::InverseDynamicsTorque(model->model.joint, q, qdot, qddot);
  });
}

// ---- kinematics ----

void myodyn_trajectory_options_init(myodyn_trajectory_options* options) {
  if (options == nullptr) return;
  const myodyn::TrajectoryOptions d;
  options->protocol = "knee";
  options->trials = d.trials;
  options->duration_s = d.duration_s;
  options->rate_hz = d.rate_hz;
  options->seed = d.seed;
  options->noise_rms_deg = d.noise_rms_deg;
}

myodyn_status myodyn_kinematics_generate(const myodyn_trajectory_options* options,
                                         myodyn_kinematics** out) {
  return Call([&] {
    NotNull(options, "options");
    NotNull(options->protocol, "options->protocol");
    NotNull(out, "out");
    myodyn::TrajectoryOptions o;
    o.protocol = myodyn::ParseProtocol(options->protocol);
    o.trials = options->trials;
    o.duration_s = options->duration_s;
    o.rate_hz = options->rate_hz;
    o.seed = options->seed;
    o.noise_rms_deg = options->noise_rms_deg;
    auto k = std::make_unique<myodyn_kinematics>();
    k->data = myodyn::GenerateTrajectories(o);
    *out = k.release();
  });
}

myodyn_status myodyn_kinematics_read_csv(const char* path, myodyn_kinematics** out) {
  return Call([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    auto k = std::make_unique<myodyn_kinematics>();
    k->data = myodyn::ReadKinematicsCsv(path);
    *out = k.release();
  });
}

myodyn_status myodyn_kinematics_write_csv(const myodyn_kinematics* k,
                                          const char* path) {
  return Call([&] {
    NotNull(k, "kinematics");
    NotNull(path, "path");
    myodyn::WriteKinematicsCsv(path, k->data);
  });
}

void myodyn_kinematics_free(myodyn_kinematics* k) { delete k; }

size_t myodyn_kinematics_trajectory_count(const myodyn_kinematics* k) {
  return k == nullptr ? 0 : k->data.size();
}

size_t myodyn_kinematics_sample_count(const myodyn_kinematics* k) {
  if (k == nullptr) return 0;
  std::size_t n = 0;
  for (const auto& s : k->data) n += s.size();
  return n;
}

// ---- oracle ----

myodyn_status myodyn_so_solve(size_t n, const double* c, const double* d,
                              const double* r, double tau_req,
                              double* activations_out, myodyn_so_status* status_out) {
  return Call([&] {
    NotNull(c, "c");
    NotNull(d, "d");
    NotNull(r, "r");
    NotNull(activations_out, "activations_out");
    if (n == 0) throw InvalidArgument("at least one muscle is required");
    myodyn::SoProblem p;
    p.c.assign(c, c + n);
    p.d.assign(d, d + n);
    p.r.assign(r, r + n);
    p.tau_req = tau_req;
    const myodyn::SoSolution s = myodyn::SolveTimestep(p);
    for (std::size_t i = 0; i < n; ++i) activations_out[i] = s.a[i];
    if (status_out != nullptr) {
      *status_out = s.status == myodyn::SoStatus::kOptimal   ? MYODYN_SO_OPTIMAL
                    : s.status == myodyn::SoStatus::kClamped ? MYODYN_SO_CLAMPED
                                                             : MYODYN_SO_INFEASIBLE;
    }
  });
}

myodyn_status myodyn_oracle_label(const myodyn_model* model, const myodyn_kinematics* k,
                                  const char* labels_path,
                                  myodyn_oracle_summary* summary) {
  return Call([&] {
    NotNull(model, "model");
    NotNull(k, "kinematics");
    NotNull(labels_path, "labels_path");
    std::vector<myodyn::SoTrajectory> solved;
    myodyn_oracle_summary s{};
    for (const auto& series : k->data) {
      solved.push_back(myodyn::SolveTrajectory(model->model, series));
      for (const auto& step : solved.back().steps) {
        ++s.samples;
        if (step.status == myodyn::SoStatus::kInfeasible) {
          ++s.infeasible;
        } else {
          if (step.status == myodyn::SoStatus::kClamped) ++s.clamped;
          s.max_torque_residual =
              std::max(s.max_torque_residual, std::abs(step.torque_residual));
        }
      }
    }
    const auto labels = myodyn::LabelsFromOracle(model->names, solved);
    myodyn::WriteLabelsCsv(labels_path, k->data, labels);
    if (summary != nullptr) *summary = s;
  });
}

// ---- train config ----

myodyn_status myodyn_train_config_default(myodyn_train_config** out) {
  return Call([&] {
    NotNull(out, "out");
    *out = new myodyn_train_config();
  });
}

myodyn_status myodyn_train_config_load(const char* path, myodyn_train_config** out) {
  return Call([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    auto c = std::make_unique<myodyn_train_config>();
    c->config = myodyn::LoadTrainConfig(path);
    *out = c.release();
  });
}

void myodyn_train_config_free(myodyn_train_config* config) { delete config; }

myodyn_status myodyn_train_config_set_seed(myodyn_train_config* config, uint64_t seed) {
  return Call([&] {
    NotNull(config, "config");
    config->config.seed = seed;
  });
}

myodyn_status myodyn_train_config_set_max_iters(myodyn_train_config* config,
                                                int max_iters) {
  return Call([&] {
    NotNull(config, "config");
    myodyn::TrainConfig c = config->config;
    c.max_iters = max_iters;
    c.Validate();
    config->config = c;
  });
}

myodyn_status myodyn_train_config_set_omega(myodyn_train_config* config, double omega) {
  return Call([&] {
    NotNull(config, "config");
    myodyn::TrainConfig c = config->config;
    c.omega = omega;
    c.Validate();
    config->config = c;
  });
}

myodyn_status myodyn_train_config_set_loss_mode(myodyn_train_config* config,
                                                const char* mode) {
  return Call([&] {
    NotNull(config, "config");
    NotNull(mode, "mode");
    config->config.loss_mode = myodyn::ParseLossMode(mode);
  });
}

myodyn_status myodyn_train_config_set_enabled_losses(myodyn_train_config* config,
                                                     const char* letters) {
  return Call([&] {
    NotNull(config, "config");
    NotNull(letters, "letters");
    config->config.enabled_losses = myodyn::LossMask::Parse(letters);
  });
}

myodyn_status myodyn_train_config_apply_env(myodyn_train_config* config, int* applied) {
  return Call([&] {
    NotNull(config, "config");
    const bool a = myodyn::ApplySeedOverride(config->config);
    if (applied != nullptr) *applied = a ? 1 : 0;
  });
}

uint64_t myodyn_train_config_seed(const myodyn_train_config* config) {
  return config == nullptr ? 0 : config->config.seed;
}

const char* myodyn_train_config_yaml(myodyn_train_config* config) {
  if (config == nullptr) return "";
  config->yaml = config->config.ToYaml();
  return config->yaml.c_str();
}

// ---- dataset ----

myodyn_status myodyn_dataset_create(const myodyn_model* model, const myodyn_kinematics* k,
                                    const char* labels_path, myodyn_dataset** out) {
  return Call([&] {
    NotNull(model, "model");
    NotNull(k, "kinematics");
    NotNull(out, "out");
    auto d = std::make_unique<myodyn_dataset>();
    if (labels_path != nullptr) {
      const myodyn::LabelSet labels = myodyn::ReadLabelsCsv(labels_path, k->data);
      d->data = myodyn::PrepareData(model->model, k->data, &labels);
    } else {
      d->data = myodyn::PrepareData(model->model, k->data, nullptr);
    }
    *out = d.release();
  });
}

void myodyn_dataset_free(myodyn_dataset* dataset) { delete dataset; }

// ---- reports ----

void myodyn_report_free(myodyn_report* report) { delete report; }

const char* myodyn_report_text(const myodyn_report* report) {
  return report == nullptr ? "" : report->text.c_str();
}

myodyn_status myodyn_report_value(const myodyn_report* report, const char* name,
                                  double* out) {
  return Call([&] {
    NotNull(report, "report");
    NotNull(name, "name");
    NotNull(out, "out");
    const auto it = report->values.find(name);
    if (it == report->values.end()) {
      throw InvalidArgument(std::string("report has no value '") + name + "'");
    }
    *out = it->second;
  });
}

// ---- training / evaluation ----

myodyn_status myodyn_train(const myodyn_train_config* config,
                           const myodyn_dataset* dataset, const char* out_dir,
                           myodyn_checkpoint** checkpoint_out,
                           myodyn_report** report_out) {
  return Call([&] {
    NotNull(config, "config");
    NotNull(dataset, "dataset");
    if (out_dir != nullptr) EnsureDir(out_dir);
    const myodyn::TrainResult r = myodyn::Train(config->config, dataset->data);
    if (out_dir != nullptr) {
      myodyn::SaveCheckpoint(OutPath(out_dir, "checkpoint.bin"), r.checkpoint);
      myodyn::WriteLossTraceCsv(OutPath(out_dir, "loss_trace.csv"), r.trace);
      myodyn::WriteEvalTraceCsv(OutPath(out_dir, "eval_trace.csv"), r.evals);
      myodyn::WriteFileAtomic(OutPath(out_dir, "train_config.yaml"),
                              config->config.ToYaml());
    }
    auto report = std::make_unique<myodyn_report>();
    report->values["iterations"] = static_cast<double>(r.trace.size());
    report->values["checkpoint_iteration"] = r.checkpoint.iteration;
    report->values["diverged"] = r.diverged ? 1.0 : 0.0;
    report->values["train_windows"] = static_cast<double>(r.split.train.size());
    report->values["test_windows"] = static_cast<double>(r.split.test.size());
    report->values["dropped_windows"] = static_cast<double>(r.split.dropped);
    report->values["final_objective"] =
        r.trace.empty() ? 0.0 : r.trace.back().objective;
    std::ostringstream os;
    os << r.trace.size() << " iterations; checkpoint from iteration "
       << r.checkpoint.iteration << "; windows train/test/dropped "
       << r.split.train.size() << "/" << r.split.test.size() << "/"
       << r.split.dropped << "\n";
    if (!r.evals.empty()) {
      const auto& e = r.evals.back();
      os << "last test evaluation (iteration " << e.iteration << "): R2(a) "
         << e.r2_a << ", R2(F) " << e.r2_f << "\n";
    }
    if (r.diverged) os << "warning: " << r.message << "\n";
    report->text = os.str();
    if (report_out != nullptr) *report_out = report.release();
    if (r.diverged) throw myodyn::Error(ErrorKind::kNumeric, r.message);
    if (checkpoint_out != nullptr) {
      *checkpoint_out = new myodyn_checkpoint{r.checkpoint};
    }
  });
}

myodyn_status myodyn_checkpoint_load(const char* path, myodyn_checkpoint** out) {
  return Call([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    *out = new myodyn_checkpoint{myodyn::LoadCheckpoint(path)};
  });
}

myodyn_status myodyn_checkpoint_save(const myodyn_checkpoint* ckpt, const char* path) {
  return Call([&] {
    NotNull(ckpt, "checkpoint");
    NotNull(path, "path");
    myodyn::SaveCheckpoint(path, ckpt->ckpt);
  });
}

void myodyn_checkpoint_free(myodyn_checkpoint* ckpt) { delete ckpt; }

myodyn_status myodyn_evaluate(const myodyn_checkpoint* ckpt, const myodyn_dataset* dataset,
                              size_t latency_runs, const char* out_dir,
                              myodyn_report** report_out) {
  return Call([&] {
    NotNull(ckpt, "checkpoint");
    NotNull(dataset, "dataset");
    const auto& c = ckpt->ckpt;
    const auto lengths = dataset->data.Lengths();
    const auto split = myodyn::SplitTrainTest(
        lengths, myodyn::SegmentWindows(lengths, c.window, c.stride), c.window, c.split);
    myodyn::EvalOptions options;
    options.measure_latency = latency_runs > 0;
    options.latency_runs = latency_runs;
    myodyn::PredictionSet predictions;
    if (out_dir != nullptr) EnsureDir(out_dir);
    const myodyn::MetricsReport m =
        myodyn::Evaluate(c, dataset->data, split.test, options, &predictions);
    if (out_dir != nullptr) {
      myodyn::WriteMetricsCsv(OutPath(out_dir, "metrics.csv"), m);
      myodyn::WritePredictionsCsv(OutPath(out_dir, "predictions.csv"), predictions,
                                  dataset->data);
    }
    auto report = std::make_unique<myodyn_report>();
    report->text = myodyn::FormatMetricsTable(m);
    PutMetrics(*report, m);
    if (report_out != nullptr) *report_out = report.release();
  });
}

myodyn_status myodyn_ablate(const myodyn_train_config* config,
                            const myodyn_dataset* dataset, const char* out_dir,
                            myodyn_report** report_out) {
  return Call([&] {
    NotNull(config, "config");
    NotNull(dataset, "dataset");
    if (out_dir != nullptr) EnsureDir(out_dir);
    const auto results = myodyn::RunAblation(config->config, dataset->data);
    if (out_dir != nullptr) {
      myodyn::WriteExperimentsCsv(OutPath(out_dir, "ablation.csv"), results);
    }
    auto report = std::make_unique<myodyn_report>();
    PutExperiments(*report, results);
    if (report_out != nullptr) *report_out = report.release();
  });
}

myodyn_status myodyn_sweep_omega(const myodyn_train_config* config,
                                 const myodyn_dataset* dataset, const double* grid,
                                 size_t grid_size, const char* out_dir,
                                 myodyn_report** report_out) {
  return Call([&] {
    NotNull(config, "config");
    NotNull(dataset, "dataset");
    if (grid == nullptr || grid_size == 0) throw InvalidArgument("omega grid is empty");
    const std::vector<double> g(grid, grid + grid_size);
    if (out_dir != nullptr) EnsureDir(out_dir);
    const auto results = myodyn::SweepOmega(config->config, dataset->data, g);
    if (out_dir != nullptr) {
      myodyn::WriteExperimentsCsv(OutPath(out_dir, "omega_sweep.csv"), results);
    }
    auto report = std::make_unique<myodyn_report>();
    PutExperiments(*report, results);
    if (report_out != nullptr) *report_out = report.release();
  });
}

myodyn_status myodyn_gradcheck(uint64_t seed, myodyn_report** report_out) {
  return Call([&] {
    const myodyn::AuditResult a = myodyn::RunGradientAudit(seed);
    auto report = std::make_unique<myodyn_report>();
    report->text = myodyn::FormatAudit(a);
    report->values["passed"] = a.ok() ? 1.0 : 0.0;
    report->values["max_rel_err"] = a.max_rel_err();
    report->values["checks"] = static_cast<double>(a.entries.size());
    report->values["seconds"] = a.seconds;
    if (report_out != nullptr) *report_out = report.release();
  });
}

}  // extern "C"
