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

// Command-line front end. Talks to the library only through the C API.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "myodyn/myodyn.h"

#ifndef MYODYN_DEFAULT_MODEL
#define MYODYN_DEFAULT_MODEL "models/knee5.cfg"
#endif

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

// Owning wrappers around the opaque C handles.
template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Model = std::unique_ptr<myodyn_model, Deleter<myodyn_model, myodyn_model_free>>;
using Kinematics =
    std::unique_ptr<myodyn_kinematics, Deleter<myodyn_kinematics, myodyn_kinematics_free>>;
using Config = std::unique_ptr<myodyn_train_config,
                               Deleter<myodyn_train_config, myodyn_train_config_free>>;
using Dataset =
    std::unique_ptr<myodyn_dataset, Deleter<myodyn_dataset, myodyn_dataset_free>>;
using Checkpoint = std::unique_ptr<myodyn_checkpoint,
                                   Deleter<myodyn_checkpoint, myodyn_checkpoint_free>>;
using Report = std::unique_ptr<myodyn_report, Deleter<myodyn_report, myodyn_report_free>>;

// Carries a library status out of a subcommand.
struct Failure {
  myodyn_status status;
  std::string context;
};

void Check(myodyn_status status, const std::string& context) {
  if (status != MYODYN_OK) throw Failure{status, context};
}

int ExitCodeFor(myodyn_status status) {
  return myodyn_status_is_validation(status) ? kExitValidation : kExitRuntime;
}

struct GlobalOptions {
  std::string config;
  std::optional<uint64_t> seed;
  std::string out = "out";
  bool quiet = false;
};

std::string JoinPath(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

Model LoadModel(const std::string& path) {
  myodyn_model* m = nullptr;
  Check(myodyn_model_load(path.c_str(), &m), "loading model '" + path + "'");
  return Model(m);
}

Kinematics LoadKinematics(const std::string& path) {
  myodyn_kinematics* k = nullptr;
  Check(myodyn_kinematics_read_csv(path.c_str(), &k),
        "reading kinematics '" + path + "'");
  return Kinematics(k);
}

Dataset MakeDataset(const myodyn_model* model, const myodyn_kinematics* k,
                    const std::string& labels) {
  myodyn_dataset* d = nullptr;
  Check(myodyn_dataset_create(model, k, labels.empty() ? nullptr : labels.c_str(), &d),
        "preparing dataset");
  return Dataset(d);
}

// Config precedence: file (or defaults) < MYODYN_SEED < --seed.
Config MakeConfig(const GlobalOptions& g) {
  myodyn_train_config* c = nullptr;
  if (g.config.empty()) {
    Check(myodyn_train_config_default(&c), "creating default config");
  } else {
    Check(myodyn_train_config_load(g.config.c_str(), &c),
          "loading config '" + g.config + "'");
  }
  Config config(c);
  Check(myodyn_train_config_apply_env(config.get(), nullptr), "applying MYODYN_SEED");
  if (g.seed) Check(myodyn_train_config_set_seed(config.get(), *g.seed), "--seed");
  return config;
}

void PrintReport(const myodyn_report* report, const GlobalOptions& g) {
  if (!g.quiet) std::fputs(myodyn_report_text(report), stdout);
}

double Value(const myodyn_report* report, const char* name) {
  double v = 0.0;
  Check(myodyn_report_value(report, name, &v), std::string("report value ") + name);
  return v;
}

std::vector<double> ParseGrid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw CLI::ValidationError("--grid", "'" + item + "' is not a number");
    }
    grid.push_back(v);
  }
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge-based muscle activation and force estimation"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(myodyn_version()));

  GlobalOptions g;
  uint64_t seed = 0;
  app.add_option("--config", g.config, "Training config file")
      ->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "Random seed (overrides config)");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_flag("-q,--quiet", g.quiet, "Only report errors");

  std::string model_path = MYODYN_DEFAULT_MODEL;
  std::string kinematics_path, labels_path, checkpoint_path;

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Generate synthetic kinematics CSV");
  std::string protocol = "knee";
  myodyn_trajectory_options traj;
  myodyn_trajectory_options_init(&traj);
  gen->add_option("--protocol", protocol, "knee | elbow")
      ->check(CLI::IsMember({"knee", "elbow"}))
      ->capture_default_str();
  gen->add_option("--trials", traj.trials, "Number of trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gen->add_option("--duration", traj.duration_s, "Trial duration, s")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gen->add_option("--rate", traj.rate_hz, "Sampling rate, Hz")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gen->add_option("--noise-deg", traj.noise_rms_deg, "Smooth noise RMS, degrees")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Label kinematics with static optimization");
  oracle->add_option("--kinematics", kinematics_path, "Kinematics CSV")
      ->required()
      ->check(CLI::ExistingFile);
  oracle->add_option("--model", model_path, "Musculoskeletal model config")
      ->check(CLI::ExistingFile)
      ->capture_default_str();

  // train
  auto* train = app.add_subcommand("train", "Train the network");
  int iters = 0;
  std::string mode, losses;
  train->add_option("--kinematics", kinematics_path, "Kinematics CSV")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--labels", labels_path,
                    "Oracle label CSV (enables test-split checkpoint selection)")
      ->check(CLI::ExistingFile);
  train->add_option("--model", model_path, "Musculoskeletal model config")
      ->check(CLI::ExistingFile)
      ->capture_default_str();
  train->add_option("--iters", iters, "Override max_iters")->check(CLI::PositiveNumber);
  train->add_option("--mode", mode, "Override loss_mode")
      ->check(CLI::IsMember({"knowledge", "supervised"}));
  train->add_option("--losses", losses, "Override enabled_losses, e.g. mfpb");

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on the test split");
  std::size_t latency_runs = 1000;
  eval->add_option("--checkpoint", checkpoint_path, "Checkpoint file")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--kinematics", kinematics_path, "Kinematics CSV")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--labels", labels_path, "Oracle label CSV")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--model", model_path, "Musculoskeletal model config")
      ->check(CLI::ExistingFile)
      ->capture_default_str();
  eval->add_option("--latency-runs", latency_runs, "Single-window timing runs (0 = skip)")
      ->capture_default_str();

  // ablate / sweep-omega
  auto* ablate = app.add_subcommand("ablate", "Leave-one-out loss ablation");
  auto* sweep = app.add_subcommand("sweep-omega", "Sweep the loss weight omega");
  std::string grid_text = "1,10,100,1000";
  for (CLI::App* sub : {ablate, sweep}) {
    sub->add_option("--kinematics", kinematics_path, "Kinematics CSV")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--labels", labels_path, "Oracle label CSV")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--model", model_path, "Musculoskeletal model config")
        ->check(CLI::ExistingFile)
        ->capture_default_str();
    sub->add_option("--iters", iters, "Override max_iters")->check(CLI::PositiveNumber);
  }
  sweep->add_option("--grid", grid_text, "Comma-separated omega values")
      ->capture_default_str();

  // gradcheck
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient audit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return kExitOk;
    std::fputs(app.help().c_str(), stderr);
    return kExitValidation;
  }
  if (*seed_opt) g.seed = seed;
  myodyn_set_log_level(g.quiet ? 3 : 1);

  try {
    if (*gen) {
      traj.protocol = protocol.c_str();
      traj.seed = g.seed.value_or(1);
      myodyn_kinematics* k = nullptr;
      Check(myodyn_kinematics_generate(&traj, &k), "generating trajectories");
      Kinematics kin(k);
      std::filesystem::create_directories(g.out);
      const std::string path = JoinPath(g.out, "kinematics.csv");
      Check(myodyn_kinematics_write_csv(kin.get(), path.c_str()), "writing " + path);
      if (!g.quiet) {
        std::printf("wrote %s (%zu trajectories, %zu samples)\n", path.c_str(),
                    myodyn_kinematics_trajectory_count(kin.get()),
                    myodyn_kinematics_sample_count(kin.get()));
      }
    } else if (*oracle) {
      Model model = LoadModel(model_path);
      Kinematics kin = LoadKinematics(kinematics_path);
      std::filesystem::create_directories(g.out);
      const std::string path = JoinPath(g.out, "labels.csv");
      myodyn_oracle_summary s{};
      Check(myodyn_oracle_label(model.get(), kin.get(), path.c_str(), &s),
            "labelling " + kinematics_path);
      if (!g.quiet) {
        std::printf(
            "wrote %s: %zu samples, %zu clamped, %zu infeasible, "
            "max torque residual %.3g N*m (feasible steps)\n",
            path.c_str(), s.samples, s.clamped, s.infeasible, s.max_torque_residual);
      }
    } else if (*train) {
      myodyn_configure_for_training();
      Config config = MakeConfig(g);
      if (iters > 0) Check(myodyn_train_config_set_max_iters(config.get(), iters), "--iters");
      if (!mode.empty()) {
        Check(myodyn_train_config_set_loss_mode(config.get(), mode.c_str()), "--mode");
      }
      if (!losses.empty()) {
        Check(myodyn_train_config_set_enabled_losses(config.get(), losses.c_str()),
              "--losses");
      }
      Model model = LoadModel(model_path);
      Kinematics kin = LoadKinematics(kinematics_path);
      Dataset data = MakeDataset(model.get(), kin.get(), labels_path);
      myodyn_report* r = nullptr;
      const myodyn_status st =
          myodyn_train(config.get(), data.get(), g.out.c_str(), nullptr, &r);
      Report report(r);
      if (report) PrintReport(report.get(), g);
      Check(st, "training");
      if (!g.quiet) std::printf("outputs in %s\n", g.out.c_str());
    } else if (*eval) {
      myodyn_checkpoint* c = nullptr;
      Check(myodyn_checkpoint_load(checkpoint_path.c_str(), &c),
            "loading checkpoint '" + checkpoint_path + "'");
      Checkpoint ckpt(c);
      Model model = LoadModel(model_path);
      Kinematics kin = LoadKinematics(kinematics_path);
      Dataset data = MakeDataset(model.get(), kin.get(), labels_path);
      myodyn_report* r = nullptr;
      Check(myodyn_evaluate(ckpt.get(), data.get(), latency_runs, g.out.c_str(), &r),
            "evaluating");
      Report report(r);
      PrintReport(report.get(), g);
    } else if (*ablate || *sweep) {
      myodyn_configure_for_training();
      Config config = MakeConfig(g);
      if (iters > 0) Check(myodyn_train_config_set_max_iters(config.get(), iters), "--iters");
      Model model = LoadModel(model_path);
      Kinematics kin = LoadKinematics(kinematics_path);
      Dataset data = MakeDataset(model.get(), kin.get(), labels_path);
      myodyn_report* r = nullptr;
      if (*ablate) {
        Check(myodyn_ablate(config.get(), data.get(), g.out.c_str(), &r), "ablation");
      } else {
        const std::vector<double> grid = ParseGrid(grid_text);
        Check(myodyn_sweep_omega(config.get(), data.get(), grid.data(), grid.size(),
                                 g.out.c_str(), &r),
              "omega sweep");
      }
      Report report(r);
      PrintReport(report.get(), g);
      if (Value(report.get(), "failed") > 0) {
        std::fprintf(stderr, "error: some runs failed (see status column)\n");
        return kExitRuntime;
      }
    } else if (*gradcheck) {
      myodyn_report* r = nullptr;
      Check(myodyn_gradcheck(g.seed.value_or(7), &r), "gradient audit");
      Report report(r);
      PrintReport(report.get(), g);
      if (Value(report.get(), "passed") != 1.0) {
        std::fprintf(stderr, "error: gradient audit failed (max rel err %.3g)\n",
                     Value(report.get(), "max_rel_err"));
        return kExitValidation;
      }
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s: %s [%s]\n", f.context.c_str(), myodyn_last_error(),
                 myodyn_status_name(f.status));
    return ExitCodeFor(f.status);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n%s", e.what(), app.help().c_str());
    return kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}
