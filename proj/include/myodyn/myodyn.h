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

#ifndef MYODYN_MYODYN_H_
#define MYODYN_MYODYN_H_

/* C interface to the myodyn library: musculoskeletal model evaluation,
 * synthetic kinematics, the static-optimization oracle, knowledge-based
 * training, evaluation and the experiment drivers.
 *
 * Every fallible call returns a myodyn_status. On failure a description is
 * available from myodyn_last_error() on the same thread until the next call.
 * Objects are opaque handles released with their matching *_free function;
 * passing NULL to a *_free function is a no-op. Strings returned by the
 * library stay valid until the owning handle is freed. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(MYODYN_BUILDING_LIBRARY)
#define MYODYN_API __declspec(dllexport)
#else
#define MYODYN_API __declspec(dllimport)
#endif
#else
#define MYODYN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum myodyn_status {
  MYODYN_OK = 0,
  MYODYN_ERR_INVALID_ARGUMENT = 1, /* null pointer, bad enum string, ... */
  MYODYN_ERR_RANGE = 2,            /* joint angle outside the model range */
  MYODYN_ERR_GEOMETRY = 3,         /* infeasible muscle geometry */
  MYODYN_ERR_DIMENSION = 4,        /* mismatched sizes or misaligned files */
  MYODYN_ERR_CONFIG = 5,           /* invalid configuration value */
  MYODYN_ERR_CONTRACT = 6,         /* violated precondition */
  MYODYN_ERR_NUMERIC = 7,          /* non-finite values, divergence */
  MYODYN_ERR_IO = 8,               /* missing, unreadable or malformed file */
  MYODYN_ERR_INTERNAL = 9
} myodyn_status;

MYODYN_API const char* myodyn_version(void);
MYODYN_API const char* myodyn_status_name(myodyn_status status);
/* Message of the last failed call on this thread; "" if none. */
MYODYN_API const char* myodyn_last_error(void);
/* Nonzero for statuses caused by bad user input (arguments, files, config)
 * rather than by a failure while running. */
MYODYN_API int myodyn_status_is_validation(myodyn_status status);
/* Minimum severity printed to stderr: 0 debug, 1 info, 2 warning, 3 error,
 * 4 silent. */
MYODYN_API void myodyn_set_log_level(int level);

/* Tunes the process allocator for long training runs (keeps large tape
 * buffers resident instead of returning them to the OS each iteration).
 * Call once, early, from the owning executable. */
MYODYN_API void myodyn_configure_for_training(void);

/* ---- Musculoskeletal model --------------------------------------------- */

typedef struct myodyn_model myodyn_model;

MYODYN_API myodyn_status myodyn_model_load(const char* path, myodyn_model** out);
MYODYN_API myodyn_status myodyn_model_parse(const char* yaml_text,
                                            myodyn_model** out);
MYODYN_API void myodyn_model_free(myodyn_model* model);
MYODYN_API size_t myodyn_model_muscle_count(const myodyn_model* model);
/* NULL when index is out of range. */
MYODYN_API const char* myodyn_model_muscle_name(const myodyn_model* model,
                                                size_t index);
/* Tendon force of every muscle for activations a[n], n = muscle count. */
MYODYN_API myodyn_status myodyn_model_tendon_forces(const myodyn_model* model,
                                                    double q, double qdot,
                                                    const double* activations,
                                                    double* forces_out);
/* Net muscle torque sum_i F_i r_i for the given activations. */
MYODYN_API myodyn_status myodyn_model_muscle_torque(const myodyn_model* model,
                                                    double q, double qdot,
                                                    const double* activations,
                                                    double* torque_out);
/* Inverse-dynamics torque the muscles must supply. */
MYODYN_API myodyn_status myodyn_model_required_torque(const myodyn_model* model,
                                                      double q, double qdot,
                                                      double qddot,
                                                      double* torque_out);

/* ---- Kinematics ---------------------------------------------------------- */

typedef struct myodyn_kinematics myodyn_kinematics;

typedef struct myodyn_trajectory_options {
  const char* protocol; /* "knee" or "elbow" */
  int trials;
  double duration_s;
  double rate_hz;
  uint64_t seed;
  double noise_rms_deg;
} myodyn_trajectory_options;

MYODYN_API void myodyn_trajectory_options_init(myodyn_trajectory_options* options);
MYODYN_API myodyn_status myodyn_kinematics_generate(
    const myodyn_trajectory_options* options, myodyn_kinematics** out);
MYODYN_API myodyn_status myodyn_kinematics_read_csv(const char* path,
                                                    myodyn_kinematics** out);
MYODYN_API myodyn_status myodyn_kinematics_write_csv(const myodyn_kinematics* k,
                                                     const char* path);
MYODYN_API void myodyn_kinematics_free(myodyn_kinematics* k);
MYODYN_API size_t myodyn_kinematics_trajectory_count(const myodyn_kinematics* k);
MYODYN_API size_t myodyn_kinematics_sample_count(const myodyn_kinematics* k);

/* ---- Static-optimization oracle ------------------------------------------ */

typedef enum myodyn_so_status {
  MYODYN_SO_OPTIMAL = 0,
  MYODYN_SO_CLAMPED = 1,
  MYODYN_SO_INFEASIBLE = 2
} myodyn_so_status;

/* min sum a^2 s.t. sum (c a + d) r = tau_req, 0.01 <= a <= 1, for n muscles. */
MYODYN_API myodyn_status myodyn_so_solve(size_t n, const double* c, const double* d,
                                         const double* r, double tau_req,
                                         double* activations_out,
                                         myodyn_so_status* status_out);

typedef struct myodyn_oracle_summary {
  size_t samples;
  size_t infeasible;
  size_t clamped;
  double max_torque_residual; /* over feasible samples, N m */
} myodyn_oracle_summary;

/* Solves every sample and writes the label CSV aligned with `k`. */
MYODYN_API myodyn_status myodyn_oracle_label(const myodyn_model* model,
                                             const myodyn_kinematics* k,
                                             const char* labels_path,
                                             myodyn_oracle_summary* summary);

/* ---- Training configuration ---------------------------------------------- */

typedef struct myodyn_train_config myodyn_train_config;

MYODYN_API myodyn_status myodyn_train_config_default(myodyn_train_config** out);
MYODYN_API myodyn_status myodyn_train_config_load(const char* path,
                                                  myodyn_train_config** out);
MYODYN_API void myodyn_train_config_free(myodyn_train_config* config);
MYODYN_API myodyn_status myodyn_train_config_set_seed(myodyn_train_config* config,
                                                      uint64_t seed);
MYODYN_API myodyn_status myodyn_train_config_set_max_iters(
    myodyn_train_config* config, int max_iters);
MYODYN_API myodyn_status myodyn_train_config_set_omega(myodyn_train_config* config,
                                                       double omega);
/* "knowledge" or "supervised". */
MYODYN_API myodyn_status myodyn_train_config_set_loss_mode(
    myodyn_train_config* config, const char* mode);
/* Any subset of the letters m, f, p, b. */
MYODYN_API myodyn_status myodyn_train_config_set_enabled_losses(
    myodyn_train_config* config, const char* letters);
/* Applies MYODYN_SEED if set; *applied (optional) reports whether it was. */
MYODYN_API myodyn_status myodyn_train_config_apply_env(myodyn_train_config* config,
                                                       int* applied);
MYODYN_API uint64_t myodyn_train_config_seed(const myodyn_train_config* config);
/* Canonical YAML text of the configuration. */
MYODYN_API const char* myodyn_train_config_yaml(myodyn_train_config* config);

/* ---- Labelled data -------------------------------------------------------- */

/* Kinematics evaluated through a model, optionally with oracle labels. */
typedef struct myodyn_dataset myodyn_dataset;

/* labels_path may be NULL (knowledge training without test-set selection). */
MYODYN_API myodyn_status myodyn_dataset_create(const myodyn_model* model,
                                               const myodyn_kinematics* k,
                                               const char* labels_path,
                                               myodyn_dataset** out);
MYODYN_API void myodyn_dataset_free(myodyn_dataset* dataset);

/* ---- Reports -------------------------------------------------------------- */

/* Result of an evaluation or experiment: a human-readable table plus named
 * scalar values. */
typedef struct myodyn_report myodyn_report;

MYODYN_API void myodyn_report_free(myodyn_report* report);
MYODYN_API const char* myodyn_report_text(const myodyn_report* report);
/* Looks up a named value, e.g. "r2_a", "r2_F", "rmse_a", "rmse_F_N",
 * "latency_median_ms", "passed". MYODYN_ERR_INVALID_ARGUMENT if absent. */
MYODYN_API myodyn_status myodyn_report_value(const myodyn_report* report,
                                             const char* name, double* out);

/* ---- Training and evaluation ---------------------------------------------- */

typedef struct myodyn_checkpoint myodyn_checkpoint;

/* Trains and writes into out_dir (created if needed): checkpoint.bin,
 * loss_trace.csv, eval_trace.csv, train_config.yaml. The report carries
 * "iterations", "checkpoint_iteration", "diverged", "train_windows",
 * "test_windows", "dropped_windows" and "final_objective". Either output
 * pointer may be NULL. */
MYODYN_API myodyn_status myodyn_train(const myodyn_train_config* config,
                                      const myodyn_dataset* dataset,
                                      const char* out_dir,
                                      myodyn_checkpoint** checkpoint_out,
                                      myodyn_report** report_out);

MYODYN_API myodyn_status myodyn_checkpoint_load(const char* path,
                                                myodyn_checkpoint** out);
MYODYN_API myodyn_status myodyn_checkpoint_save(const myodyn_checkpoint* ckpt,
                                                const char* path);
MYODYN_API void myodyn_checkpoint_free(myodyn_checkpoint* ckpt);

/* Evaluates on the checkpoint's test split (recomputed from its windowing)
 * against the dataset's labels. When out_dir is non-NULL writes metrics.csv
 * and predictions.csv there. latency_runs = 0 skips timing. */
MYODYN_API myodyn_status myodyn_evaluate(const myodyn_checkpoint* ckpt,
                                         const myodyn_dataset* dataset,
                                         size_t latency_runs,
                                         const char* out_dir,
                                         myodyn_report** report_out);

/* Leave-one-out ablation over the four knowledge terms plus the full
 * objective; writes ablation.csv into out_dir when non-NULL. */
MYODYN_API myodyn_status myodyn_ablate(const myodyn_train_config* config,
                                       const myodyn_dataset* dataset,
                                       const char* out_dir,
                                       myodyn_report** report_out);

/* One training per omega; writes omega_sweep.csv into out_dir when
 * non-NULL. Failing cells are recorded and the sweep continues. */
MYODYN_API myodyn_status myodyn_sweep_omega(const myodyn_train_config* config,
                                            const myodyn_dataset* dataset,
                                            const double* grid, size_t grid_size,
                                            const char* out_dir,
                                            myodyn_report** report_out);

/* Finite-difference audit of the differentiation engine, network and losses.
 * The report's "passed" value is 1 or 0 and "max_rel_err" the worst error.
 * report_out may be NULL. */
MYODYN_API myodyn_status myodyn_gradcheck(uint64_t seed, myodyn_report** report_out);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* MYODYN_MYODYN_H_ */
