// Copyright 2026 The kerrfb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KERRFB_KERRFB_H_
#define KERRFB_KERRFB_H_

/* C interface to the Kerr-resonator feedback simulator. Every function
 * returns a kfb_status; on failure kfb_last_error() describes the cause for
 * the calling thread. Physical quantities cross this boundary in SI units
 * (rad/s, s) unless a name says otherwise. */

#include <stddef.h>
#include <stdint.h>

#if defined(KERRFB_BUILDING_LIBRARY)
#define KFB_API __attribute__((visibility("default")))
#else
#define KFB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kfb_status {
  KFB_OK = 0,
  KFB_INVALID_ARGUMENT = 1,
  KFB_CONFIG = 2,
  KFB_NUMERICAL = 3,
  KFB_SCHEDULE = 4,
  KFB_CALIBRATION = 5,
  KFB_NO_BISTABILITY = 6,
  KFB_TRUNCATION = 7,
  KFB_IO = 8,
  KFB_INDEX = 9,
  KFB_DEGENERATE = 10,
  KFB_INTERNAL = 11
} kfb_status;

typedef struct kfb_config kfb_config;
typedef struct kfb_schedule kfb_schedule;
typedef struct kfb_result kfb_result;

KFB_API const char* kfb_version(void);
KFB_API const char* kfb_last_error(void);
KFB_API const char* kfb_status_name(kfb_status s);

/* ---- configuration --------------------------------------------------- */

/* A configuration is a sectioned key-value document. [system] and
 * [protocol] hold the simulation parameters; other sections are carried
 * along untouched (run manifests use [run]). */
KFB_API kfb_status kfb_config_new(int with_defaults, kfb_config** out);
KFB_API kfb_status kfb_config_merge_file(kfb_config* cfg, const char* path);
KFB_API kfb_status kfb_config_merge_text(kfb_config* cfg, const char* text);
KFB_API kfb_status kfb_config_set(kfb_config* cfg, const char* section,
                                  const char* key, const char* value);
/* Copies the value into buf (NUL-terminated). *needed receives the length
 * including the terminator; KFB_INVALID_ARGUMENT when buf is too small. */
KFB_API kfb_status kfb_config_get(const kfb_config* cfg, const char* section,
                                  const char* key, char* buf, size_t len,
                                  size_t* needed);
KFB_API kfb_status kfb_config_validate(const kfb_config* cfg);
KFB_API kfb_status kfb_config_write(const kfb_config* cfg, const char* path);
KFB_API void kfb_config_free(kfb_config* cfg);

typedef struct kfb_derived {
  double chi;
  double chi_formula;
  double gamma_p;
  double gamma_total;
  double n_crit;
  double delta_ac;
  double latch_threshold;
} kfb_derived;

KFB_API kfb_status kfb_config_derived(const kfb_config* cfg, kfb_derived* out);

typedef struct kfb_threshold {
  double alpha_d_low;
  double alpha_d_high;
  double plateau;
} kfb_threshold;

/* Noise-free network calibration; does not modify cfg. */
KFB_API kfb_status kfb_calibrate_threshold(const kfb_config* cfg,
                                           kfb_threshold* out);
/* Fills every "auto" calibrated protocol key of cfg with its value. */
KFB_API kfb_status kfb_calibrate(kfb_config* cfg);

/* ---- schedules --------------------------------------------------------- */

KFB_API kfb_status kfb_schedule_state_prep(const kfb_config* cfg,
                                           kfb_schedule** out);
KFB_API kfb_status kfb_schedule_stabilization(const kfb_config* cfg,
                                              uint32_t n_cycles,
                                              kfb_schedule** out);
/* Memory schedule whose retuning starts at t_retune seconds. */
KFB_API kfb_status kfb_schedule_memory(const kfb_config* cfg, double t_retune,
                                       int pre_pi, kfb_schedule** out);
KFB_API kfb_status kfb_schedule_memory_wait(const kfb_config* cfg,
                                            double t_wait, int pre_pi,
                                            kfb_schedule** out);
KFB_API kfb_status kfb_schedule_load(const char* path, kfb_schedule** out);
KFB_API kfb_status kfb_schedule_write(const kfb_schedule* s, const char* path);
KFB_API kfb_status kfb_schedule_duration(const kfb_schedule* s, double* out);
KFB_API kfb_status kfb_schedule_segments(const kfb_schedule* s, size_t* out);
/* 16 hex digits plus terminator. */
KFB_API kfb_status kfb_schedule_hash(const kfb_schedule* s, char out[17]);
KFB_API void kfb_schedule_free(kfb_schedule* s);

/* ---- ensembles --------------------------------------------------------- */

typedef struct kfb_run_options {
  size_t n_traj;
  uint64_t seed;
  /* Probability of starting in |1>; the rest start in |0>. */
  double p_excited;
  int noise;
  /* 0 selects the hardware concurrency. */
  unsigned workers;
} kfb_run_options;

KFB_API kfb_run_options kfb_run_options_default(void);
KFB_API kfb_status kfb_run_ensemble(const kfb_config* cfg,
                                    const kfb_schedule* s,
                                    const kfb_run_options* opt,
                                    kfb_result** out);

typedef enum kfb_series {
  KFB_SERIES_TIME = 0,
  KFB_SERIES_SZ = 1,
  KFB_SERIES_NA = 2,
  KFB_SERIES_NB = 3
} kfb_series;

typedef enum kfb_fidelity_kind {
  KFB_FIDELITY_FINAL = 0,
  KFB_FIDELITY_TIME_AVERAGED = 1,
  KFB_FIDELITY_PROTOCOL_END = 2
} kfb_fidelity_kind;

KFB_API kfb_status kfb_result_length(const kfb_result* r, size_t* out);
KFB_API kfb_status kfb_result_series(const kfb_result* r, kfb_series which,
                                     double* buf, size_t len);
KFB_API kfb_status kfb_result_fidelity(const kfb_result* r,
                                       kfb_fidelity_kind kind,
                                       int target_excited, double* out);
KFB_API kfb_status kfb_result_fidelity_at(const kfb_result* r, double t,
                                          int target_excited, double* out);
KFB_API kfb_status kfb_result_latching_fraction(const kfb_result* r,
                                                double threshold_n,
                                                double* out);
KFB_API kfb_status kfb_result_counts(const kfb_result* r, size_t* n_traj,
                                     size_t* n_failed);
KFB_API kfb_status kfb_result_write_means(const kfb_result* r,
                                          const char* path);
KFB_API kfb_status kfb_result_write_finals(const kfb_result* r,
                                           const char* path);
KFB_API void kfb_result_free(kfb_result* r);

/* One trajectory of an ensemble (same seed as its index in the |0> or |1>
 * group), sampled every `stride` steps. */
KFB_API kfb_status kfb_write_trajectory(const kfb_config* cfg,
                                        const kfb_schedule* s,
                                        int excited, uint64_t index,
                                        int noise, size_t stride,
                                        const char* path);

/* ---- isolated Kerr resonator ------------------------------------------- */

typedef struct kfb_kerr {
  double delta_a;
  double K;
  double kappa_a;
  double kappa_d;
} kfb_kerr;

typedef struct kfb_critical {
  double n_c_minus;
  double n_c_plus;
  double drive_power_minus;
  double drive_power_plus;
} kfb_critical;

KFB_API kfb_status kfb_kerr_from_config(const kfb_config* cfg, kfb_kerr* out);
KFB_API kfb_status kfb_critical_point(const kfb_kerr* k, kfb_critical* out);
/* Hysteresis sweep over `points` drive powers in [p_min, p_max]. */
KFB_API kfb_status kfb_bifurcation_csv(const kfb_kerr* k, double p_min,
                                       double p_max, size_t points,
                                       const char* path);

/* ---- quantum oracle ---------------------------------------------------- */

typedef struct kfb_oracle_options {
  size_t dim;
  double ramp;
  double duration;
  size_t n_traj;
  uint64_t seed;
  unsigned workers;
} kfb_oracle_options;

KFB_API kfb_oracle_options kfb_oracle_options_default(void);
/* Drive (alpha_d / sqrt(kappa_d)) at which the mean-field ensemble latches
 * with probability `target`. */
KFB_API kfb_status kfb_oracle_calibrate_drive(const kfb_config* cfg,
                                              const kfb_oracle_options* opt,
                                              double target, double* out);
/* Writes oracle_drive_<i>.csv per drive and latching.csv into out_dir. */
KFB_API kfb_status kfb_oracle_compare(const kfb_config* cfg,
                                      const kfb_oracle_options* opt,
                                      const double* drives, size_t n_drives,
                                      const char* out_dir,
                                      double* latch_mcwf,
                                      double* latch_semiclassical);

#ifdef __cplusplus
}
#endif

#endif /* KERRFB_KERRFB_H_ */
