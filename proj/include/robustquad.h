/* robustquad: action-robust reinforcement-learning controllers for a
 * simulated quadcopter. C API of the shared library.
 *
 * All functions are thread-compatible: distinct handles may be used from
 * distinct threads, a single handle must not be shared without external
 * locking. Functions returning rq_status leave a human-readable message in
 * rq_last_error() on failure (thread-local).
 */
#ifndef ROBUSTQUAD_H
#define ROBUSTQUAD_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rq_status {
  RQ_OK = 0,
  RQ_ERR_USAGE = 1,     /* inconsistent inputs (e.g. mismatched grids) */
  RQ_ERR_CONFIG = 2,    /* unknown key, bad value, invariant violation */
  RQ_ERR_FORMAT = 3,    /* corrupt or incompatible file */
  RQ_ERR_DIVERGED = 4,  /* training produced non-finite parameters */
  RQ_ERR_IO = 5,        /* filesystem failure */
  RQ_ERR_INTERNAL = 6
} rq_status;

const char* rq_version(void);
const char* rq_status_name(rq_status status);
/* Message of the most recent failure on this thread; empty if none. */
const char* rq_last_error(void);

/* ------------------------------------------------------------------ */
/* Configuration: flat dotted keys with table-backed defaults.         */

typedef struct rq_config rq_config;

rq_config* rq_config_new(void); /* defaults */
rq_config* rq_config_clone(const rq_config* cfg);
void rq_config_free(rq_config* cfg);

/* Merges `key = value` lines over the current values. */
rq_status rq_config_load_file(rq_config* cfg, const char* path);
rq_status rq_config_set(rq_config* cfg, const char* key, const char* value);
/* Copies the value into buf (NUL terminated). */
rq_status rq_config_get(const rq_config* cfg, const char* key, char* buf,
                        size_t buf_size);
/* Writes the resolved snapshot (every key, schema order). */
rq_status rq_config_write_file(const rq_config* cfg, const char* path);
/* Validates all values and cross-field invariants. */
rq_status rq_config_validate(const rq_config* cfg);

/* ------------------------------------------------------------------ */
/* Training.                                                           */

typedef struct rq_train_report {
  uint64_t step;          /* gradient-bearing environment steps done */
  uint64_t total_steps;   /* configured budget */
  uint64_t episode;
  double last_episode_return;
  double last_eval_return; /* valid when has_eval != 0 */
  int has_eval;
} rq_train_report;

typedef void (*rq_train_progress_fn)(const rq_train_report* report, void* user);

/* Runs the algorithm selected by run.algorithm ("ar-ddpg" or "ddpg") and
 * writes into out_dir: checkpoint.rqc, train_log.csv, eval_log.csv and
 * config.resolved. progress may be NULL. */
rq_status rq_train(const rq_config* cfg, const char* out_dir,
                   rq_train_progress_fn progress, void* user);

/* ------------------------------------------------------------------ */
/* Checkpoints.                                                        */

typedef struct rq_checkpoint rq_checkpoint;

rq_checkpoint* rq_checkpoint_load(const char* path, rq_status* status);
rq_status rq_checkpoint_save(const rq_checkpoint* ckpt, const char* path);
void rq_checkpoint_free(rq_checkpoint* ckpt);

int rq_checkpoint_network_count(const rq_checkpoint* ckpt);
/* One line per network, e.g. "actor dims=18,64,64,4 params=5636". */
rq_status rq_checkpoint_describe(const rq_checkpoint* ckpt, int index, char* buf,
                                 size_t buf_size);

/* ------------------------------------------------------------------ */
/* Robustness sweep and comparison.                                    */

typedef struct rq_heatmap rq_heatmap;

/* Sweeps the configured grid with the checkpoint's actor network and writes
 * heatmap.csv, returns.csv and config.resolved into out_dir. When out is
 * non-NULL it receives the heatmap (caller frees). */
rq_status rq_sweep(const rq_config* cfg, const rq_checkpoint* ckpt,
                   const char* out_dir, rq_heatmap** out);

rq_heatmap* rq_heatmap_load(const char* csv_path, rq_status* status);
void rq_heatmap_free(rq_heatmap* map);

int rq_heatmap_mass_count(const rq_heatmap* map);
int rq_heatmap_delta_count(const rq_heatmap* map);
double rq_heatmap_mass_ratio(const rq_heatmap* map, int i);
double rq_heatmap_delta(const rq_heatmap* map, int j);
double rq_heatmap_mean_return(const rq_heatmap* map, int i, int j);

/* Elementwise difference a - b and the fraction of cells where a's mean
 * return strictly exceeds b's. Requires identical grids (RQ_ERR_USAGE
 * otherwise, message naming both grids). diff_csv_path may be NULL. */
rq_status rq_compare(const rq_heatmap* a, const rq_heatmap* b,
                     const char* diff_csv_path, double* win_fraction);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ROBUSTQUAD_H */
