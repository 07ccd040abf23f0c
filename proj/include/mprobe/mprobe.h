/*
 * Copyright 2026 The mprobe Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#ifndef MPROBE_MPROBE_H
#define MPROBE_MPROBE_H

/*
 * C interface to libmprobe: latent-tensor rank strata, SPSD product-manifold
 * kernels, Hilbert-space subspace dimensions and principal angles.
 *
 * Conventions
 *   - Every fallible call returns an mprobe_status; MPROBE_OK is 0 and the
 *     non-zero values match the `mprobe` CLI exit codes.
 *   - On failure, mprobe_last_error() / mprobe_last_error_kind() describe the
 *     most recent error on the calling thread. The strings stay valid until
 *     the next failing call on that thread.
 *   - Tensors are dense, C row-major (n1, n2, n3) float64 arrays. Matrices are
 *     row-major.
 *   - Handles are opaque; each *_create has a matching *_destroy, and destroy
 *     accepts NULL.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define MPROBE_API __declspec(dllexport)
#elif defined(__GNUC__)
#  define MPROBE_API __attribute__((visibility("default")))
#else
#  define MPROBE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mprobe_status {
  MPROBE_OK = 0,
  MPROBE_ERR_INTERNAL = 1,
  MPROBE_ERR_CONFIG = 2,
  MPROBE_ERR_DATA = 3,
  MPROBE_ERR_NUMERICAL = 4
} mprobe_status;

typedef enum mprobe_stage {
  MPROBE_STAGE_RANKS = 0,
  MPROBE_STAGE_EMBED = 1,
  MPROBE_STAGE_ANGLES = 2,
  MPROBE_STAGE_REPORT = 3
} mprobe_stage;

MPROBE_API const char* mprobe_version(void);
MPROBE_API const char* mprobe_last_error(void);
/* Error kind name such as "SchemaViolation" or "NotPSD"; "" if none. */
MPROBE_API const char* mprobe_last_error_kind(void);

/* ---- staged pipeline ---------------------------------------------------- */

typedef struct mprobe_run_config mprobe_run_config;

MPROBE_API mprobe_status mprobe_run_config_create(mprobe_run_config** out);
MPROBE_API void mprobe_run_config_destroy(mprobe_run_config* cfg);
MPROBE_API mprobe_status mprobe_run_config_set_manifest(mprobe_run_config* cfg, const char* path);
MPROBE_API mprobe_status mprobe_run_config_set_out_dir(mprobe_run_config* cfg, const char* path);
MPROBE_API mprobe_status mprobe_run_config_set_tol_rel(mprobe_run_config* cfg, double tol_rel);
MPROBE_API mprobe_status mprobe_run_config_set_eps_reg(mprobe_run_config* cfg, double eps_reg);
MPROBE_API mprobe_status mprobe_run_config_set_weights(mprobe_run_config* cfg, const double weights[3]);
MPROBE_API mprobe_status mprobe_run_config_set_lambdas(mprobe_run_config* cfg, const double lambdas[3]);
MPROBE_API mprobe_status mprobe_run_config_set_dim_threshold(mprobe_run_config* cfg, double threshold);
MPROBE_API mprobe_status mprobe_run_config_set_clean_group(mprobe_run_config* cfg, const char* group_id);
MPROBE_API mprobe_status mprobe_run_config_set_psnr(mprobe_run_config* cfg, const char* path);
MPROBE_API mprobe_status mprobe_run_config_set_deterministic(mprobe_run_config* cfg, int deterministic);

MPROBE_API mprobe_status mprobe_run_stage(const mprobe_run_config* cfg, mprobe_stage stage);

/* ---- single-tensor analysis --------------------------------------------- */

typedef struct mprobe_metric {
  double weights[3];
  double lambdas[3];
  double eps_reg;
} mprobe_metric;

/* weights = lambdas = 1, eps_reg = 1e-6 */
MPROBE_API void mprobe_metric_default(mprobe_metric* out);

MPROBE_API mprobe_status mprobe_rank_tuple(const double* tensor, const size_t shape[3], double tol_rel,
                                           int32_t ranks_out[3]);

typedef struct mprobe_point mprobe_point;

MPROBE_API mprobe_status mprobe_point_create(const double* tensor, const size_t shape[3],
                                             const int32_t target_ranks[3], const mprobe_metric* metric,
                                             double tol_rel, mprobe_point** out);
MPROBE_API void mprobe_point_destroy(mprobe_point* p);
/* Pre-regularisation rank tuple recorded on the point. */
MPROBE_API mprobe_status mprobe_point_ranks(const mprobe_point* p, int32_t ranks_out[3]);

MPROBE_API mprobe_status mprobe_kernel(const mprobe_point* p, const mprobe_point* q, const mprobe_metric* metric,
                                       double* out);
MPROBE_API mprobe_status mprobe_geodesic_distance(const mprobe_point* p, const mprobe_point* q,
                                                  const mprobe_metric* metric, double* out);

/* ---- Hilbert-space helpers ---------------------------------------------- */

/* Gram matrix of `count` points, written row-major into out (count*count). */
MPROBE_API mprobe_status mprobe_gram_matrix(const mprobe_point* const* points, size_t count,
                                            const mprobe_metric* metric, double* out);

MPROBE_API mprobe_status mprobe_subspace_dimension(const double* k, size_t n, double threshold, size_t* d_out);

/* q1: n x d1 and q2: n x d2, orthonormal columns. Writes min(d1, d2) angles,
 * nondecreasing, into angles_out. */
MPROBE_API mprobe_status mprobe_principal_angles(const double* q1, size_t n, size_t d1, const double* q2, size_t d2,
                                                 double* angles_out);

/* ---- synthetic data ----------------------------------------------------- */

/* Writes <out_dir>/manifest.json plus one .npy per group. Group g has noise
 * level noise_levels[g] (noise_levels[0] must be 0), `count` tensors, and
 * cycles through `n_tuples` rank tuples from ranks (row-major n_tuples x 3,
 * shared by all groups) offset by g. */
MPROBE_API mprobe_status mprobe_synth_tucker_dataset(const char* out_dir, const char* model_id,
                                                     const size_t shape[3], const double* noise_levels,
                                                     size_t n_groups, size_t count, const int32_t* ranks,
                                                     size_t n_tuples, uint64_t seed, int float32);

#ifdef __cplusplus
}
#endif

#endif /* MPROBE_MPROBE_H */
