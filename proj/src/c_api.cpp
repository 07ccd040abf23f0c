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

#include <mprobe/mprobe.h>

#include <algorithm>
#include <cstdio>
#include <memory>
#include <new>
#include <string>

#include "error.hpp"
#include "hilbert.hpp"
#include "pipeline.hpp"
#include "spsd_geometry.hpp"
#include "synth.hpp"
#include "unfold_cov.hpp"

struct mprobe_run_config {
  mprobe::RunConfig cfg;
};

struct mprobe_point {
  mprobe::PMPoint point;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_kind;

mprobe_status fail(mprobe_status s, std::string kind, std::string msg) {
  g_kind = std::move(kind);
  g_error = std::move(msg);
  return s;
}

template <typename F>
mprobe_status guarded(F&& f) {
  try {
    f();
    return MPROBE_OK;
  } catch (const mprobe::Error& e) {
    return fail(static_cast<mprobe_status>(e.category()), std::string(mprobe::to_string(e.kind())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(MPROBE_ERR_INTERNAL, "OutOfMemory", "out of memory");
  } catch (const std::exception& e) {
    return fail(MPROBE_ERR_INTERNAL, "Internal", e.what());
  } catch (...) {
    return fail(MPROBE_ERR_INTERNAL, "Internal", "unknown exception");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw mprobe::Error(mprobe::ErrorKind::InvalidArgument, what);
}

mprobe::MetricParams to_metric(const mprobe_metric* m) {
  mprobe::MetricParams p;
  if (m == nullptr) return p;
  for (int i = 0; i < 3; ++i) {
    p.weights[i] = m->weights[i];
    p.lambdas[i] = m->lambdas[i];
  }
  p.eps_reg = m->eps_reg;
  return p;
}

mprobe::Tensor3 to_tensor(const double* data, const size_t shape[3]) {
  require(data != nullptr && shape != nullptr, "tensor and shape must be non-null");
  const mprobe::Shape3 s{shape[0], shape[1], shape[2]};
  return mprobe::Tensor3(s, std::vector<double>(data, data + s.size()));
}

}  // namespace

extern "C" {

const char* mprobe_version(void) { return "1.0.0"; }
const char* mprobe_last_error(void) { return g_error.c_str(); }
const char* mprobe_last_error_kind(void) { return g_kind.c_str(); }

mprobe_status mprobe_run_config_create(mprobe_run_config** out) {
  return guarded([&] {
    require(out != nullptr, "out must be non-null");
    *out = new mprobe_run_config();
  });
}

void mprobe_run_config_destroy(mprobe_run_config* cfg) { delete cfg; }

#define MPROBE_SETTER(name, type, body)                            \
  mprobe_status name(mprobe_run_config* cfg, type value) {         \
    return guarded([&] {                                           \
      require(cfg != nullptr, "config must be non-null");          \
      body;                                                        \
    });                                                            \
  }

MPROBE_SETTER(mprobe_run_config_set_manifest, const char*,
              require(value != nullptr, "path must be non-null");
              cfg->cfg.manifest = value)
MPROBE_SETTER(mprobe_run_config_set_out_dir, const char*,
              require(value != nullptr, "path must be non-null");
              cfg->cfg.out_dir = value)
MPROBE_SETTER(mprobe_run_config_set_tol_rel, double, cfg->cfg.tol_rel = value)
MPROBE_SETTER(mprobe_run_config_set_eps_reg, double, cfg->cfg.metric.eps_reg = value)
MPROBE_SETTER(mprobe_run_config_set_dim_threshold, double, cfg->cfg.dim_threshold = value)
MPROBE_SETTER(mprobe_run_config_set_deterministic, int, cfg->cfg.deterministic = value != 0)
MPROBE_SETTER(mprobe_run_config_set_clean_group, const char*,
              if (value) cfg->cfg.clean_group = value; else cfg->cfg.clean_group.reset())
MPROBE_SETTER(mprobe_run_config_set_psnr, const char*,
              if (value) cfg->cfg.psnr = value; else cfg->cfg.psnr.reset())
MPROBE_SETTER(mprobe_run_config_set_weights, const double*,
              require(value != nullptr, "weights must be non-null");
              for (int i = 0; i < 3; ++i) cfg->cfg.metric.weights[i] = value[i])
MPROBE_SETTER(mprobe_run_config_set_lambdas, const double*,
              require(value != nullptr, "lambdas must be non-null");
              for (int i = 0; i < 3; ++i) cfg->cfg.metric.lambdas[i] = value[i])

#undef MPROBE_SETTER

mprobe_status mprobe_run_stage(const mprobe_run_config* cfg, mprobe_stage stage) {
  return guarded([&] {
    require(cfg != nullptr, "config must be non-null");
    switch (stage) {
      case MPROBE_STAGE_RANKS: return mprobe::run_stage(mprobe::Stage::Ranks, cfg->cfg);
      case MPROBE_STAGE_EMBED: return mprobe::run_stage(mprobe::Stage::Embed, cfg->cfg);
      case MPROBE_STAGE_ANGLES: return mprobe::run_stage(mprobe::Stage::Angles, cfg->cfg);
      case MPROBE_STAGE_REPORT: return mprobe::run_stage(mprobe::Stage::Report, cfg->cfg);
    }
    require(false, "unknown stage");
  });
}

void mprobe_metric_default(mprobe_metric* out) {
  if (out == nullptr) return;
  const mprobe::MetricParams p;
  for (int i = 0; i < 3; ++i) {
    out->weights[i] = p.weights[i];
    out->lambdas[i] = p.lambdas[i];
  }
  out->eps_reg = p.eps_reg;
}

mprobe_status mprobe_rank_tuple(const double* tensor, const size_t shape[3], double tol_rel, int32_t ranks_out[3]) {
  return guarded([&] {
    require(ranks_out != nullptr, "ranks_out must be non-null");
    const auto r = mprobe::rank_tuple(to_tensor(tensor, shape), tol_rel);
    ranks_out[0] = r.r1;
    ranks_out[1] = r.r2;
    ranks_out[2] = r.r3;
  });
}

mprobe_status mprobe_point_create(const double* tensor, const size_t shape[3], const int32_t target_ranks[3],
                                  const mprobe_metric* metric, double tol_rel, mprobe_point** out) {
  return guarded([&] {
    require(out != nullptr && target_ranks != nullptr, "target_ranks and out must be non-null");
    auto p = std::make_unique<mprobe_point>();
    p->point = mprobe::pm_point(to_tensor(tensor, shape), {target_ranks[0], target_ranks[1], target_ranks[2]},
                                to_metric(metric), tol_rel);
    *out = p.release();
  });
}

void mprobe_point_destroy(mprobe_point* p) { delete p; }

mprobe_status mprobe_point_ranks(const mprobe_point* p, int32_t ranks_out[3]) {
  return guarded([&] {
    require(p != nullptr && ranks_out != nullptr, "arguments must be non-null");
    ranks_out[0] = p->point.ranks.r1;
    ranks_out[1] = p->point.ranks.r2;
    ranks_out[2] = p->point.ranks.r3;
  });
}

mprobe_status mprobe_kernel(const mprobe_point* p, const mprobe_point* q, const mprobe_metric* metric, double* out) {
  return guarded([&] {
    require(p != nullptr && q != nullptr && out != nullptr, "arguments must be non-null");
    const auto params = to_metric(metric);
    params.validate();
    *out = mprobe::kernel(p->point, q->point, params);
  });
}

mprobe_status mprobe_geodesic_distance(const mprobe_point* p, const mprobe_point* q, const mprobe_metric* metric,
                                       double* out) {
  return guarded([&] {
    require(p != nullptr && q != nullptr && out != nullptr, "arguments must be non-null");
    const auto params = to_metric(metric);
    params.validate();
    *out = mprobe::geodesic_distance(p->point, q->point, params);
  });
}

mprobe_status mprobe_gram_matrix(const mprobe_point* const* points, size_t count, const mprobe_metric* metric,
                                 double* out) {
  return guarded([&] {
    require(points != nullptr && out != nullptr && count > 0, "points and out must be non-null, count > 0");
    std::vector<mprobe::PMPoint> pts;
    pts.reserve(count);
    for (size_t a = 0; a < count; ++a) {
      require(points[a] != nullptr, "null point");
      pts.push_back(points[a]->point);
    }
    const auto gram = mprobe::gram_matrix(pts, to_metric(metric));
    for (size_t a = 0; a < count; ++a)
      for (size_t b = 0; b < count; ++b) out[a * count + b] = gram.k(a, b);
  });
}

mprobe_status mprobe_subspace_dimension(const double* k, size_t n, double threshold, size_t* d_out) {
  return guarded([&] {
    require(k != nullptr && d_out != nullptr, "arguments must be non-null");
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const mprobe::Matrix m = Eigen::Map<const RowMajor>(k, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    *d_out = static_cast<size_t>(mprobe::subspace_dimension(m, threshold));
  });
}

mprobe_status mprobe_principal_angles(const double* q1, size_t n, size_t d1, const double* q2, size_t d2,
                                      double* angles_out) {
  return guarded([&] {
    require(q1 != nullptr && q2 != nullptr && angles_out != nullptr, "arguments must be non-null");
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const mprobe::Matrix a = Eigen::Map<const RowMajor>(q1, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d1));
    const mprobe::Matrix b = Eigen::Map<const RowMajor>(q2, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d2));
    const auto angles = mprobe::principal_angles(a, b);
    std::copy(angles.begin(), angles.end(), angles_out);
  });
}

mprobe_status mprobe_synth_tucker_dataset(const char* out_dir, const char* model_id, const size_t shape[3],
                                          const double* noise_levels, size_t n_groups, size_t count,
                                          const int32_t* ranks, size_t n_tuples, uint64_t seed, int float32) {
  return guarded([&] {
    require(out_dir != nullptr && model_id != nullptr && shape != nullptr && noise_levels != nullptr &&
                ranks != nullptr,
            "arguments must be non-null");
    require(n_groups > 0 && count > 0 && n_tuples > 0, "n_groups, count and n_tuples must be positive");
    std::vector<mprobe::SynthGroup> groups;
    for (size_t g = 0; g < n_groups; ++g) {
      mprobe::SynthGroup sg;
      char id[32];
      std::snprintf(id, sizeof id, "g%02zu", g);
      sg.group_id = id;
      sg.noise_level = noise_levels[g];
      sg.count = count;
      for (size_t t = 0; t < n_tuples; ++t) {
        const size_t row = (t + g) % n_tuples;
        sg.rank_cycle.push_back({ranks[3 * row], ranks[3 * row + 1], ranks[3 * row + 2]});
      }
      groups.push_back(std::move(sg));
    }
    mprobe::write_tucker_dataset(out_dir, model_id, {shape[0], shape[1], shape[2]}, groups, seed,
                                 float32 ? mprobe::DType::Float32 : mprobe::DType::Float64);
  });
}

}  // extern "C"
