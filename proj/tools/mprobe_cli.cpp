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

// mprobe: staged latent-space analysis driven through the libmprobe C API.
//
//   mprobe ranks|embed|angles|report --manifest <path> --out <dir> [options]
//   mprobe synth --out <dir> [options]
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 numerical failure.

#include <mprobe/mprobe.h>

#include <cstdint>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace {

constexpr int kExitConfig = 2;

struct Options {
  std::string manifest;
  std::string out;
  double tol_rel = 1e-7;
  double eps_reg = 1e-6;
  std::vector<double> lambdas{1.0, 1.0, 1.0};
  std::vector<double> weights{1.0, 1.0, 1.0};
  double dim_threshold = 1e-3;
  std::string clean_group;
  std::string psnr;
  bool deterministic = true;
};

struct SynthOptions {
  std::string out;
  std::string model_id = "synthetic";
  std::vector<std::size_t> shape{7, 7, 128};
  std::size_t groups = 11;
  std::size_t count = 300;
  double noise_step = 0.01;
  std::vector<int> ranks{7, 7, 48};
  std::uint64_t seed = 1;
  bool float64 = false;
};

int report(mprobe_status s) {
  if (s != MPROBE_OK) std::cerr << "mprobe: " << mprobe_last_error_kind() << ": " << mprobe_last_error() << "\n";
  return static_cast<int>(s);
}

int run_stage(mprobe_stage stage, const Options& o) {
  mprobe_run_config* raw = nullptr;
  if (mprobe_run_config_create(&raw) != MPROBE_OK) return report(MPROBE_ERR_INTERNAL);
  std::unique_ptr<mprobe_run_config, decltype(&mprobe_run_config_destroy)> cfg(raw, &mprobe_run_config_destroy);

  for (mprobe_status s : {mprobe_run_config_set_manifest(cfg.get(), o.manifest.c_str()),
                          mprobe_run_config_set_out_dir(cfg.get(), o.out.c_str()),
                          mprobe_run_config_set_tol_rel(cfg.get(), o.tol_rel),
                          mprobe_run_config_set_eps_reg(cfg.get(), o.eps_reg),
                          mprobe_run_config_set_lambdas(cfg.get(), o.lambdas.data()),
                          mprobe_run_config_set_weights(cfg.get(), o.weights.data()),
                          mprobe_run_config_set_dim_threshold(cfg.get(), o.dim_threshold),
                          mprobe_run_config_set_deterministic(cfg.get(), o.deterministic ? 1 : 0),
                          mprobe_run_config_set_clean_group(cfg.get(), o.clean_group.empty() ? nullptr : o.clean_group.c_str()),
                          mprobe_run_config_set_psnr(cfg.get(), o.psnr.empty() ? nullptr : o.psnr.c_str())}) {
    if (s != MPROBE_OK) return report(s);
  }
  return report(mprobe_run_stage(cfg.get(), stage));
}

int run_synth(const SynthOptions& o) {
  if (o.ranks.size() % 3 != 0 || o.ranks.empty()) {
    std::cerr << "mprobe: --ranks takes a multiple of three integers\n";
    return kExitConfig;
  }
  std::vector<double> noise(o.groups);
  for (std::size_t g = 0; g < o.groups; ++g) noise[g] = static_cast<double>(g) * o.noise_step;
  std::vector<std::int32_t> ranks(o.ranks.begin(), o.ranks.end());
  const std::size_t shape[3] = {o.shape[0], o.shape[1], o.shape[2]};
  return report(mprobe_synth_tucker_dataset(o.out.c_str(), o.model_id.c_str(), shape, noise.data(), o.groups, o.count,
                                            ranks.data(), ranks.size() / 3, o.seed, o.float64 ? 0 : 1));
}

void add_stage_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--manifest", o.manifest, "Dataset manifest (JSON)")->required();
  cmd->add_option("--out", o.out, "Output directory for stage files")->required();
  cmd->add_option("--tol-rel", o.tol_rel, "Relative eigenvalue threshold for numerical rank")->capture_default_str();
  cmd->add_option("--eps-reg", o.eps_reg, "Relative floor for regularised eigenvalues")->capture_default_str();
  cmd->add_option("--lambda", o.lambdas, "Log-term scales per mode")->delimiter(',')->expected(3);
  cmd->add_option("--weights", o.weights, "Kernel weights per mode")->delimiter(',')->expected(3);
  cmd->add_option("--dim-threshold", o.dim_threshold, "Relative Frobenius residual for subspace dimension")
      ->capture_default_str();
  cmd->add_option("--clean-group", o.clean_group, "Reference group for principal angles");
  cmd->add_flag("--deterministic,!--no-deterministic", o.deterministic,
                "Omit timestamps so reruns are byte-identical (default on)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mprobe: latent-space rank strata and Hilbert subspace analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", mprobe_version());

  Options opts;
  SynthOptions synth;
  std::optional<mprobe_stage> stage;

  const std::pair<const char*, mprobe_stage> stages[] = {
      {"ranks", MPROBE_STAGE_RANKS}, {"embed", MPROBE_STAGE_EMBED},
      {"angles", MPROBE_STAGE_ANGLES}, {"report", MPROBE_STAGE_REPORT}};
  const char* help[] = {"Rank tuples, strata histograms and (min, max) summaries",
                        "Joint kernel Gram matrix and per-group subspace dimensions",
                        "Principal angles of every group against the clean group",
                        "Consolidated JSON report, rank table and plot data"};
  for (int i = 0; i < 4; ++i) {
    auto* cmd = app.add_subcommand(stages[i].first, help[i]);
    add_stage_options(cmd, opts);
    if (stages[i].second == MPROBE_STAGE_REPORT) {
      cmd->add_option("--psnr", opts.psnr, "PSNR CSV (model_id,noise_level,psnr_db)");
    }
    const mprobe_stage s = stages[i].second;
    cmd->callback([&stage, s] { stage = s; });
  }

  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic Tucker-tensor dataset and manifest");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--model-id", synth.model_id)->capture_default_str();
  synth_cmd->add_option("--shape", synth.shape, "n1,n2,n3")->delimiter(',')->expected(3);
  synth_cmd->add_option("--groups", synth.groups, "Number of noise levels")->capture_default_str();
  synth_cmd->add_option("--count", synth.count, "Tensors per group")->capture_default_str();
  synth_cmd->add_option("--noise-step", synth.noise_step)->capture_default_str();
  synth_cmd->add_option("--ranks", synth.ranks, "Rank tuples r1,r2,r3[,r1,r2,r3...] cycled per tensor")
      ->delimiter(',');
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
  synth_cmd->add_flag("--float64", synth.float64, "Store float64 instead of float32");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }
  if (stage) return run_stage(*stage, opts);
  return run_synth(synth);
}
