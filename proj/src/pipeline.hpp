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

#ifndef MPROBE_PIPELINE_HPP
#define MPROBE_PIPELINE_HPP

// Staged analysis run: ranks -> embed -> angles -> report. Each stage reads
// the previous stages' files from the output directory, so expensive stages
// are never repeated by later ones.

#include <filesystem>
#include <optional>
#include <string>

#include "hilbert.hpp"
#include "spsd_geometry.hpp"
#include "unfold_cov.hpp"

namespace mprobe {

enum class Stage { Ranks, Embed, Angles, Report };

std::string to_string(Stage s);

struct RunConfig {
  std::filesystem::path manifest;
  std::filesystem::path out_dir;
  double tol_rel = kDefaultRankTol;
  MetricParams metric;
  double dim_threshold = kDefaultDimThreshold;
  std::optional<std::string> clean_group;    // defaults to the manifest's noise-free group
  std::optional<std::filesystem::path> psnr;  // model_id,noise_level,psnr_db
  bool deterministic = true;

  void validate() const;  // throws InvalidArgument (config error)
};

// Stage outputs, relative to out_dir.
namespace files {
inline constexpr const char* kRanks = "ranks.csv";
inline constexpr const char* kStrata = "strata.csv";
inline constexpr const char* kRankSummary = "rank_summary.csv";
inline constexpr const char* kTargetRanks = "target_ranks.json";
inline constexpr const char* kGram = "gram.npy";
inline constexpr const char* kGramMeta = "gram.json";
inline constexpr const char* kPointIndex = "point_index.csv";
inline constexpr const char* kDimensions = "dimensions.csv";
inline constexpr const char* kAngles = "angles.csv";
inline constexpr const char* kReport = "report.json";
inline constexpr const char* kTable = "rank_table.txt";
inline constexpr const char* kDimensionsSvg = "dimensions.svg";
inline constexpr const char* kAnglesSvg = "angles.svg";
}  // namespace files

void run_ranks(const RunConfig& cfg);
void run_embed(const RunConfig& cfg);
void run_angles(const RunConfig& cfg);
void run_report(const RunConfig& cfg);
void run_stage(Stage stage, const RunConfig& cfg);

}  // namespace mprobe

#endif  // MPROBE_PIPELINE_HPP
