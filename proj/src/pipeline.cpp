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

#include "pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "error.hpp"
#include "fileio.hpp"
#include "npy.hpp"
#include "tensor_store.hpp"

namespace mprobe {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string triple(const std::array<double, 3>& v) { return num(v[0]) + "," + num(v[1]) + "," + num(v[2]); }

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

struct HeaderParams {
  std::string stage;
  std::string model_id;
  double tol_rel;
  MetricParams metric;
  std::optional<double> dim_threshold;
  bool deterministic;
};

std::string comment_header(const HeaderParams& h) {
  std::string s = "# mprobe " + h.stage + "\n";
  s += "# model_id=" + h.model_id + "\n";
  s += "# tol_rel=" + num(h.tol_rel) + "\n";
  s += "# eps_reg=" + num(h.metric.eps_reg) + "\n";
  s += "# weights=" + triple(h.metric.weights) + "\n";
  s += "# lambdas=" + triple(h.metric.lambdas) + "\n";
  if (h.dim_threshold) s += "# dim_threshold=" + num(*h.dim_threshold) + "\n";
  if (!h.deterministic) s += "# generated_at=" + timestamp() + "\n";
  return s;
}

json params_json(double tol_rel, const MetricParams& m) {
  return {{"tol_rel", tol_rel}, {"eps_reg", m.eps_reg}, {"weights", m.weights}, {"lambdas", m.lambdas}};
}

MetricParams metric_from_json(const json& j) {
  MetricParams m;
  m.eps_reg = j.at("eps_reg").get<double>();
  m.weights = j.at("weights").get<std::array<double, 3>>();
  m.lambdas = j.at("lambdas").get<std::array<double, 3>>();
  return m;
}

struct Csv {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(const std::string& name, const fs::path& path) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw Error(ErrorKind::MissingStageOutput, path.string() + " lacks column " + name);
    return static_cast<std::size_t>(it - columns.begin());
  }
};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

Csv read_csv(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorKind::MissingStageOutput, path.string() + " (run the earlier stage first)");
  std::ifstream in(path);
  Csv csv;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!have_header) {
      csv.columns = split(line, ',');
      have_header = true;
    } else {
      csv.rows.push_back(split(line, ','));
      if (csv.rows.back().size() != csv.columns.size()) {
        throw Error(ErrorKind::MissingStageOutput, path.string() + ": malformed row '" + line + "'");
      }
    }
  }
  if (!have_header) throw Error(ErrorKind::MissingStageOutput, path.string() + " is empty");
  return csv;
}

json read_json(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorKind::MissingStageOutput, path.string() + " (run the earlier stage first)");
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MissingStageOutput, path.string() + " is unreadable: " + e.what());
  }
}

double to_double(const std::string& s) {
  try {
    return std::stod(s);
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::MissingStageOutput, "non-numeric field '" + s + "'");
  }
}

void prepare_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorKind::InvalidArgument, "cannot create output directory " + dir.string());
  const fs::path probe = dir / ".mprobe-write-probe";
  {
    std::ofstream out(probe);
    if (!out) throw Error(ErrorKind::InvalidArgument, "output directory " + dir.string() + " is not writable");
  }
  fs::remove(probe, ec);
}

std::string clean_group_id(const RunConfig& cfg, const DatasetManifest& m) {
  if (cfg.clean_group) {
    m.group(*cfg.clean_group);
    return *cfg.clean_group;
  }
  return m.clean_group().group_id;
}

std::string line_chart_svg(const std::string& title, const std::string& ylabel, const std::vector<double>& xs,
                           const std::vector<double>& ys) {
  const double w = 480, h = 320, left = 60, right = 20, top = 40, bottom = 50;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  s << "<text x=\"" << w / 2 << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\" font-size=\"12\">noise level</text>\n";
  s << "<text x=\"15\" y=\"" << h / 2 << "\" transform=\"rotate(-90 15 " << h / 2
    << ")\" text-anchor=\"middle\" font-size=\"12\">" << ylabel << "</text>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << h - bottom << "\" x2=\"" << w - right << "\" y2=\"" << h - bottom
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << h - bottom
    << "\" stroke=\"black\"/>\n";
  if (!xs.empty()) {
    const auto [xmin_it, xmax_it] = std::minmax_element(xs.begin(), xs.end());
    const auto [ymin_it, ymax_it] = std::minmax_element(ys.begin(), ys.end());
    const double xmin = *xmin_it, xspan = std::max(*xmax_it - xmin, 1e-12);
    const double ymin = std::min(0.0, *ymin_it), yspan = std::max(*ymax_it - ymin, 1e-12);
    s << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double px = left + (xs[i] - xmin) / xspan * (w - left - right);
      const double py = (h - bottom) - (ys[i] - ymin) / yspan * (h - top - bottom);
      s << px << "," << py << (i + 1 < xs.size() ? " " : "");
    }
    s << "\"/>\n";
    s << "<text x=\"" << left - 5 << "\" y=\"" << top + 4 << "\" text-anchor=\"end\" font-size=\"10\">"
      << num(ymin + yspan) << "</text>\n";
    s << "<text x=\"" << left - 5 << "\" y=\"" << h - bottom << "\" text-anchor=\"end\" font-size=\"10\">" << num(ymin)
      << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace

std::string to_string(Stage s) {
  switch (s) {
    case Stage::Ranks: return "ranks";
    case Stage::Embed: return "embed";
    case Stage::Angles: return "angles";
    case Stage::Report: return "report";
  }
  return "?";
}

void RunConfig::validate() const {
  if (manifest.empty()) throw Error(ErrorKind::InvalidArgument, "--manifest is required");
  if (out_dir.empty()) throw Error(ErrorKind::InvalidArgument, "--out is required");
  if (!(tol_rel > 0.0)) throw Error(ErrorKind::InvalidArgument, "--tol-rel must be positive");
  if (!(dim_threshold > 0.0 && dim_threshold < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "--dim-threshold must lie in (0, 1)");
  }
  metric.validate();
}

void run_ranks(const RunConfig& cfg) {
  cfg.validate();
  const DatasetManifest m = load_manifest(cfg.manifest);
  prepare_out_dir(cfg.out_dir);
  const std::string header = comment_header({"ranks", m.model_id, cfg.tol_rel, cfg.metric, std::nullopt, cfg.deterministic});

  std::string ranks = header + "group_id,tensor_index,r1,r2,r3\n";
  std::string strata = header + "group_id,mode,rank,count\n";
  std::string summary = header + "group_id,r1_min,r1_max,r2_min,r2_max,r3_min,r3_max\n";
  std::array<int, 3> target{0, 0, 0};

  for (const auto& g : m.groups) {
    const LatentBatch batch = load_batch(m, g.group_id);
    const auto tuples = rank_tuples(batch, cfg.tol_rel);
    std::array<int, 3> lo{INT32_MAX, INT32_MAX, INT32_MAX};
    std::array<int, 3> hi{0, 0, 0};
    for (std::size_t k = 0; k < tuples.size(); ++k) {
      const auto& r = tuples[k];
      ranks += g.group_id + "," + std::to_string(k) + "," + std::to_string(r.r1) + "," + std::to_string(r.r2) + "," +
               std::to_string(r.r3) + "\n";
      for (int i = 0; i < 3; ++i) {
        lo[i] = std::min(lo[i], r[i + 1]);
        hi[i] = std::max(hi[i], r[i + 1]);
      }
    }
    const StrataHistogram hist = strata_histogram(g.group_id, tuples);
    for (int mode = 1; mode <= 3; ++mode) {
      for (const auto& [rank, count] : hist.counts[mode - 1]) {
        strata += g.group_id + "," + std::to_string(mode) + "," + std::to_string(rank) + "," + std::to_string(count) + "\n";
      }
    }
    summary += g.group_id;
    for (int i = 0; i < 3; ++i) {
      summary += "," + std::to_string(lo[i]) + "," + std::to_string(hi[i]);
      target[i] = std::max(target[i], hi[i]);
    }
    summary += "\n";
  }
  for (auto& t : target) t = std::max(t, 1);

  json tj = {{"model_id", m.model_id}, {"target_ranks", target}, {"params", params_json(cfg.tol_rel, cfg.metric)}};
  write_file_atomic(cfg.out_dir / files::kRanks, ranks);
  write_file_atomic(cfg.out_dir / files::kStrata, strata);
  write_file_atomic(cfg.out_dir / files::kRankSummary, summary);
  write_file_atomic(cfg.out_dir / files::kTargetRanks, tj.dump(2) + "\n");
}

void run_embed(const RunConfig& cfg) {
  cfg.validate();
  const DatasetManifest m = load_manifest(cfg.manifest);
  prepare_out_dir(cfg.out_dir);
  const json tj = read_json(cfg.out_dir / files::kTargetRanks);
  const auto target = tj.at("target_ranks").get<std::array<int, 3>>();

  std::size_t n_points = 0;
  for (const auto& g : m.groups) n_points += g.count;
  const Shape3& s = m.latent_shape;
  const std::size_t n[3] = {s.n1, s.n2, s.n3};
  Eigen::Index feature_size = 0;
  for (int i = 0; i < 3; ++i) {
    if (target[i] < 1 || static_cast<std::size_t>(target[i]) > n[i]) {
      throw Error(ErrorKind::RankOutOfRange, "target rank " + std::to_string(target[i]) + " infeasible for mode " +
                                                 std::to_string(i + 1));
    }
    feature_size += static_cast<Eigen::Index>(n[i] * (n[i] + 1) / 2) + target[i];
  }

  // Features are built per tensor so PMPoints never need to be held together.
  Matrix features(static_cast<Eigen::Index>(n_points), feature_size);
  std::vector<PointId> index;
  index.reserve(n_points);
  for (const auto& g : m.groups) {
    const LatentBatch batch = load_batch(m, g.group_id);
    for (std::size_t k = 0; k < batch.size(); ++k) {
      const PMPoint p = pm_point(batch.tensors[k], target, cfg.metric, cfg.tol_rel);
      features.row(static_cast<Eigen::Index>(index.size())) = kernel_features(p, cfg.metric).transpose();
      index.push_back({g.group_id, k});
    }
  }
  const KernelGram gram = gram_from_features(features, index, cfg.metric);
  features.resize(0, 0);

  const std::string header =
      comment_header({"embed", m.model_id, cfg.tol_rel, cfg.metric, cfg.dim_threshold, cfg.deterministic});
  std::string dims = header + "group_id,noise_level,d,threshold\n";
  for (const auto& g : m.groups) {
    const auto idx = gram.group_indices(g.group_id);
    const int d = subspace_dimension(gram.k(idx, idx), cfg.dim_threshold);
    dims += g.group_id + "," + num(g.noise_level) + "," + std::to_string(d) + "," + num(cfg.dim_threshold) + "\n";
  }
  std::string points = header + "index,group_id,tensor_index\n";
  for (std::size_t a = 0; a < index.size(); ++a) {
    points += std::to_string(a) + "," + index[a].group_id + "," + std::to_string(index[a].tensor_index) + "\n";
  }
  json meta = {{"model_id", m.model_id},
               {"n_points", n_points},
               {"target_ranks", target},
               {"params", params_json(cfg.tol_rel, cfg.metric)}};
  if (!cfg.deterministic) meta["generated_at"] = timestamp();

  const std::size_t shape[2] = {n_points, n_points};
  write_npy(cfg.out_dir / files::kGram, std::span<const double>(gram.k.data(), static_cast<std::size_t>(gram.k.size())),
            shape, DType::Float64);
  write_file_atomic(cfg.out_dir / files::kGramMeta, meta.dump(2) + "\n");
  write_file_atomic(cfg.out_dir / files::kPointIndex, points);
  write_file_atomic(cfg.out_dir / files::kDimensions, dims);
}

void run_angles(const RunConfig& cfg) {
  cfg.validate();
  const DatasetManifest m = load_manifest(cfg.manifest);
  prepare_out_dir(cfg.out_dir);
  const json meta = read_json(cfg.out_dir / files::kGramMeta);
  const fs::path gram_path = cfg.out_dir / files::kGram;
  if (!fs::exists(gram_path)) throw Error(ErrorKind::MissingStageOutput, gram_path.string());
  const NpyArray arr = read_npy(gram_path);
  const fs::path index_path = cfg.out_dir / files::kPointIndex;
  const Csv pts = read_csv(index_path);
  const std::size_t n = pts.rows.size();
  if (arr.shape.size() != 2 || arr.shape[0] != n || arr.shape[1] != n) {
    throw Error(ErrorKind::MissingStageOutput, "gram.npy does not match point_index.csv; rerun embed");
  }

  KernelGram gram;
  gram.k = Eigen::Map<const Matrix>(arr.values.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const std::size_t gcol = pts.col("group_id", index_path);
  const std::size_t tcol = pts.col("tensor_index", index_path);
  for (const auto& row : pts.rows) gram.point_index.push_back({row[gcol], static_cast<std::size_t>(to_double(row[tcol]))});
  const MetricParams metric = metric_from_json(meta.at("params"));
  gram.params = metric;
  const double tol_rel = meta.at("params").at("tol_rel").get<double>();

  const VirtualFeatures vf = virtual_features(gram);
  const std::string clean = clean_group_id(cfg, m);
  const SubspaceBasis clean_basis = group_basis(vf, gram, clean, cfg.dim_threshold);

  std::string out = comment_header({"angles", m.model_id, tol_rel, metric, cfg.dim_threshold, cfg.deterministic});
  out += "# clean_group=" + clean + "\n";
  out += "group_id,noise_level,k,theta_radians\n";
  for (const auto& g : m.groups) {
    const SubspaceBasis b = group_basis(vf, gram, g.group_id, cfg.dim_threshold);
    const PrincipalAngleReport rep = principal_angles(clean_basis, b);
    for (std::size_t k = 0; k < rep.angles.size(); ++k) {
      out += g.group_id + "," + num(g.noise_level) + "," + std::to_string(k + 1) + "," + num(rep.angles[k]) + "\n";
    }
  }
  write_file_atomic(cfg.out_dir / files::kAngles, out);
}

void run_report(const RunConfig& cfg) {
  cfg.validate();
  const DatasetManifest m = load_manifest(cfg.manifest);
  prepare_out_dir(cfg.out_dir);
  const fs::path summary_path = cfg.out_dir / files::kRankSummary;
  const fs::path strata_path = cfg.out_dir / files::kStrata;
  const fs::path dims_path = cfg.out_dir / files::kDimensions;
  const fs::path angles_path = cfg.out_dir / files::kAngles;
  const Csv summary = read_csv(summary_path);
  const Csv strata = read_csv(strata_path);
  const Csv dims = read_csv(dims_path);
  const Csv angles = read_csv(angles_path);
  const json meta = read_json(cfg.out_dir / files::kGramMeta);

  std::map<std::string, double> psnr;
  if (cfg.psnr) {
    if (!fs::exists(*cfg.psnr)) throw Error(ErrorKind::MissingFile, cfg.psnr->string());
    const Csv p = read_csv(*cfg.psnr);
    const auto mc = p.col("model_id", *cfg.psnr), nc = p.col("noise_level", *cfg.psnr), pc = p.col("psnr_db", *cfg.psnr);
    for (const auto& row : p.rows) {
      if (row[mc] != m.model_id) continue;
      for (const auto& g : m.groups) {
        if (std::abs(to_double(row[nc]) - g.noise_level) < 1e-9) psnr[g.group_id] = to_double(row[pc]);
      }
    }
  }

  json groups = json::array();
  std::map<std::string, std::size_t> slot;
  for (const auto& g : m.groups) {
    slot[g.group_id] = groups.size();
    groups.push_back({{"group_id", g.group_id},
                      {"noise_level", g.noise_level},
                      {"strata", {{"S1", json::object()}, {"S2", json::object()}, {"S3", json::object()}}},
                      {"angles", json::array()}});
  }
  auto at = [&](const std::string& gid, const fs::path& src) -> json& {
    const auto it = slot.find(gid);
    if (it == slot.end()) throw Error(ErrorKind::MissingStageOutput, src.string() + " names unknown group " + gid);
    return groups[it->second];
  };

  for (const auto& row : summary.rows) {
    json& g = at(row[summary.col("group_id", summary_path)], summary_path);
    for (int i = 1; i <= 3; ++i) {
      const std::string r = "r" + std::to_string(i);
      g["ranks"]["S" + std::to_string(i)] = {std::stoi(row[summary.col(r + "_min", summary_path)]),
                                             std::stoi(row[summary.col(r + "_max", summary_path)])};
    }
  }
  for (const auto& row : strata.rows) {
    json& g = at(row[strata.col("group_id", strata_path)], strata_path);
    g["strata"]["S" + row[strata.col("mode", strata_path)]][row[strata.col("rank", strata_path)]] =
        std::stoll(row[strata.col("count", strata_path)]);
  }
  for (const auto& row : dims.rows) {
    json& g = at(row[dims.col("group_id", dims_path)], dims_path);
    g["d"] = std::stoi(row[dims.col("d", dims_path)]);
  }
  for (const auto& row : angles.rows) {
    json& g = at(row[angles.col("group_id", angles_path)], angles_path);
    g["angles"].push_back(to_double(row[angles.col("theta_radians", angles_path)]));
  }
  std::vector<double> xs, ds, means;
  for (auto& g : groups) {
    if (!g.contains("ranks") || !g.contains("d")) {
      throw Error(ErrorKind::MissingStageOutput, "stage outputs lack group " + g["group_id"].get<std::string>());
    }
    double mean = 0.0;
    for (const auto& a : g["angles"]) mean += a.get<double>();
    if (!g["angles"].empty()) mean /= static_cast<double>(g["angles"].size());
    g["mean_angle"] = mean;
    const auto gid = g["group_id"].get<std::string>();
    if (psnr.count(gid)) g["psnr_db"] = psnr[gid];
    xs.push_back(g["noise_level"].get<double>());
    ds.push_back(g["d"].get<double>());
    means.push_back(mean);
  }

  json report = {{"model_id", m.model_id},
                 {"latent_shape", {m.latent_shape.n1, m.latent_shape.n2, m.latent_shape.n3}},
                 {"params", meta.at("params")},
                 {"dim_threshold", cfg.dim_threshold},
                 {"target_ranks", meta.at("target_ranks")},
                 {"clean_group", clean_group_id(cfg, m)},
                 {"groups", groups}};
  if (!cfg.deterministic) report["generated_at"] = timestamp();

  const Shape3& s = m.latent_shape;
  std::string table = "Ranks of unrolled covariance matrices, (min, max) per noise level\n";
  table += "model: " + m.model_id + " (latent shape: " + std::to_string(s.n1) + "x" + std::to_string(s.n2) + "x" +
           std::to_string(s.n3) + ")\n\n";
  for (const auto& g : groups) {
    const double noise = g["noise_level"].get<double>();
    std::string label = noise == 0.0 ? "zero" : num(noise);
    label.resize(std::max<std::size_t>(label.size(), 6), ' ');
    table += label + "  ";
    for (int i = 1; i <= 3; ++i) {
      const auto& r = g["ranks"]["S" + std::to_string(i)];
      table += "S" + std::to_string(i) + ": (" + std::to_string(r[0].get<int>()) + ", " +
               std::to_string(r[1].get<int>()) + ")" + (i < 3 ? ", " : "\n");
    }
  }

  write_file_atomic(cfg.out_dir / files::kReport, report.dump(2) + "\n");
  write_file_atomic(cfg.out_dir / files::kTable, table);
  write_file_atomic(cfg.out_dir / files::kDimensionsSvg,
                    line_chart_svg(m.model_id + ": Hilbert subspace dimension", "d", xs, ds));
  write_file_atomic(cfg.out_dir / files::kAnglesSvg,
                    line_chart_svg(m.model_id + ": mean principal angle vs clean", "radians", xs, means));
}

void run_stage(Stage stage, const RunConfig& cfg) {
  switch (stage) {
    case Stage::Ranks: return run_ranks(cfg);
    case Stage::Embed: return run_embed(cfg);
    case Stage::Angles: return run_angles(cfg);
    case Stage::Report: return run_report(cfg);
  }
}

}  // namespace mprobe
