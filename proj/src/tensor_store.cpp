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

#include "tensor_store.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "error.hpp"
#include "fileio.hpp"

namespace mprobe {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& field, const std::string& why) {
  throw Error(ErrorKind::SchemaViolation, "field '" + field + "': " + why);
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) schema(where + key, "missing");
  return obj.at(key);
}

std::size_t positive_int(const json& v, const std::string& field) {
  if (!v.is_number_integer() || v.get<long long>() <= 0) schema(field, "must be a positive integer");
  return static_cast<std::size_t>(v.get<long long>());
}

void check_tensor_header(const DatasetManifest& m, const GroupEntry& g) {
  const fs::path p = m.resolve(g);
  if (!fs::exists(p)) throw Error(ErrorKind::MissingFile, p.string());
  const NpyHeader h = read_npy_header(p);
  if (h.shape.size() != 4) {
    throw Error(ErrorKind::ShapeMismatch,
                p.string() + ": expected a 4-D array, found " + std::to_string(h.shape.size()) + "-D");
  }
  const Shape3 stored{h.shape[1], h.shape[2], h.shape[3]};
  if (!(stored == m.latent_shape)) {
    throw Error(ErrorKind::ShapeMismatch, p.string() + ": manifest declares " + to_string(m.latent_shape) +
                                              ", file stores " + to_string(stored));
  }
  if (h.shape[0] != g.count) {
    throw Error(ErrorKind::ShapeMismatch, p.string() + ": manifest count " + std::to_string(g.count) +
                                              ", file stores " + std::to_string(h.shape[0]));
  }
  if (h.dtype != m.dtype) {
    schema("dtype", "manifest says " + to_string(m.dtype) + " but " + p.string() + " stores " + to_string(h.dtype));
  }
}

}  // namespace

const GroupEntry& DatasetManifest::group(const std::string& group_id) const {
  for (const auto& g : groups) {
    if (g.group_id == group_id) return g;
  }
  throw Error(ErrorKind::UnknownGroup, "'" + group_id + "' is not in manifest '" + model_id + "'");
}

const GroupEntry& DatasetManifest::clean_group() const {
  for (const auto& g : groups) {
    if (g.noise_level == 0.0) return g;
  }
  throw Error(ErrorKind::SchemaViolation, "no clean group (noise_level = 0)");
}

fs::path DatasetManifest::resolve(const GroupEntry& g) const {
  const fs::path p(g.tensor_path);
  return p.is_absolute() ? p : base_dir / p;
}

void validate_manifest_fields(const DatasetManifest& m) {
  if (m.latent_shape.n1 == 0 || m.latent_shape.n2 == 0 || m.latent_shape.n3 == 0) {
    schema("latent_shape", "extents must be positive");
  }
  if (m.groups.empty()) schema("groups", "must be non-empty");
  std::set<std::string> ids;
  int clean = 0;
  for (std::size_t i = 0; i < m.groups.size(); ++i) {
    const auto& g = m.groups[i];
    const std::string where = "groups[" + std::to_string(i) + "].";
    if (g.group_id.empty()) schema(where + "group_id", "must be non-empty");
    if (!ids.insert(g.group_id).second) schema(where + "group_id", "duplicate id '" + g.group_id + "'");
    if (!std::isfinite(g.noise_level) || g.noise_level < 0.0) schema(where + "noise_level", "must be >= 0");
    if (i > 0 && !(g.noise_level > m.groups[i - 1].noise_level)) {
      schema(where + "noise_level", "noise levels must be strictly increasing");
    }
    if (g.noise_level == 0.0) ++clean;
    if (g.count == 0) schema(where + "count", "must be positive");
    if (g.tensor_path.empty()) schema(where + "tensor_path", "must be non-empty");
  }
  if (clean != 1) schema("groups", "exactly one group must have noise_level 0");
}

DatasetManifest load_manifest(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorKind::MissingFile, path.string());
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::SchemaViolation, path.string() + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) schema("<root>", "must be an object");

  DatasetManifest m;
  m.base_dir = path.parent_path();
  const json& id = require(doc, "model_id", "");
  if (!id.is_string()) schema("model_id", "must be a string");
  m.model_id = id.get<std::string>();

  const json& shape = require(doc, "latent_shape", "");
  if (!shape.is_array() || shape.size() != 3) schema("latent_shape", "must be [n1, n2, n3]");
  m.latent_shape = {positive_int(shape[0], "latent_shape[0]"), positive_int(shape[1], "latent_shape[1]"),
                    positive_int(shape[2], "latent_shape[2]")};

  const json& dtype = require(doc, "dtype", "");
  if (!dtype.is_string()) schema("dtype", "must be a string");
  m.dtype = parse_dtype(dtype.get<std::string>());

  const json& groups = require(doc, "groups", "");
  if (!groups.is_array()) schema("groups", "must be an array");
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const std::string where = "groups[" + std::to_string(i) + "].";
    const json& g = groups[i];
    if (!g.is_object()) schema(where.substr(0, where.size() - 1), "must be an object");
    GroupEntry e;
    const json& gid = require(g, "group_id", where);
    if (!gid.is_string()) schema(where + "group_id", "must be a string");
    e.group_id = gid.get<std::string>();
    const json& noise = require(g, "noise_level", where);
    if (!noise.is_number()) schema(where + "noise_level", "must be a number");
    e.noise_level = noise.get<double>();
    const json& tp = require(g, "tensor_path", where);
    if (!tp.is_string()) schema(where + "tensor_path", "must be a string");
    e.tensor_path = tp.get<std::string>();
    e.count = positive_int(require(g, "count", where), where + "count");
    m.groups.push_back(std::move(e));
  }
  validate_manifest_fields(m);
  for (const auto& g : m.groups) check_tensor_header(m, g);
  return m;
}

void save_manifest(const fs::path& path, const DatasetManifest& m) {
  validate_manifest_fields(m);
  json doc;
  doc["model_id"] = m.model_id;
  doc["latent_shape"] = {m.latent_shape.n1, m.latent_shape.n2, m.latent_shape.n3};
  doc["dtype"] = to_string(m.dtype);
  doc["groups"] = json::array();
  for (const auto& g : m.groups) {
    doc["groups"].push_back(
        {{"group_id", g.group_id}, {"noise_level", g.noise_level}, {"tensor_path", g.tensor_path}, {"count", g.count}});
  }
  write_file_atomic(path, doc.dump(2) + "\n");
}

LatentBatch load_batch(const DatasetManifest& manifest, const std::string& group_id) {
  const GroupEntry& g = manifest.group(group_id);
  const fs::path p = manifest.resolve(g);
  NpyArray a = read_npy(p);
  if (a.shape.size() != 4) throw Error(ErrorKind::ShapeMismatch, p.string() + ": expected a 4-D array");
  const Shape3 shape{a.shape[1], a.shape[2], a.shape[3]};
  if (!(shape == manifest.latent_shape) || a.shape[0] != g.count) {
    throw Error(ErrorKind::ShapeMismatch, p.string() + ": does not match manifest entry for '" + group_id + "'");
  }
  if (a.shape[0] == 0) throw Error(ErrorKind::ShapeMismatch, p.string() + ": empty batch");
  LatentBatch b;
  b.group_id = group_id;
  b.shape = shape;
  b.tensors.reserve(a.shape[0]);
  const std::size_t stride = shape.size();
  for (std::size_t k = 0; k < a.shape[0]; ++k) {
    std::vector<double> v(a.values.begin() + static_cast<std::ptrdiff_t>(k * stride),
                          a.values.begin() + static_cast<std::ptrdiff_t>((k + 1) * stride));
    for (double x : v) {
      if (!std::isfinite(x)) {
        throw Error(ErrorKind::NonFiniteData, p.string() + ": tensor " + std::to_string(k) + " has NaN/Inf entries");
      }
    }
    b.tensors.emplace_back(shape, std::move(v));
  }
  return b;
}

void write_batch(const fs::path& path, const LatentBatch& batch, DType dtype) {
  if (batch.tensors.empty()) throw Error(ErrorKind::InvalidArgument, "cannot write an empty batch");
  std::vector<double> flat;
  flat.reserve(batch.size() * batch.shape.size());
  for (const auto& t : batch.tensors) {
    if (!(t.shape() == batch.shape)) throw Error(ErrorKind::ShapeMismatch, "batch holds tensors of mixed shape");
    flat.insert(flat.end(), t.data().begin(), t.data().end());
  }
  const std::size_t shape[4] = {batch.size(), batch.shape.n1, batch.shape.n2, batch.shape.n3};
  write_npy(path, flat, shape, dtype);
}

}  // namespace mprobe
