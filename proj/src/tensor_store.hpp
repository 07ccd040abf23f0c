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

#ifndef MPROBE_TENSOR_STORE_HPP
#define MPROBE_TENSOR_STORE_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "npy.hpp"
#include "tensor.hpp"

namespace mprobe {

struct GroupEntry {
  std::string group_id;
  double noise_level = 0.0;  // noise standard deviation, image-intensity units
  std::string tensor_path;   // relative paths resolve against the manifest's directory
  std::size_t count = 0;
};

struct DatasetManifest {
  std::string model_id;
  Shape3 latent_shape;
  DType dtype = DType::Float32;
  std::vector<GroupEntry> groups;  // noise_level strictly increasing, first is clean
  std::filesystem::path base_dir;

  const GroupEntry& group(const std::string& group_id) const;  // throws UnknownGroup
  const GroupEntry& clean_group() const;
  std::filesystem::path resolve(const GroupEntry& g) const;
};

// Parses and validates eagerly, including every tensor file header.
// Errors: MissingFile, SchemaViolation, ShapeMismatch, CorruptTensorFile.
DatasetManifest load_manifest(const std::filesystem::path& path);

// Structural checks only (no file access).
void validate_manifest_fields(const DatasetManifest& m);

void save_manifest(const std::filesystem::path& path, const DatasetManifest& m);

// Tensors in file order, promoted to float64.
// Errors: UnknownGroup, CorruptTensorFile, ShapeMismatch, NonFiniteData.
LatentBatch load_batch(const DatasetManifest& manifest, const std::string& group_id);

// Writes one (N, n1, n2, n3) array. Round-trips bit-exactly at `dtype`.
void write_batch(const std::filesystem::path& path, const LatentBatch& batch, DType dtype);

}  // namespace mprobe

#endif  // MPROBE_TENSOR_STORE_HPP
