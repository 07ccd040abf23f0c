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

#ifndef MPROBE_NPY_HPP
#define MPROBE_NPY_HPP

// Reader/writer for the NumPy .npy container (little-endian, C order,
// float32/float64 payloads only).

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace mprobe {

enum class DType { Float32, Float64 };

std::string to_string(DType d);
DType parse_dtype(const std::string& s);  // "float32" | "float64"
std::size_t item_size(DType d) noexcept;

struct NpyHeader {
  DType dtype = DType::Float64;
  std::vector<std::size_t> shape;
  std::size_t data_offset = 0;

  std::size_t count() const noexcept;
};

struct NpyArray {
  DType dtype = DType::Float64;
  std::vector<std::size_t> shape;
  std::vector<double> values;  // promoted to float64
};

// Throws MissingFile or CorruptTensorFile.
NpyHeader read_npy_header(const std::filesystem::path& path);
NpyArray read_npy(const std::filesystem::path& path);

// Values are narrowed to `dtype` when it is Float32. Written as format v1.0.
void write_npy(const std::filesystem::path& path, std::span<const double> values,
               std::span<const std::size_t> shape, DType dtype);

std::string encode_npy(std::span<const double> values, std::span<const std::size_t> shape,
                       DType dtype);

}  // namespace mprobe

#endif  // MPROBE_NPY_HPP
