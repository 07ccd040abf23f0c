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

#ifndef MPROBE_TENSOR_HPP
#define MPROBE_TENSOR_HPP

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mprobe {

// Extents (n1, n2, n3) of an order-3 tensor: height, width, channels.
struct Shape3 {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::size_t n3 = 0;

  std::size_t size() const noexcept { return n1 * n2 * n3; }
  std::size_t operator[](int mode) const noexcept {
    return mode == 1 ? n1 : mode == 2 ? n2 : n3;
  }
  friend bool operator==(const Shape3&, const Shape3&) = default;
};

std::string to_string(const Shape3& s);

// Dense order-3 tensor, C row-major (last index fastest).
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(Shape3 shape) : shape_(shape), data_(shape.size(), 0.0) {}
  Tensor3(Shape3 shape, std::vector<double> data);

  const Shape3& shape() const noexcept { return shape_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  double& operator()(std::size_t i, std::size_t j, std::size_t k) noexcept {
    return data_[(i * shape_.n2 + j) * shape_.n3 + k];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return data_[(i * shape_.n2 + j) * shape_.n3 + k];
  }

 private:
  Shape3 shape_;
  std::vector<double> data_;
};

// N tensors of one shape from one noise-level group, analysed in float64.
struct LatentBatch {
  std::string group_id;
  Shape3 shape;
  std::vector<Tensor3> tensors;

  std::size_t size() const noexcept { return tensors.size(); }
};

}  // namespace mprobe

#endif  // MPROBE_TENSOR_HPP
