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

#include "tensor.hpp"

#include "error.hpp"

namespace mprobe {

std::string to_string(const Shape3& s) {
  return "(" + std::to_string(s.n1) + "," + std::to_string(s.n2) + "," + std::to_string(s.n3) + ")";
}

Tensor3::Tensor3(Shape3 shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
  if (shape_.n1 == 0 || shape_.n2 == 0 || shape_.n3 == 0) {
    throw Error(ErrorKind::ShapeMismatch, "tensor shape " + to_string(shape_) + " has a zero extent");
  }
  if (data_.size() != shape_.size()) {
    throw Error(ErrorKind::ShapeMismatch, "tensor of shape " + to_string(shape_) + " given " +
                                              std::to_string(data_.size()) + " values");
  }
}

}  // namespace mprobe
