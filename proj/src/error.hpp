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

#ifndef MPROBE_ERROR_HPP
#define MPROBE_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace mprobe {

enum class ErrorKind {
  // configuration
  MissingFile,
  SchemaViolation,
  UnknownGroup,
  MissingStageOutput,
  InvalidArgument,
  // data
  ShapeMismatch,
  CorruptTensorFile,
  NonFiniteData,
  InvalidMode,
  TooFewObservations,
  RankOutOfRange,
  FactorShapeMismatch,
  HeterogeneousPoints,
  DimensionMismatch,
  IndexOutOfRange,
  InfeasibleRanks,
  InfeasibleSpec,
  IoError,
  // numerical
  NonSymmetric,
  NotPSD,
  EigenFailure,
  NonPositiveDiagonal,
  ZeroMatrix,
};

// Coarse classification used for process exit codes and C API status values.
enum class ErrorCategory { Config = 2, Data = 3, Numerical = 4 };

std::string_view to_string(ErrorKind kind) noexcept;
ErrorCategory category_of(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  ErrorCategory category() const noexcept { return category_of(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace mprobe

#endif  // MPROBE_ERROR_HPP
