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

#include "error.hpp"

namespace mprobe {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::SchemaViolation: return "SchemaViolation";
    case ErrorKind::UnknownGroup: return "UnknownGroup";
    case ErrorKind::MissingStageOutput: return "MissingStageOutput";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::CorruptTensorFile: return "CorruptTensorFile";
    case ErrorKind::NonFiniteData: return "NonFiniteData";
    case ErrorKind::InvalidMode: return "InvalidMode";
    case ErrorKind::TooFewObservations: return "TooFewObservations";
    case ErrorKind::RankOutOfRange: return "RankOutOfRange";
    case ErrorKind::FactorShapeMismatch: return "FactorShapeMismatch";
    case ErrorKind::HeterogeneousPoints: return "HeterogeneousPoints";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::InfeasibleRanks: return "InfeasibleRanks";
    case ErrorKind::InfeasibleSpec: return "InfeasibleSpec";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::NonSymmetric: return "NonSymmetric";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::EigenFailure: return "EigenFailure";
    case ErrorKind::NonPositiveDiagonal: return "NonPositiveDiagonal";
    case ErrorKind::ZeroMatrix: return "ZeroMatrix";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MissingFile:
    case ErrorKind::SchemaViolation:
    case ErrorKind::UnknownGroup:
    case ErrorKind::MissingStageOutput:
    case ErrorKind::InvalidArgument:
      return ErrorCategory::Config;
    case ErrorKind::NonSymmetric:
    case ErrorKind::NotPSD:
    case ErrorKind::EigenFailure:
    case ErrorKind::NonPositiveDiagonal:
    case ErrorKind::ZeroMatrix:
      return ErrorCategory::Numerical;
    default:
      return ErrorCategory::Data;
  }
}

}  // namespace mprobe
