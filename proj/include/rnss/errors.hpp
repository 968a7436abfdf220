/*
 * Copyright 2026 The rnss Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef RNSS_ERRORS_HPP_
#define RNSS_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace rnss {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidSubset,
  kDegenerateBasis,
  kInsufficientShares,
  kIncompatibleSharing,
  kShapeMismatch,
  kNotPositiveDefinite,
  kEmptyDataset,
  kParseError,
  kTooFewRows,
  kInvalidScenario,
  kNearSingularMask,
  kSingularMaskMatrix,
  kDegeneratePivot,
  kNumericalBreakdown,
};

// Coarse grouping used for process exit codes.
enum class ErrorCategory { kUsage, kData, kNumerical };

inline ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyDataset:
    case ErrorCode::kParseError:
    case ErrorCode::kTooFewRows:
      return ErrorCategory::kData;
    case ErrorCode::kNotPositiveDefinite:
    case ErrorCode::kNearSingularMask:
    case ErrorCode::kSingularMaskMatrix:
    case ErrorCode::kDegeneratePivot:
    case ErrorCode::kNumericalBreakdown:
      return ErrorCategory::kNumerical;
    default:
      return ErrorCategory::kUsage;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }
  ErrorCategory category() const { return category_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace rnss

#endif  // RNSS_ERRORS_HPP_
