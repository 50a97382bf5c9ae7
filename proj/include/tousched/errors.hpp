// Copyright 2026 The tousched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tousched {

enum class ErrorCode {
  kInvalidInstance,
  kAbsentTransition,
  kNoProcessingWindow,
  kMalformedBehavior,
  kInfeasibleSequence,
  kEmptyJoinStack,
  kInfeasibleRelaxation,
  kReconstructionMismatch,
  kTooLarge,
  kProfileTooShort,
  kParseError,
  kOverflow,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInstance: return "InvalidInstance";
    case ErrorCode::kAbsentTransition: return "AbsentTransition";
    case ErrorCode::kNoProcessingWindow: return "NoProcessingWindow";
    case ErrorCode::kMalformedBehavior: return "MalformedBehavior";
    case ErrorCode::kInfeasibleSequence: return "InfeasibleSequence";
    case ErrorCode::kEmptyJoinStack: return "EmptyJoinStack";
    case ErrorCode::kInfeasibleRelaxation: return "InfeasibleRelaxation";
    case ErrorCode::kReconstructionMismatch: return "ReconstructionMismatch";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kProfileTooShort: return "ProfileTooShort";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kOverflow: return "Overflow";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tousched
