// Copyright 2026 The Atlas Authors.
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
#ifndef ATLAS_COMMON_H_
#define ATLAS_COMMON_H_

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace atlas {

enum class ErrorCode {
  kNotFound,
  kRateLimited,
  kDecodeError,
  kRegionNotFound,
  kInvalidManifest,
  kInsufficientData,
  kQuotaUnreachable,
  kAlignmentFailed,
  kExternalPredictionMissing,
  kDimensionMismatch,
  kZeroVector,
  kUnknownId,
  kEndpointUnavailable,
  kMalformedResponse,
  kEmptyMatrix,
  kEmptyRow,
  kMissingJudgment,
  kMissingPrerequisite,
  kStageFailed,
  kParseError,
  kUnknownKey,
  kRangeError,
  kIoError,
  kFormatError,
};

std::string_view error_code_name(ErrorCode code);

// All recoverable failures in the pipeline are reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// One of the four editions. Ordered E1 < E2 < E3 < E4.
enum class Edition : std::uint8_t { E1 = 1, E2 = 2, E3 = 3, E4 = 4 };

inline constexpr std::array<Edition, 4> kAllEditions = {
    Edition::E1, Edition::E2, Edition::E3, Edition::E4};

inline int edition_index(Edition e) { return static_cast<int>(e) - 1; }
std::string_view edition_name(Edition e);
std::optional<Edition> parse_edition(std::string_view s);
// Like parse_edition but throws kParseError.
Edition edition_from_string(std::string_view s);

// Edition-scoped sequential entry identifier, rendered "E2_622".
struct EntryId {
  Edition edition = Edition::E1;
  std::uint32_t index = 0;

  std::string str() const;
  static std::optional<EntryId> parse(std::string_view s);

  auto operator<=>(const EntryId &) const = default;
};

}  // namespace atlas

#endif  // ATLAS_COMMON_H_
