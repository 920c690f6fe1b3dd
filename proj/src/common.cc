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
#include "atlas/common.h"

#include <charconv>

namespace atlas {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kRateLimited: return "RateLimited";
    case ErrorCode::kDecodeError: return "DecodeError";
    case ErrorCode::kRegionNotFound: return "RegionNotFound";
    case ErrorCode::kInvalidManifest: return "InvalidManifest";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kQuotaUnreachable: return "QuotaUnreachable";
    case ErrorCode::kAlignmentFailed: return "AlignmentFailed";
    case ErrorCode::kExternalPredictionMissing: return "ExternalPredictionMissing";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kUnknownId: return "UnknownId";
    case ErrorCode::kEndpointUnavailable: return "EndpointUnavailable";
    case ErrorCode::kMalformedResponse: return "MalformedResponse";
    case ErrorCode::kEmptyMatrix: return "EmptyMatrix";
    case ErrorCode::kEmptyRow: return "EmptyRow";
    case ErrorCode::kMissingJudgment: return "MissingJudgment";
    case ErrorCode::kMissingPrerequisite: return "MissingPrerequisite";
    case ErrorCode::kStageFailed: return "StageFailed";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kUnknownKey: return "UnknownKey";
    case ErrorCode::kRangeError: return "RangeError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kFormatError: return "FormatError";
  }
  return "Unknown";
}

std::string_view edition_name(Edition e) {
  switch (e) {
    case Edition::E1: return "E1";
    case Edition::E2: return "E2";
    case Edition::E3: return "E3";
    case Edition::E4: return "E4";
  }
  return "E?";
}

std::optional<Edition> parse_edition(std::string_view s) {
  if (s.size() != 2 || s[0] != 'E' || s[1] < '1' || s[1] > '4') {
    return std::nullopt;
  }
  return static_cast<Edition>(s[1] - '0');
}

Edition edition_from_string(std::string_view s) {
  auto e = parse_edition(s);
  if (!e) throw Error(ErrorCode::kParseError, "bad edition '" + std::string(s) + "'");
  return *e;
}

std::string EntryId::str() const {
  return std::string(edition_name(edition)) + "_" + std::to_string(index);
}

std::optional<EntryId> EntryId::parse(std::string_view s) {
  if (s.size() < 4 || s[2] != '_') return std::nullopt;
  auto e = parse_edition(s.substr(0, 2));
  if (!e) return std::nullopt;
  std::string_view digits = s.substr(3);
  // Reject leading zeros so that parse(str(x)) is the only spelling.
  if (digits.size() > 1 && digits[0] == '0') return std::nullopt;
  std::uint32_t index = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) return std::nullopt;
  return EntryId{*e, index};
}

}  // namespace atlas
