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
#include "atlas/config.h"
#include "atlas/io.h"
#include "doctest.h"
#include "test_util.h"

using namespace atlas;
using config::validate_config_text;

namespace {

ErrorCode error_of(const std::string &source) {
  try {
    validate_config_text(source, "/base");
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("expected an error for: " << source);
  return ErrorCode::kNotFound;
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
  auto c = validate_config_text("", "/base");
  CHECK(c.threshold == 0.75);
  CHECK(c.policy == "discard");
  CHECK(c.seed == 42);
  CHECK(c.tagger == "rule");
  CHECK(c.ner == "lexicon");
  CHECK(c.embedding == "hashed");
  CHECK_FALSE(c.offline);
  CHECK(c.work("x.tsv") == std::filesystem::path("/base/run/x.tsv"));
}

TEST_CASE("values are parsed and typed") {
  auto c = validate_config_text(R"(
# comment
seed = 7
threshold = 0.9   # trailing comment
offline = true
work_dir = "/abs/out"

[segment]
policy = "append"
tagger = "external"
predictions = "preds_{edition}.jsonl"

[match]
headword_check = false
)",
                                "/base");
  CHECK(c.seed == 7);
  CHECK(c.threshold == doctest::Approx(0.9));
  CHECK(c.offline);
  CHECK(c.work("a") == std::filesystem::path("/abs/out/a"));
  CHECK(c.policy == "append");
  CHECK(c.tagger == "external");
  REQUIRE(c.tagger_predictions);
  CHECK(c.resolve(*c.tagger_predictions) == std::filesystem::path("/base/preds_{edition}.jsonl"));
  CHECK_FALSE(c.headword_check);
}

TEST_CASE("integer threshold is accepted") {
  CHECK(validate_config_text("threshold = 1", "/").threshold == 1.0);
}

TEST_CASE("threshold out of range") {
  CHECK(error_of("threshold = 1.5") == ErrorCode::kRangeError);
  CHECK(error_of("threshold = 0") == ErrorCode::kRangeError);
  CHECK(error_of("threshold = -0.2") == ErrorCode::kRangeError);
}

TEST_CASE("unknown key names the offender") {
  try {
    validate_config_text("treshold = 0.8", "/");
    FAIL("expected UnknownKey");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kUnknownKey);
    CHECK(std::string(e.what()).find("treshold") != std::string::npos);
  }
  CHECK(error_of("[match]\nthreshold_x = 1") == ErrorCode::kUnknownKey);
  CHECK(error_of("[nosuch]\nkey = 1") == ErrorCode::kUnknownKey);
}

TEST_CASE("malformed input is a parse error") {
  CHECK(error_of("threshold") == ErrorCode::kParseError);
  CHECK(error_of("[match") == ErrorCode::kParseError);
  CHECK(error_of("policy = \"discard") == ErrorCode::kParseError);
  CHECK(error_of("seed = 1\nseed = 2") == ErrorCode::kParseError);
  CHECK(error_of("offline = maybe") == ErrorCode::kParseError);
  CHECK(error_of("threshold = \"high\"") == ErrorCode::kParseError);
}

TEST_CASE("selector values are validated") {
  CHECK(error_of("[segment]\npolicy = \"merge\"") == ErrorCode::kRangeError);
  CHECK(error_of("[segment]\ntagger = \"external\"") == ErrorCode::kRangeError);
  CHECK(error_of("[store]\nembedding = \"file\"") == ErrorCode::kRangeError);
  CHECK(error_of("[silver]\neditions = \"E1,E7\"") == ErrorCode::kRangeError);
  CHECK(error_of("[ingest]\nconcurrency = 0") == ErrorCode::kRangeError);
}

TEST_CASE("string escapes and comments inside strings") {
  auto values = config::parse_toml(R"(a = "x # not a comment"
b = "q\"t")");
  CHECK(std::get<std::string>(values["a"]) == "x # not a comment");
  CHECK(std::get<std::string>(values["b"]) == "q\"t");
}

TEST_CASE("config file paths resolve against the file's directory") {
  testing::TempDir dir;
  io::write_file_atomic(dir / "p.toml", "[segment]\nvocabulary = \"v.txt\"\n");
  auto c = config::validate_config(dir / "p.toml");
  CHECK(c.resolve(*c.vocabulary) == dir / "v.txt");
  CHECK_THROWS_AS(config::validate_config(dir / "absent.toml"), Error);
}

TEST_CASE("fingerprint tracks settings") {
  auto a = validate_config_text("threshold = 0.75", "/");
  auto b = validate_config_text("", "/");
  auto c = validate_config_text("threshold = 0.8", "/");
  CHECK(a.fingerprint() == b.fingerprint());
  CHECK(a.fingerprint() != c.fingerprint());
}
