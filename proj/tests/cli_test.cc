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
#include <sys/wait.h>

#include <array>
#include <cstdio>

#include "atlas/entry.h"
#include "atlas/io.h"
#include "doctest.h"
#include "test_util.h"

using namespace atlas;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result atlas_cli(const std::string &args) {
  std::string cmd = std::string("\"") + ATLAS_BIN + "\" " + args + " 2>/dev/null";
  Result r;
  FILE *pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string q(const std::filesystem::path &p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(atlas_cli("--help").code == 0);
  CHECK(atlas_cli("").code == 2);
  CHECK(atlas_cli("frobnicate").code == 2);
  CHECK(atlas_cli("match --threshold abc").code == 2);
}

TEST_CASE("configuration errors exit with 2") {
  testing::TempDir dir;
  io::write_file_atomic(dir / "typo.toml", "treshold = 0.8\n");
  io::write_file_atomic(dir / "range.toml", "threshold = 1.5\n");
  io::write_file_atomic(dir / "syntax.toml", "threshold = \n");
  CHECK(atlas_cli("run --all --config " + q(dir / "typo.toml")).code == 2);
  CHECK(atlas_cli("run --all --config " + q(dir / "range.toml")).code == 2);
  CHECK(atlas_cli("run --all --config " + q(dir / "syntax.toml")).code == 2);
  CHECK(atlas_cli("run --all --config " + q(dir / "absent.toml")).code == 2);
}

TEST_CASE("runtime failures exit with 1") {
  testing::TempDir dir;
  CHECK(atlas_cli("match --entries " + q(dir / "none.jsonl") + " --store " + q(dir / "none.atle") + " --out " +
                  q(dir / "m.tsv"))
            .code == 1);
  io::write_file_atomic(dir / "p.toml", testing::fixture_config_text(dir / "work"));
  CHECK(atlas_cli("run --stage match --config " + q(dir / "p.toml")).code == 1);
}

TEST_CASE("configured run through the cli") {
  testing::TempDir dir;
  io::write_file_atomic(dir / "p.toml", testing::fixture_config_text(dir / "work"));
  CHECK(atlas_cli("run --all --config " + q(dir / "p.toml")).code == 0);
  CHECK(io::read_file(dir / "work/atlas.tsv") == io::read_file(testing::fixtures_dir() / "golden/atlas.tsv"));
  // Stage subcommands accept the same configuration.
  CHECK(atlas_cli("match --config " + q(dir / "p.toml")).code == 0);
  CHECK(atlas_cli("store query --store " + q(dir / "work/store.atle") + " --id E1_1 --k 2 --prefix E2_").out.find(
            "E2_1") != std::string::npos);
}

TEST_CASE("standalone stage commands") {
  testing::TempDir dir;
  const auto fx = testing::fixtures_dir();
  CHECK(atlas_cli("ingest --edition E1 --manifest " + q(fx / "manifests/E1.jsonl") + " --fixtures " +
                  q(fx / "pages") + " --out " + q(dir / "p1.jsonl"))
            .code == 0);
  CHECK(atlas_cli("ingest --edition E2 --manifest " + q(fx / "manifests/E2.jsonl") + " --fixtures " +
                  q(fx / "pages") + " --out " + q(dir / "p2.jsonl"))
            .code == 0);
  CHECK(atlas_cli("silver headwords --in " + q(dir / "p1.jsonl") + " " + q(dir / "p2.jsonl") + " --out " +
                  q(dir / "silver") + " --test-size 5")
            .code == 0);
  CHECK(std::filesystem::exists(dir / "silver/counts.json"));
  CHECK(atlas_cli("segment --in " + q(dir / "p1.jsonl") + " --out " + q(dir / "e1.jsonl") + " --vocab " +
                  q(testing::source_dir() / "data/vocab.txt"))
            .code == 0);
  CHECK(atlas_cli("classify --in " + q(dir / "e1.jsonl") + " --out " + q(dir / "c1.jsonl") + " --lexicon " +
                  q(testing::source_dir() / "data/lexicon") + " --vocab " +
                  q(testing::source_dir() / "data/vocab.txt"))
            .code == 0);
  CHECK(read_entries(dir / "c1.jsonl").size() == 16);
}

TEST_CASE("evaluation commands") {
  auto r = atlas_cli("eval links --counts 1498,267,514,486,101,94,80 --denominator correct");
  CHECK(r.code == 0);
  CHECK(r.out.find("27.59") != std::string::npos);
  CHECK(r.out.find("94.6") != std::string::npos);

  testing::TempDir dir;
  io::write_file_atomic(dir / "c.json", R"({"counts":[[486211,236],[905,12648]]})");
  auto t = atlas_cli("eval tokens --confusion " + q(dir / "c.json"));
  CHECK(t.code == 0);
  CHECK(t.out.find("0.9778") != std::string::npos);
  CHECK(atlas_cli("eval links --counts 1,2,3").code == 2);
}
