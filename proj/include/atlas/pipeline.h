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
#ifndef ATLAS_PIPELINE_H_
#define ATLAS_PIPELINE_H_

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "atlas/config.h"
#include "atlas/http.h"
#include "atlas/io.h"

namespace atlas::pipeline {

// Fixed stage order.
const std::vector<std::string> &stage_names();
const std::vector<std::string> &prerequisites(const std::string &stage);

// Paths (inside the work directory) a stage writes.
std::vector<std::filesystem::path> stage_outputs(const std::string &stage, const config::PipelineConfig &cfg);
// Final cross-edition table.
std::filesystem::path final_table(const config::PipelineConfig &cfg);

struct StageReport {
  std::string stage;
  std::string status;  // "ran" or "unchanged"
  std::map<std::string, std::string> inputs;   // path -> content hash
  std::map<std::string, std::string> outputs;  // path -> content hash
  io::json summary;
  double elapsed_ms = 0.0;

  io::json to_json() const;
};

struct RunOptions {
  bool force = false;
  // Used by live ingest and candidate fetching; an HttpTransport by default.
  std::shared_ptr<Transport> transport;
};

// Holds <work_dir>/.atlas.lock for its lifetime; a second holder gets
// kStageFailed.
class WorkDirLock {
 public:
  explicit WorkDirLock(const std::filesystem::path &work_dir);
  ~WorkDirLock();
  WorkDirLock(const WorkDirLock &) = delete;
  WorkDirLock &operator=(const WorkDirLock &) = delete;

 private:
  std::filesystem::path path_;
};

// Runs one stage. Throws kMissingPrerequisite when an upstream output is
// absent and kStageFailed wrapping any module error. Skips the stage with
// status "unchanged" when inputs, configuration and outputs match the last
// logged run.
StageReport run_stage(const std::string &name, const config::PipelineConfig &cfg, const RunOptions &options = {});
std::vector<StageReport> run_all(const config::PipelineConfig &cfg, const RunOptions &options = {});

std::filesystem::path run_log_path(const config::PipelineConfig &cfg);

}  // namespace atlas::pipeline

#endif  // ATLAS_PIPELINE_H_
