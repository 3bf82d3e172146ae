// Copyright 2026 The Catfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CATFUZZ_CAMPAIGN_H_
#define CATFUZZ_CAMPAIGN_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "catfuzz/executor.h"
#include "catfuzz/lattice.h"
#include "catfuzz/learner.h"
#include "catfuzz/log.h"
#include "catfuzz/property.h"
#include "json.hpp"

namespace catfuzz {

// -- Ingest ----------------------------------------------------------------

struct DroppedSeed {
  size_t line = 0;
  std::string reason;
};

struct IngestResult {
  InputDatabase db;
  std::vector<DroppedSeed> dropped;
  nlohmann::json ReportJson() const;
};

// Seeds that fail to decode or materialize are dropped and reported.
// Throws kEmptyCorpus when nothing usable remains.
IngestResult Ingest(const std::vector<std::string>& corpus_lines,
                    const CatalogConfig& config);
IngestResult IngestFile(const std::string& corpus_path,
                        const CatalogConfig& config);
void WriteCorpus(const std::string& path, const std::vector<Value>& values);

// -- Targets ---------------------------------------------------------------

struct TargetSignature {
  std::string name;
  std::vector<std::string> params;
};

// "all", or a comma list of "name" / "name(p1,p2)". Bare names take their
// parameters from the synthetic suite; "all" expands `available`.
std::vector<TargetSignature> ParseTargets(const std::string& spec,
                                          const std::vector<std::string>& available);

// -- Campaign --------------------------------------------------------------

enum class CampaignMode { kFull, kNoLearning, kRandomInputs };
std::string_view ModeName(CampaignMode mode);
std::optional<CampaignMode> ParseMode(std::string_view name);

struct CampaignConfig {
  std::vector<TargetSignature> targets;
  double budget_seconds = 3600;
  int timeout_ms = kDefaultTimeoutMs;
  uint64_t seed = 0;
  LearnerConfig learner;
  size_t workers = 1;
  size_t per_function_cap = 1000;
  size_t max_cases = 0;  // 0: no global cap
  size_t checkpoint_every = 500;
  size_t restart_cap = kDefaultRestartCap;
  CampaignMode mode = CampaignMode::kFull;
  std::vector<std::string> worker_argv;
  std::string log_path;
  std::string checkpoint_path;  // empty: "<log_path>.ckpt"
};

struct CampaignSummary {
  uint64_t cases = 0;
  bool budget_exhausted = false;
};

class Campaign {
 public:
  Campaign(const InputDatabase* db, CampaignConfig config);
  ~Campaign();

  // Starts fresh, or continues from the checkpoint when `resume`.
  CampaignSummary Run(bool resume = false);

 private:
  struct Driver;

  void InitDrivers();
  TestCase Plan(Driver& d, uint64_t case_id, LogRecord& record,
                std::vector<std::pair<size_t, Query>>& issued);
  void Apply(Driver& d, const LogRecord& record,
             const std::vector<std::pair<size_t, Query>>& issued,
             const RunResult& result);
  nlohmann::json Header() const;
  void SaveCheckpoint(uint64_t next_case, uint64_t timing_bytes);
  uint64_t LoadCheckpoint();

  const InputDatabase* db_;
  CampaignConfig config_;
  std::vector<std::unique_ptr<Driver>> drivers_;
  std::unique_ptr<WorkerPool> pool_;
  LogWriter log_;
  uint64_t timing_bytes_ = 0;
};

// Re-executes one logged case and returns its outcome.
RunResult ReplayCase(const ExecutionLog& log, const InputDatabase& db,
                     uint64_t case_id, const std::vector<std::string>& worker_argv);

// The serialized test case of a logged record, values included.
nlohmann::json Reproducer(const LogRecord& record, const InputDatabase& db,
                          int timeout_ms);
TestCase TestCaseFromReproducer(const nlohmann::json& j);

}  // namespace catfuzz

#endif  // CATFUZZ_CAMPAIGN_H_
