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

#ifndef CATFUZZ_REPORT_H_
#define CATFUZZ_REPORT_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "catfuzz/lattice.h"
#include "catfuzz/log.h"
#include "json.hpp"

namespace catfuzz {

struct CrashGroup {
  std::string function;
  std::string detail;
  uint64_t representative = 0;
  std::vector<uint64_t> members;
};

// Crash groups keyed by (function, crash detail), ordered by
// representative case id.
std::vector<CrashGroup> DedupCrashes(const ExecutionLog& log);

struct AcceptedHypothesis {
  std::string function;
  std::string param;
  std::vector<size_t> categories;
  std::string text;
};

struct Report {
  size_t catalog_size = 0;
  size_t covered_properties = 0;
  double property_coverage = 0;
  size_t functions = 0;
  size_t functions_with_valid = 0;
  double api_coverage = 0;
  uint64_t cases = 0;
  uint64_t valid = 0;
  double valid_rate = 0;
  uint64_t valid_gen_cases = 0;
  uint64_t valid_gen_valid = 0;
  double valid_gen_rate = 0;
  std::map<std::string, uint64_t> outcomes;
  std::vector<CrashGroup> crash_groups;
  // function -> parameter -> phase reached ("inference-failed" included).
  std::map<std::string, std::map<std::string, std::string>> phases;
  std::vector<AcceptedHypothesis> accepted;
  std::vector<std::string> early_crashers;

  nlohmann::json ToJson() const;
  std::string ToText() const;
};

// Pure function of the log and the database.
Report ComputeReport(const ExecutionLog& log, const InputDatabase& db);

// Properties of a category without those implied by another member.
std::string DescribeCategory(const InputDatabase& db, size_t category);

}  // namespace catfuzz

#endif  // CATFUZZ_REPORT_H_
