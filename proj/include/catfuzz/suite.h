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

#ifndef CATFUZZ_SUITE_H_
#define CATFUZZ_SUITE_H_

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "catfuzz/outcome.h"
#include "catfuzz/value.h"
#include "json.hpp"

namespace catfuzz {

// Raised by a synthetic target to reject its arguments.
class TargetException : public std::runtime_error {
 public:
  TargetException(std::string cls, const std::string& message)
      : std::runtime_error(message), cls_(std::move(cls)) {}
  const std::string& cls() const { return cls_; }

 private:
  std::string cls_;
};

// Writes "#0 <site>" to stderr and aborts the process.
[[noreturn]] void PlantedCrash(const std::string& site);

using TargetFn = std::function<void(std::span<const Materialized> args)>;

struct SyntheticTarget {
  std::string name;
  std::vector<std::string> params;
  TargetFn invoke;
};

// Deterministic desk-scale targets. With `faults`, also the fault-injection
// functions used to exercise the executor.
const std::vector<SyntheticTarget>& SyntheticSuite(bool faults = false);
const SyntheticTarget* FindSyntheticTarget(std::string_view name,
                                           bool faults = false);

// Machine-readable ground truth, one object per target:
//   {"name", "params", "steps": [{"check": pred, "raise": cls} |
//                                {"crash_if": pred, "site": name}]}
// pred: {"p", "prop", "c"} | {"all": [..]} | {"any": [..]} | {"not": pred}
//     | {"rel": "eq"|"lt"|"le", "a": measure, "b": measure}
// measure: {"p", "m": "len"|"rank"|"size"|"dim"|"value", "axis"}
const nlohmann::json& SuiteSpec();
const nlohmann::json* FindSpec(std::string_view name);

struct Prediction {
  OutcomeKind kind = OutcomeKind::kValid;
  std::string cls;   // exception class for invalid
  std::string site;  // crash site for crash
};

// Outcome the spec predicts for `args` (setup-error if one fails to
// materialize).
Prediction Predict(const nlohmann::json& spec, std::span<const Value> args);

// Every crash site of the spec, in step order.
std::vector<std::string> CrashSites(const nlohmann::json& spec);

// The fixed 200-seed corpus of the synthetic suite.
std::vector<Value> SeedCorpus();

}  // namespace catfuzz

#endif  // CATFUZZ_SUITE_H_
