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

#ifndef CATFUZZ_OUTCOME_H_
#define CATFUZZ_OUTCOME_H_

#include <optional>
#include <string_view>

namespace catfuzz {

// kSetupError: argument reconstruction failed before the target ran.
enum class OutcomeKind { kValid, kInvalid, kCrash, kTimeout, kSetupError };

enum class Phase { kRandom, kInference, kValidGeneration };

enum class Polarity { kExpectValid, kExpectInvalid, kExploratory };

std::string_view OutcomeName(OutcomeKind kind);
std::optional<OutcomeKind> ParseOutcome(std::string_view name);
std::string_view PhaseName(Phase phase);
std::optional<Phase> ParsePhase(std::string_view name);
std::string_view PolarityName(Polarity polarity);
std::optional<Polarity> ParsePolarity(std::string_view name);

// Only valid and invalid outcomes say anything about a constraint.
inline bool IsInformative(OutcomeKind kind) {
  return kind == OutcomeKind::kValid || kind == OutcomeKind::kInvalid;
}

}  // namespace catfuzz

#endif  // CATFUZZ_OUTCOME_H_
