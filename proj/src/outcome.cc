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

#include "catfuzz/outcome.h"

#include <array>
#include <utility>

namespace catfuzz {
namespace {

template <typename E, size_t N>
std::optional<E> Parse(const std::array<std::pair<E, std::string_view>, N>& t,
                       std::string_view name) {
  for (const auto& [e, n] : t) {
    if (n == name) return e;
  }
  return std::nullopt;
}

template <typename E, size_t N>
std::string_view Name(const std::array<std::pair<E, std::string_view>, N>& t,
                      E e) {
  for (const auto& [x, n] : t) {
    if (x == e) return n;
  }
  return "?";
}

constexpr std::array<std::pair<OutcomeKind, std::string_view>, 5> kOutcomes{{
    {OutcomeKind::kValid, "valid"},
    {OutcomeKind::kInvalid, "invalid"},
    {OutcomeKind::kCrash, "crash"},
    {OutcomeKind::kTimeout, "timeout"},
    {OutcomeKind::kSetupError, "setup-error"},
}};

constexpr std::array<std::pair<Phase, std::string_view>, 3> kPhases{{
    {Phase::kRandom, "random"},
    {Phase::kInference, "inference"},
    {Phase::kValidGeneration, "valid-generation"},
}};

constexpr std::array<std::pair<Polarity, std::string_view>, 3> kPolarities{{
    {Polarity::kExpectValid, "expect-valid"},
    {Polarity::kExpectInvalid, "expect-invalid"},
    {Polarity::kExploratory, "exploratory"},
}};

}  // namespace

std::string_view OutcomeName(OutcomeKind kind) { return Name(kOutcomes, kind); }
std::optional<OutcomeKind> ParseOutcome(std::string_view name) {
  return Parse(kOutcomes, name);
}
std::string_view PhaseName(Phase phase) { return Name(kPhases, phase); }
std::optional<Phase> ParsePhase(std::string_view name) {
  return Parse(kPhases, name);
}
std::string_view PolarityName(Polarity polarity) {
  return Name(kPolarities, polarity);
}
std::optional<Polarity> ParsePolarity(std::string_view name) {
  return Parse(kPolarities, name);
}

}  // namespace catfuzz
