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

// Independent reference implementations used by the unit tests and the
// acceptance binary. Kept deliberately naive.

#ifndef CATFUZZ_TESTS_ORACLES_H_
#define CATFUZZ_TESTS_ORACLES_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "catfuzz/campaign.h"
#include "catfuzz/lattice.h"
#include "catfuzz/learner.h"
#include "catfuzz/property.h"
#include "catfuzz/rng.h"
#include "catfuzz/value.h"

namespace catfuzz::oracle {

// A lattice whose inputs carry the given property-sets (ordinals into a
// catalog of `width` opaque properties) and no implication rules.
Lattice MakeLattice(const std::vector<std::vector<size_t>>& sets, size_t width);

// Coverage computed straight from the closed sets, without IsWeaker.
bool CoversRef(const Lattice& lattice, const std::vector<size_t>& ids,
               size_t category);

struct Counts {
  int64_t covered_valid = 0;
  int64_t covered = 0;
  int64_t valid = 0;
};
Counts CountRef(const Lattice& lattice, const std::vector<size_t>& ids,
                const std::vector<HistoryRecord>& history);

// Every subset of size 1..max_disjuncts over categories with a valid
// record; ties go to the smaller set, then the lexicographically smaller.
std::vector<size_t> ExhaustiveHypothesis(const Lattice& lattice,
                                         const std::vector<HistoryRecord>& history,
                                         size_t max_disjuncts);

// Randomized catalog over a finite universe, for the strength order.
struct UniverseTrial {
  Catalog catalog;
  std::vector<Value> universe;
  std::vector<Value> corpus;  // drawn from the universe
};
UniverseTrial MakeUniverseTrial(uint64_t seed);

// Definition-level weaker relation: every input satisfying c2's properties
// satisfies c1's, and the converse fails for at least one input.
bool ExtensionalWeaker(const UniverseTrial& t, const InputDatabase& db,
                       size_t c1, size_t c2);

// Mismatches between Lattice and the extensional order for one trial.
struct LatticeCheck {
  size_t categories = 0;
  size_t pairs = 0;
  size_t mismatches = 0;
  std::string first_mismatch;
};
LatticeCheck CheckLatticeTrial(uint64_t seed);

// Random hypothesis-search fixture; returns "" on agreement.
struct SearchCheck {
  size_t candidates = 0;
  std::string mismatch;
};
SearchCheck CheckSearchTrial(uint64_t seed);

// Frozen consistency fixtures.
struct FormulaCase {
  std::string name;
  std::vector<std::vector<size_t>> sets;  // lattice, one input per set
  std::vector<size_t> hypothesis;
  std::string history;  // "v3 i0 c2 t1 s4": outcome letter + category
  Rational precision;
  Rational recall;
};
const std::vector<FormulaCase>& FormulaCases();
Lattice FormulaLattice(const FormulaCase& fc);
std::vector<HistoryRecord> ParseHistory(const std::string& text);

// Scripted learner runs for the golden query streams.
struct Scenario {
  std::string name;
  std::vector<std::vector<size_t>> sets;
  std::function<OutcomeKind(size_t category)> oracle;
  LearnerConfig config;
  uint64_t seed = 0;
  size_t steps = 0;
};
const std::vector<Scenario>& Scenarios();
// One line per query: step, phase, polarity, category, outcome, provenance.
std::string RunScenario(const Scenario& s);

// Arbitrary value of any kind, nesting at most a few levels.
Value RandomValue(Rng& rng, int depth = 0);

}  // namespace catfuzz::oracle

#endif  // CATFUZZ_TESTS_ORACLES_H_
