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

#ifndef CATFUZZ_LEARNER_H_
#define CATFUZZ_LEARNER_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "catfuzz/lattice.h"
#include "catfuzz/outcome.h"
#include "catfuzz/rng.h"
#include "json.hpp"

namespace catfuzz {

struct LearnerConfig {
  double p_threshold = 0.25;
  double r_threshold = 0.25;
  size_t max_disjuncts = 4;
  size_t exact_cap = 12;
  size_t infer_budget = 200;
  size_t no_repeat_window = 8;
  // Upper bound on queries generated from one hypothesis.
  size_t batch_cap = 256;

  nlohmann::json ToJson() const;
  // Missing keys keep their defaults. Throws kInvalidArgument.
  static LearnerConfig FromJson(const nlohmann::json& j);
  void Validate() const;
};

// Exact non-negative fraction.
struct Rational {
  int64_t num = 0;
  int64_t den = 1;

  double ToDouble() const { return static_cast<double>(num) / den; }
  std::string ToString() const;
  friend bool operator==(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num) * b.den ==
           static_cast<__int128>(b.num) * a.den;
  }
  friend std::strong_ordering operator<=>(const Rational& a,
                                          const Rational& b) {
    return static_cast<__int128>(a.num) * b.den <=>
           static_cast<__int128>(b.num) * a.den;
  }
};

struct Score {
  Rational precision;
  Rational recall;
  friend bool operator==(const Score&, const Score&) = default;
};

struct Hypothesis {
  std::vector<size_t> category_ids;  // ascending
  bool accepted = false;
  Score score;
};

struct Query {
  size_t category = 0;
  Polarity polarity = Polarity::kExploratory;
  std::string provenance;
  friend bool operator==(const Query&, const Query&) = default;
};

struct HistoryRecord {
  uint64_t case_id = 0;
  size_t category = 0;
  Polarity polarity = Polarity::kExploratory;
  Phase phase = Phase::kRandom;
  OutcomeKind outcome = OutcomeKind::kValid;
};

// True when a record in `category` is covered by the disjunction `ids`:
// the category is a member or is stronger than some member.
bool Covers(const Lattice& lattice, std::span<const size_t> ids,
            size_t category);

// Precision and recall of `ids` against the informative records of
// `history`. P is 0 when nothing is covered; R is 1 when there is no valid
// record. Throws kEmptyHistory.
Score Consistency(const Lattice& lattice, std::span<const size_t> ids,
                  std::span<const HistoryRecord> history);

bool Accept(const Score& score, const LearnerConfig& config);

// Best disjunction under (most covered valid, fewest covered invalid,
// fewest categories, smallest ids). Throws kNoValidRecord.
Hypothesis ProposeHypothesis(const Lattice& lattice,
                             std::span<const HistoryRecord> history,
                             const LearnerConfig& config);

// Learning state for one (function, parameter).
class Learner {
 public:
  Learner(const Lattice* lattice, LearnerConfig config, uint64_t seed);

  Phase phase() const { return phase_; }
  bool inference_failed() const { return inference_failed_; }
  const std::optional<Hypothesis>& hypothesis() const { return hypothesis_; }
  const std::vector<HistoryRecord>& history() const { return history_; }
  const std::deque<Query>& pending() const { return pending_; }
  size_t inference_queries() const { return inference_queries_; }
  // Set once a hypothesis left no category outside itself to test.
  bool no_negative_queries() const { return no_negative_queries_; }
  const LearnerConfig& config() const { return config_; }

  Query Next();
  void Update(const Query& query, uint64_t case_id, OutcomeKind outcome);

  nlohmann::json Checkpoint() const;
  void Restore(const nlohmann::json& j);

 private:
  Query Exploratory(bool prefer_unqueried);
  Query PickFrom(std::vector<size_t> pool, Polarity polarity,
                 const std::string& provenance);
  void Issue(size_t category);
  void Rescore();
  void RebuildBatch();
  bool Queried(size_t category) const { return queried_.contains(category); }

  const Lattice* lattice_;
  LearnerConfig config_;
  Rng rng_;
  Phase phase_ = Phase::kRandom;
  bool inference_failed_ = false;
  bool no_negative_queries_ = false;
  size_t inference_queries_ = 0;
  uint64_t issued_ = 0;
  std::optional<Hypothesis> hypothesis_;
  std::vector<HistoryRecord> history_;
  std::deque<Query> pending_;
  std::deque<size_t> recent_;
  std::map<size_t, uint64_t> last_issued_;
  std::map<size_t, size_t> queried_;
};

}  // namespace catfuzz

#endif  // CATFUZZ_LEARNER_H_
