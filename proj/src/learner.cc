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

#include "catfuzz/learner.h"

#include <algorithm>
#include <numeric>
#include <set>

#include "catfuzz/error.h"

namespace catfuzz {

using nlohmann::json;

// -- LearnerConfig ---------------------------------------------------------

json LearnerConfig::ToJson() const {
  return json{{"p_threshold", p_threshold},
              {"r_threshold", r_threshold},
              {"max_disjuncts", max_disjuncts},
              {"exact_cap", exact_cap},
              {"infer_budget", infer_budget},
              {"no_repeat_window", no_repeat_window},
              {"batch_cap", batch_cap}};
}

LearnerConfig LearnerConfig::FromJson(const json& j) {
  LearnerConfig c;
  try {
    if (j.contains("p_threshold")) c.p_threshold = j.at("p_threshold").get<double>();
    if (j.contains("r_threshold")) c.r_threshold = j.at("r_threshold").get<double>();
    if (j.contains("max_disjuncts")) c.max_disjuncts = j.at("max_disjuncts").get<size_t>();
    if (j.contains("exact_cap")) c.exact_cap = j.at("exact_cap").get<size_t>();
    if (j.contains("infer_budget")) c.infer_budget = j.at("infer_budget").get<size_t>();
    if (j.contains("no_repeat_window")) {
      c.no_repeat_window = j.at("no_repeat_window").get<size_t>();
    }
    if (j.contains("batch_cap")) c.batch_cap = j.at("batch_cap").get<size_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("learner config: ") + e.what());
  }
  c.Validate();
  return c;
}

void LearnerConfig::Validate() const {
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(p_threshold) || !in_unit(r_threshold)) {
    throw Error(ErrorCode::kInvalidArgument, "thresholds must lie in [0, 1]");
  }
  if (max_disjuncts == 0 || batch_cap == 0 || infer_budget == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "max_disjuncts, batch_cap and infer_budget must be positive");
  }
}

std::string Rational::ToString() const {
  const int64_t g = std::gcd(num, den);
  if (g == 0) return "0/1";
  return std::to_string(num / g) + "/" + std::to_string(den / g);
}

// -- Scoring ---------------------------------------------------------------

bool Covers(const Lattice& lattice, std::span<const size_t> ids,
            size_t category) {
  for (size_t m : ids) {
    if (m == category || lattice.IsWeaker(m, category)) return true;
  }
  return false;
}

Score Consistency(const Lattice& lattice, std::span<const size_t> ids,
                  std::span<const HistoryRecord> history) {
  if (history.empty()) {
    throw Error(ErrorCode::kEmptyHistory, "consistency needs a history");
  }
  int64_t valid = 0, covered = 0, covered_valid = 0;
  for (const HistoryRecord& r : history) {
    if (!IsInformative(r.outcome)) continue;
    const bool is_valid = r.outcome == OutcomeKind::kValid;
    valid += is_valid;
    if (Covers(lattice, ids, r.category)) {
      ++covered;
      covered_valid += is_valid;
    }
  }
  Score s;
  s.precision = covered == 0 ? Rational{0, 1} : Rational{covered_valid, covered};
  s.recall = valid == 0 ? Rational{1, 1} : Rational{covered_valid, valid};
  return s;
}

bool Accept(const Score& score, const LearnerConfig& config) {
  return score.precision.ToDouble() >= config.p_threshold &&
         score.recall.ToDouble() >= config.r_threshold;
}

namespace {

// Records grouped by category: records in one category share coverage.
struct Cell {
  size_t category;
  int64_t valid = 0;
  int64_t invalid = 0;
};

struct Candidate {
  std::vector<size_t> ids;  // ascending
  int64_t valid = 0;
  int64_t invalid = 0;
};

bool Better(const Candidate& a, const Candidate& b) {
  if (a.valid != b.valid) return a.valid > b.valid;
  if (a.invalid != b.invalid) return a.invalid < b.invalid;
  if (a.ids.size() != b.ids.size()) return a.ids.size() < b.ids.size();
  return a.ids < b.ids;
}

class Search {
 public:
  Search(const Lattice& lattice, std::span<const HistoryRecord> history) {
    std::map<size_t, Cell> cells;
    for (const HistoryRecord& r : history) {
      if (!IsInformative(r.outcome)) continue;
      Cell& c = cells.try_emplace(r.category, Cell{r.category}).first->second;
      (r.outcome == OutcomeKind::kValid ? c.valid : c.invalid) += 1;
    }
    for (const auto& [id, cell] : cells) {
      cells_.push_back(cell);
      if (cell.valid > 0) candidates_.push_back(id);
    }
    for (size_t c : candidates_) {
      Bitset cover(cells_.size());
      for (size_t i = 0; i < cells_.size(); ++i) {
        const size_t q = cells_[i].category;
        if (q == c || lattice.IsWeaker(c, q)) cover.Set(i);
      }
      cover_[c] = std::move(cover);
    }
  }

  const std::vector<size_t>& candidates() const { return candidates_; }

  Candidate Evaluate(std::vector<size_t> ids) const {
    std::sort(ids.begin(), ids.end());
    Candidate out;
    Bitset covered(cells_.size());
    for (size_t c : ids) covered |= cover_.at(c);
    for (size_t i : covered.Ones()) {
      out.valid += cells_[i].valid;
      out.invalid += cells_[i].invalid;
    }
    out.ids = std::move(ids);
    return out;
  }

  Candidate Exact(size_t max_size) const {
    Candidate best;
    bool have = false;
    std::vector<size_t> pick;
    std::function<void(size_t)> rec = [&](size_t start) {
      if (!pick.empty()) {
        Candidate c = Evaluate(pick);
        if (!have || Better(c, best)) {
          best = std::move(c);
          have = true;
        }
      }
      if (pick.size() == max_size) return;
      for (size_t i = start; i < candidates_.size(); ++i) {
        pick.push_back(candidates_[i]);
        rec(i + 1);
        pick.pop_back();
      }
    };
    rec(0);
    return best;
  }

  Candidate Greedy(size_t max_size) const {
    Candidate cur;
    cur.valid = -1;
    while (cur.ids.size() < max_size) {
      std::optional<Candidate> best_step;
      for (size_t c : candidates_) {
        if (std::find(cur.ids.begin(), cur.ids.end(), c) != cur.ids.end()) {
          continue;
        }
        std::vector<size_t> ids = cur.ids;
        ids.push_back(c);
        Candidate next = Evaluate(ids);
        if (!best_step || Better(next, *best_step)) best_step = std::move(next);
      }
      if (!best_step || !Better(*best_step, cur)) break;
      cur = std::move(*best_step);
    }
    // Swap and removal refinement until no move improves.
    for (bool improved = true; improved;) {
      improved = false;
      for (size_t i = 0; i < cur.ids.size() && !improved; ++i) {
        if (cur.ids.size() > 1) {
          std::vector<size_t> ids = cur.ids;
          ids.erase(ids.begin() + i);
          Candidate t = Evaluate(ids);
          if (Better(t, cur)) {
            cur = std::move(t);
            improved = true;
            break;
          }
        }
        for (size_t c : candidates_) {
          if (std::find(cur.ids.begin(), cur.ids.end(), c) != cur.ids.end()) {
            continue;
          }
          std::vector<size_t> ids = cur.ids;
          ids[i] = c;
          Candidate t = Evaluate(ids);
          if (Better(t, cur)) {
            cur = std::move(t);
            improved = true;
            break;
          }
        }
      }
    }
    return cur;
  }

 private:
  std::vector<Cell> cells_;
  std::vector<size_t> candidates_;
  std::map<size_t, Bitset> cover_;
};

std::string IdList(const std::vector<size_t>& ids) {
  std::string s = "h=[";
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(ids[i]);
  }
  return s + "]";
}

template <typename T>
T Checked(std::optional<T> v, const json& name) {
  if (!v) {
    throw Error(ErrorCode::kParse, "learner checkpoint: bad name " + name.dump());
  }
  return *v;
}

json QueryToJson(const Query& q) {
  return json{{"category", q.category},
              {"polarity", std::string(PolarityName(q.polarity))},
              {"provenance", q.provenance}};
}

Query QueryFromJson(const json& j) {
  return Query{j.at("category").get<size_t>(),
               Checked(ParsePolarity(j.at("polarity").get<std::string>()),
                       j.at("polarity")),
               j.at("provenance").get<std::string>()};
}

}  // namespace

Hypothesis ProposeHypothesis(const Lattice& lattice,
                             std::span<const HistoryRecord> history,
                             const LearnerConfig& config) {
  Search search(lattice, history);
  if (search.candidates().empty()) {
    throw Error(ErrorCode::kNoValidRecord, "no valid record to generalize");
  }
  Candidate best = search.candidates().size() <= config.exact_cap
                       ? search.Exact(config.max_disjuncts)
                       : search.Greedy(config.max_disjuncts);
  Hypothesis h;
  h.category_ids = std::move(best.ids);
  h.score = Consistency(lattice, h.category_ids, history);
  return h;
}

// -- Learner ---------------------------------------------------------------

Learner::Learner(const Lattice* lattice, LearnerConfig config, uint64_t seed)
    : lattice_(lattice), config_(config), rng_(seed) {
  config_.Validate();
  if (lattice_->size() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "learner needs a category");
  }
}

void Learner::Issue(size_t category) {
  if (config_.no_repeat_window > 0) {
    recent_.push_back(category);
    while (recent_.size() > config_.no_repeat_window) recent_.pop_front();
  }
  last_issued_[category] = issued_++;
}

Query Learner::PickFrom(std::vector<size_t> pool, Polarity polarity,
                        const std::string& provenance) {
  std::vector<size_t> eligible;
  for (size_t c : pool) {
    if (std::find(recent_.begin(), recent_.end(), c) == recent_.end()) {
      eligible.push_back(c);
    }
  }
  size_t pick;
  if (!eligible.empty()) {
    pick = eligible[rng_.Uniform(eligible.size())];
  } else {
    // Every candidate is inside the window: draw from the least recently
    // issued half. Always taking the oldest would be a fixed rotation, and
    // parameters queried jointly would then move in lockstep.
    std::sort(pool.begin(), pool.end(), [&](size_t a, size_t b) {
      return last_issued_.at(a) < last_issued_.at(b);
    });
    pick = pool[rng_.Uniform((pool.size() + 1) / 2)];
  }
  Issue(pick);
  return Query{pick, polarity, provenance};
}

Query Learner::Exploratory(bool prefer_unqueried) {
  std::vector<size_t> pool;
  if (prefer_unqueried) {
    for (size_t c = 0; c < lattice_->size(); ++c) {
      if (!Queried(c)) pool.push_back(c);
    }
  }
  if (pool.empty()) {
    pool.resize(lattice_->size());
    std::iota(pool.begin(), pool.end(), 0);
  }
  const char* why = phase_ == Phase::kRandom ? "random"
                    : inference_failed_      ? "inference-failed"
                                             : "fallback";
  return PickFrom(std::move(pool), Polarity::kExploratory, why);
}

Query Learner::Next() {
  if (phase_ == Phase::kRandom || inference_failed_) return Exploratory(false);
  if (phase_ == Phase::kInference) {
    while (!pending_.empty() && Queried(pending_.front().category)) {
      pending_.pop_front();
    }
    if (pending_.empty()) RebuildBatch();
    if (!pending_.empty()) {
      Query q = pending_.front();
      pending_.pop_front();
      Issue(q.category);
      return q;
    }
    return Exploratory(true);
  }
  std::set<size_t> pool;
  for (size_t m : hypothesis_->category_ids) {
    pool.insert(m);
    for (size_t s : lattice_->Stronger(m)) pool.insert(s);
  }
  return PickFrom(std::vector<size_t>(pool.begin(), pool.end()),
                  Polarity::kExpectValid,
                  IdList(hypothesis_->category_ids) + " accepted");
}

void Learner::RebuildBatch() {
  pending_.clear();
  if (!hypothesis_) return;
  const std::vector<size_t>& h = hypothesis_->category_ids;
  const std::string tag = IdList(h);

  std::map<size_t, std::string> expect_valid;
  for (size_t m : h) {
    if (!Queried(m)) expect_valid.try_emplace(m, tag + " member " + std::to_string(m));
    for (size_t s : lattice_->Stronger(m)) {
      if (!Queried(s)) {
        expect_valid.try_emplace(s, tag + " stronger-than " + std::to_string(m));
      }
    }
  }

  struct NearMiss {
    size_t missing;
    size_t category;
    size_t of;
  };
  std::vector<NearMiss> near;
  bool any_uncovered = false;
  for (size_t d = 0; d < lattice_->size(); ++d) {
    if (Covers(*lattice_, h, d)) continue;
    any_uncovered = true;
    if (Queried(d)) continue;
    const Bitset& dc = lattice_->category(d).closed;
    NearMiss best{SIZE_MAX, d, 0};
    for (size_t m : h) {
      const size_t missing = (lattice_->category(m).closed & ~dc).Count();
      if (missing < best.missing) best = NearMiss{missing, d, m};
    }
    near.push_back(best);
  }
  no_negative_queries_ = !any_uncovered;
  std::sort(near.begin(), near.end(), [](const NearMiss& a, const NearMiss& b) {
    return a.missing != b.missing ? a.missing < b.missing
                                  : a.category < b.category;
  });

  auto v = expect_valid.begin();
  auto i = near.begin();
  while (pending_.size() < config_.batch_cap &&
         (v != expect_valid.end() || i != near.end())) {
    if (v != expect_valid.end()) {
      pending_.push_back(Query{v->first, Polarity::kExpectValid, v->second});
      ++v;
    }
    if (i != near.end() && pending_.size() < config_.batch_cap) {
      pending_.push_back(Query{i->category, Polarity::kExpectInvalid,
                               tag + " near-miss-of " + std::to_string(i->of) +
                                   " missing " + std::to_string(i->missing)});
      ++i;
    }
  }
}

void Learner::Rescore() {
  Hypothesis next = ProposeHypothesis(*lattice_, history_, config_);
  const bool changed =
      !hypothesis_ || hypothesis_->category_ids != next.category_ids;
  hypothesis_ = std::move(next);
  if (changed) RebuildBatch();
}

void Learner::Update(const Query& query, uint64_t case_id,
                     OutcomeKind outcome) {
  history_.push_back(
      HistoryRecord{case_id, query.category, query.polarity, phase_, outcome});
  // Random-phase queries ran next to unvetted arguments for the other
  // parameters, so they do not count as tested for inference.
  if (phase_ != Phase::kRandom) ++queried_[query.category];
  switch (phase_) {
    case Phase::kRandom:
      if (outcome == OutcomeKind::kValid) {
        phase_ = Phase::kInference;
        Rescore();
      }
      break;
    case Phase::kInference:
      if (inference_failed_) break;
      ++inference_queries_;
      Rescore();
      if (pending_.empty() && Accept(hypothesis_->score, config_)) {
        hypothesis_->accepted = true;
        phase_ = Phase::kValidGeneration;
      } else if (inference_queries_ >= config_.infer_budget) {
        inference_failed_ = true;
        pending_.clear();
      }
      break;
    case Phase::kValidGeneration:
      break;
  }
}

// -- Checkpointing ---------------------------------------------------------

json Learner::Checkpoint() const {
  json j;
  j["phase"] = std::string(PhaseName(phase_));
  j["inference_failed"] = inference_failed_;
  j["no_negative_queries"] = no_negative_queries_;
  j["inference_queries"] = inference_queries_;
  j["issued"] = issued_;
  j["rng"] = rng_.SaveState();
  json hist = json::array();
  for (const HistoryRecord& r : history_) {
    hist.push_back(json{{"case", r.case_id},
                        {"category", r.category},
                        {"polarity", std::string(PolarityName(r.polarity))},
                        {"phase", std::string(PhaseName(r.phase))},
                        {"outcome", std::string(OutcomeName(r.outcome))}});
  }
  j["history"] = std::move(hist);
  if (hypothesis_) {
    j["hypothesis"] = json{{"ids", hypothesis_->category_ids},
                           {"accepted", hypothesis_->accepted}};
  }
  json pending = json::array();
  for (const Query& q : pending_) pending.push_back(QueryToJson(q));
  j["pending"] = std::move(pending);
  j["recent"] = recent_;
  json last = json::array();
  for (const auto& [c, t] : last_issued_) last.push_back({c, t});
  j["last_issued"] = std::move(last);
  return j;
}

void Learner::Restore(const json& j) {
  try {
    phase_ = Checked(ParsePhase(j.at("phase").get<std::string>()), j.at("phase"));
    inference_failed_ = j.at("inference_failed").get<bool>();
    no_negative_queries_ = j.at("no_negative_queries").get<bool>();
    inference_queries_ = j.at("inference_queries").get<size_t>();
    issued_ = j.at("issued").get<uint64_t>();
    rng_.LoadState(j.at("rng").get<std::string>());
    history_.clear();
    queried_.clear();
    for (const json& r : j.at("history")) {
      HistoryRecord rec{r.at("case").get<uint64_t>(),
                        r.at("category").get<size_t>(),
                        Checked(ParsePolarity(r.at("polarity").get<std::string>()),
                                r.at("polarity")),
                        Checked(ParsePhase(r.at("phase").get<std::string>()),
                                r.at("phase")),
                        Checked(ParseOutcome(r.at("outcome").get<std::string>()),
                                r.at("outcome"))};
      history_.push_back(rec);
      if (rec.phase != Phase::kRandom) ++queried_[rec.category];
    }
    hypothesis_.reset();
    if (j.contains("hypothesis")) {
      Hypothesis h;
      h.category_ids = j.at("hypothesis").at("ids").get<std::vector<size_t>>();
      h.accepted = j.at("hypothesis").at("accepted").get<bool>();
      h.score = Consistency(*lattice_, h.category_ids, history_);
      hypothesis_ = std::move(h);
    }
    pending_.clear();
    for (const json& q : j.at("pending")) pending_.push_back(QueryFromJson(q));
    recent_ = j.at("recent").get<std::deque<size_t>>();
    last_issued_.clear();
    for (const json& e : j.at("last_issued")) {
      last_issued_[e.at(0).get<size_t>()] = e.at(1).get<uint64_t>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("learner checkpoint: ") + e.what());
  }
}

}  // namespace catfuzz
