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

#include <set>

#include "catfuzz/error.h"
#include "catfuzz/learner.h"
#include "catfuzz/rng.h"
#include "doctest.h"
#include "oracles.h"

namespace catfuzz {
namespace {

using oracle::MakeLattice;
using oracle::ParseHistory;

Rational R(int64_t n, int64_t d) { return Rational{n, d}; }

TEST_CASE("frozen consistency fixtures") {
  const auto& cases = oracle::FormulaCases();
  REQUIRE(cases.size() == 50);
  for (const oracle::FormulaCase& fc : cases) {
    const Lattice lat = oracle::FormulaLattice(fc);
    const auto history = ParseHistory(fc.history);
    const Score s = Consistency(lat, fc.hypothesis, history);
    CHECK_MESSAGE(s.precision == fc.precision, fc.name);
    CHECK_MESSAGE(s.recall == fc.recall, fc.name);
    const oracle::Counts n = oracle::CountRef(lat, fc.hypothesis, history);
    CHECK_MESSAGE(n.covered_valid * fc.precision.den ==
                      fc.precision.num * std::max<int64_t>(n.covered, 1),
                  fc.name);
  }
}

TEST_CASE("consistency worked examples") {
  const Lattice lat = MakeLattice({{0}, {0, 1}, {0, 1, 2}, {3}, {3, 4}}, 8);
  Score s = Consistency(lat, std::vector<size_t>{3}, ParseHistory("v3 v3 v4 v0 i4 i0 i1 i2"));
  CHECK(s.precision == R(3, 4));
  CHECK(s.recall == R(3, 4));
  s = Consistency(lat, std::vector<size_t>{4},
                  ParseHistory("v4 v4 i4 i4 v0 v0 v1 v1 v2 v3"));
  CHECK(s.precision == R(1, 2));
  CHECK(s.recall == R(1, 4));
  CHECK(s.precision.ToString() == "1/2");
  s = Consistency(lat, std::vector<size_t>{1}, ParseHistory("v1 v2 i0"));
  CHECK(s.precision == R(1, 1));
  CHECK(s.recall == R(1, 1));
  CHECK_THROWS_AS(Consistency(lat, std::vector<size_t>{0}, {}), Error);
}

TEST_CASE("crash records leave the scores unchanged") {
  const Lattice lat = MakeLattice({{0}, {0, 1}, {2}}, 4);
  const std::vector<size_t> h{0};
  auto history = ParseHistory("v0 i2 v1 i1");
  const Score before = Consistency(lat, h, history);
  for (const char* extra : {"c0", "t1", "s2", "c2"}) {
    auto more = history;
    more.push_back(ParseHistory(extra)[0]);
    CHECK(Consistency(lat, h, more) == before);
  }
}

TEST_CASE("acceptance thresholds") {
  LearnerConfig c;
  CHECK(c.p_threshold == 0.25);
  CHECK(c.r_threshold == 0.25);
  CHECK(Accept(Score{R(30, 100), R(26, 100)}, c));
  CHECK_FALSE(Accept(Score{R(24, 100), R(90, 100)}, c));
  CHECK_FALSE(Accept(Score{R(90, 100), R(24, 100)}, c));
  CHECK(Accept(Score{R(1, 4), R(1, 4)}, c));
  for (double t : {0.0, 0.5, 0.99, 1.0}) {
    c.p_threshold = c.r_threshold = t;
    CHECK(Accept(Score{R(1, 1), R(1, 1)}, c));
  }
}

TEST_CASE("scores stay in range and grow with covered valid records") {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::vector<size_t>> sets;
    for (int i = 0; i < 6; ++i) {
      std::vector<size_t> s;
      for (size_t p = 0; p < 4; ++p) {
        if (rng.Uniform(2)) s.push_back(p);
      }
      sets.push_back(s);
    }
    const Lattice lat = MakeLattice(sets, 4);
    std::vector<size_t> h{rng.Uniform(lat.size())};
    std::string text;
    for (int k = 1 + rng.Uniform(12); k > 0; --k) {
      text += std::string(1, "vvict"[rng.Uniform(5)]) + std::to_string(rng.Uniform(lat.size())) + " ";
    }
    auto history = ParseHistory(text);
    const Score s = Consistency(lat, h, history);
    for (const Rational& x : {s.precision, s.recall}) {
      CHECK(x >= R(0, 1));
      CHECK(x <= R(1, 1));
    }
    history.push_back(HistoryRecord{999, h[0], Polarity::kExpectValid, Phase::kInference,
                                    OutcomeKind::kValid});
    const Score t = Consistency(lat, h, history);
    CHECK(t.precision >= s.precision);
    bool had_valid = false;
    for (const auto& r : history) had_valid |= r.case_id != 999 && r.outcome == OutcomeKind::kValid;
    if (had_valid) CHECK(t.recall >= s.recall);
  }
}

TEST_CASE("hypothesis search") {
  const Lattice lat = MakeLattice({{0}, {1}, {2}, {3}, {4}, {5}, {0, 1}}, 8);
  LearnerConfig c;
  CHECK(ProposeHypothesis(lat, ParseHistory("v3 i1"), c).category_ids ==
        std::vector<size_t>{3});
  CHECK_THROWS_AS(ProposeHypothesis(lat, ParseHistory("i3 c1"), c), Error);

  // Six candidates, at most two disjuncts.
  c.max_disjuncts = 2;
  const auto history = ParseHistory("v0 v0 v1 v2 v2 v2 v3 i3 i3 v4 v5 i6 i6 v6");
  CHECK(ProposeHypothesis(lat, history, c).category_ids ==
        oracle::ExhaustiveHypothesis(lat, history, 2));
  CHECK(ProposeHypothesis(lat, history, c).category_ids == std::vector<size_t>{0, 2});
}

TEST_CASE("union-typed parameter yields a disjunction") {
  // 0 list of int, 1 list of str, 2 int64 tensor, 3 float tensor, 4 none.
  const Lattice lat = MakeLattice({{0, 1}, {0, 2}, {3, 4}, {3, 5}, {6}}, 8);
  const auto history = ParseHistory("v0 v2 v0 i1 i3 i4 v2 i1");
  const Hypothesis h = ProposeHypothesis(lat, history, LearnerConfig{});
  CHECK(h.category_ids == std::vector<size_t>{0, 2});
  CHECK(h.score.precision == R(1, 1));
  CHECK(h.score.recall == R(1, 1));
}

TEST_CASE("search agrees with exhaustive enumeration") {
  for (uint64_t seed = 1; seed <= 80; ++seed) {
    const oracle::SearchCheck r = oracle::CheckSearchTrial(seed);
    CHECK_MESSAGE(r.mismatch.empty(), r.mismatch);
  }
}

TEST_CASE("greedy search beyond the exact cap") {
  std::vector<std::vector<size_t>> sets;
  for (size_t i = 0; i < 20; ++i) sets.push_back({i});
  const Lattice lat = MakeLattice(sets, 20);
  std::string text;
  for (size_t i = 0; i < 20; ++i) {
    for (size_t k = 0; k <= i % 5; ++k) text += "v" + std::to_string(i) + " ";
    if (i % 3 == 0) text += "i" + std::to_string(i) + " ";
  }
  const auto history = ParseHistory(text);
  LearnerConfig c;
  c.max_disjuncts = 3;
  const Hypothesis h = ProposeHypothesis(lat, history, c);
  CHECK(h.category_ids.size() <= 3);
  CHECK(ProposeHypothesis(lat, history, c).category_ids == h.category_ids);
  // Categories 4, 14 and 19 hold five valid records each and no invalid.
  CHECK(h.category_ids == std::vector<size_t>{4, 14, 19});
}

TEST_CASE("fresh learner explores") {
  const Lattice lat = MakeLattice({{0}, {1}, {2}}, 4);
  Learner l(&lat, LearnerConfig{}, 1);
  CHECK(l.phase() == Phase::kRandom);
  const Query q = l.Next();
  CHECK(q.polarity == Polarity::kExploratory);
  CHECK(q.provenance == "random");
  l.Update(q, 0, OutcomeKind::kInvalid);
  CHECK(l.phase() == Phase::kRandom);
  l.Update(Query{1, Polarity::kExploratory, "random"}, 1, OutcomeKind::kValid);
  CHECK(l.phase() == Phase::kInference);
  REQUIRE(l.hypothesis());
  CHECK(l.hypothesis()->category_ids == std::vector<size_t>{1});
}

TEST_CASE("near-miss category is queried as expect-invalid") {
  // c0 = {1,2,3} is the disjunct; c1 = {1,2} misses exactly one property.
  const Lattice lat = MakeLattice({{1, 2, 3}, {1, 2}, {1}, {4}, {1, 2, 3, 5}}, 8);
  Learner l(&lat, LearnerConfig{}, 3);
  l.Update(Query{0, Polarity::kExploratory, "random"}, 0, OutcomeKind::kValid);
  REQUIRE(l.phase() == Phase::kInference);
  std::set<size_t> invalid_queries;
  for (const Query& q : l.pending()) {
    if (q.polarity == Polarity::kExpectInvalid) {
      invalid_queries.insert(q.category);
      // Every near-miss lacks at least one property of the disjunct.
      CHECK_FALSE(lat.category(0).closed.IsSubsetOf(lat.category(q.category).closed));
    }
  }
  CHECK(invalid_queries.count(1) == 1);
  // The random-phase query does not count as tested, so the member itself
  // comes back as expect-valid before its stronger category.
  std::vector<size_t> valid_queries;
  for (const Query& q : l.pending()) {
    if (q.polarity == Polarity::kExpectValid) valid_queries.push_back(q.category);
  }
  CHECK(l.pending().front().polarity == Polarity::kExpectValid);
  CHECK(valid_queries == std::vector<size_t>{0, 4});
  // Hand enumeration: c1 misses one property, c2 two, c3 three.
  std::vector<size_t> order;
  for (const Query& q : l.pending()) {
    if (q.polarity == Polarity::kExpectInvalid) order.push_back(q.category);
  }
  CHECK(order == std::vector<size_t>{1, 2, 3});
}

TEST_CASE("accepted hypothesis restricts queries to itself and stronger categories") {
  const Lattice lat = MakeLattice({{0}, {0, 1}, {0, 1, 2}, {0, 1, 3}, {4}, {0, 4}}, 8);
  Learner l(&lat, LearnerConfig{}, 9);
  auto oracle = [](size_t c) {
    return c >= 1 && c <= 3 ? OutcomeKind::kValid : OutcomeKind::kInvalid;
  };
  uint64_t id = 0;
  while (l.phase() != Phase::kValidGeneration && id < 300) {
    const Query q = l.Next();
    l.Update(q, id++, oracle(q.category));
  }
  REQUIRE(l.phase() == Phase::kValidGeneration);
  REQUIRE(l.hypothesis()->accepted);
  std::set<size_t> allowed;
  for (size_t m : l.hypothesis()->category_ids) {
    allowed.insert(m);
    for (size_t s : lat.Stronger(m)) allowed.insert(s);
  }
  CHECK(l.hypothesis()->category_ids == std::vector<size_t>{1});
  CHECK(allowed == std::set<size_t>{1, 2, 3});
  for (int i = 0; i < 50; ++i) {
    const Query q = l.Next();
    CHECK(allowed.count(q.category) == 1);
    CHECK(q.polarity == Polarity::kExpectValid);
    l.Update(q, id++, oracle(q.category));
    CHECK(l.phase() == Phase::kValidGeneration);
  }
}

TEST_CASE("phases never regress") {
  for (uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    std::vector<std::vector<size_t>> sets;
    for (int i = 0; i < 8; ++i) {
      std::vector<size_t> s;
      for (size_t p = 0; p < 5; ++p) {
        if (rng.Uniform(2)) s.push_back(p);
      }
      sets.push_back(s);
    }
    const Lattice lat = MakeLattice(sets, 5);
    std::vector<OutcomeKind> truth;
    for (size_t c = 0; c < lat.size(); ++c) {
      truth.push_back(static_cast<OutcomeKind>(rng.Uniform(4)));
    }
    LearnerConfig cfg;
    cfg.infer_budget = 1 + rng.Uniform(30);
    Learner l(&lat, cfg, seed);
    int last = 0;
    bool failed = false;
    for (uint64_t i = 0; i < 200; ++i) {
      const Query q = l.Next();
      l.Update(q, i, truth[q.category]);
      const int now = static_cast<int>(l.phase());
      CHECK(now >= last);
      last = now;
      if (failed) CHECK(l.inference_failed());
      failed = l.inference_failed();
      if (l.phase() == Phase::kValidGeneration) CHECK(l.hypothesis()->accepted);
      if (failed) CHECK(l.phase() == Phase::kInference);
    }
  }
}

TEST_CASE("no query repeats within the window while alternatives exist") {
  std::vector<std::vector<size_t>> sets;
  for (size_t i = 0; i < 12; ++i) sets.push_back({i});
  const Lattice lat = MakeLattice(sets, 12);
  LearnerConfig cfg;
  cfg.no_repeat_window = 8;
  Learner l(&lat, cfg, 21);
  std::vector<size_t> seen;
  for (uint64_t i = 0; i < 100; ++i) {
    const Query q = l.Next();
    for (size_t k = seen.size() >= 8 ? seen.size() - 8 : 0; k < seen.size(); ++k) {
      CHECK(seen[k] != q.category);
    }
    seen.push_back(q.category);
    l.Update(q, i, OutcomeKind::kInvalid);
  }
}

TEST_CASE("window larger than the pool draws from the older half") {
  const Lattice lat = MakeLattice({{0}, {1}, {2}, {3}, {4}}, 5);
  Learner l(&lat, LearnerConfig{}, 4);
  std::vector<size_t> seen;
  std::set<std::vector<size_t>> triples;
  for (uint64_t i = 0; i < 300; ++i) {
    const Query q = l.Next();
    // Older half of five is three: the last two issues are never repeated.
    for (size_t k = seen.size() >= 2 ? seen.size() - 2 : 0; k < seen.size(); ++k) {
      CHECK(seen[k] != q.category);
    }
    seen.push_back(q.category);
    if (seen.size() >= 3) triples.insert({seen.end() - 3, seen.end()});
    l.Update(q, i, OutcomeKind::kInvalid);
  }
  // Not a fixed rotation.
  CHECK(triples.size() > 5);
  std::map<size_t, int> count;
  for (size_t c : seen) ++count[c];
  CHECK(count.size() == 5);
  for (const auto& [c, n] : count) CHECK(n > 30);
}

TEST_CASE("inference budget exhaustion falls back to exploration") {
  const Lattice lat = MakeLattice({{0}, {0, 1}, {2}, {3}}, 4);
  LearnerConfig cfg;
  cfg.p_threshold = cfg.r_threshold = 1.0;
  cfg.infer_budget = 5;
  Learner l(&lat, cfg, 8);
  l.Update(Query{0, Polarity::kExploratory, "random"}, 0, OutcomeKind::kValid);
  for (uint64_t i = 1; i < 40 && !l.inference_failed(); ++i) {
    const Query q = l.Next();
    l.Update(q, i, q.category == 0 ? OutcomeKind::kValid : OutcomeKind::kInvalid);
  }
  REQUIRE(l.inference_failed());
  CHECK(l.inference_queries() == 5);
  for (int i = 0; i < 10; ++i) {
    const Query q = l.Next();
    CHECK(q.polarity == Polarity::kExploratory);
    CHECK(q.provenance == "inference-failed");
    l.Update(q, 100 + i, OutcomeKind::kInvalid);
  }
}

TEST_CASE("single-category database has no negative queries") {
  const Lattice lat = MakeLattice({{0}, {0}}, 1);
  Learner l(&lat, LearnerConfig{}, 1);
  l.Update(l.Next(), 0, OutcomeKind::kValid);
  CHECK(l.no_negative_queries());
}

TEST_CASE("checkpoint and restore reproduce the query stream") {
  const Lattice lat = MakeLattice({{0}, {0, 1}, {0, 1, 2}, {3}, {3, 4}, {5}, {0, 5}}, 8);
  auto oracle = [](size_t c) {
    return c == 1 || c == 2 || c == 4 ? OutcomeKind::kValid : OutcomeKind::kInvalid;
  };
  for (uint64_t cut : {3u, 9u, 17u}) {
    Learner a(&lat, LearnerConfig{}, 77);
    for (uint64_t i = 0; i < cut; ++i) {
      const Query q = a.Next();
      a.Update(q, i, oracle(q.category));
    }
    const nlohmann::json ckpt = nlohmann::json::parse(a.Checkpoint().dump());
    Learner b(&lat, LearnerConfig{}, 0);
    b.Restore(ckpt);
    CHECK(b.Checkpoint() == a.Checkpoint());
    for (uint64_t i = cut; i < cut + 30; ++i) {
      const Query qa = a.Next();
      const Query qb = b.Next();
      CHECK(qa == qb);
      a.Update(qa, i, oracle(qa.category));
      b.Update(qb, i, oracle(qb.category));
    }
  }
  Learner bad(&lat, LearnerConfig{}, 0);
  nlohmann::json j = Learner(&lat, LearnerConfig{}, 0).Checkpoint();
  j["phase"] = "sideways";
  CHECK_THROWS_AS(bad.Restore(j), Error);
  CHECK_THROWS_AS(bad.Restore(nlohmann::json::object()), Error);
}

TEST_CASE("same seed, same stream") {
  const Lattice lat = MakeLattice({{0}, {1}, {0, 1}, {2}, {2, 3}}, 4);
  auto run = [&](uint64_t seed) {
    Learner l(&lat, LearnerConfig{}, seed);
    std::vector<size_t> out;
    for (uint64_t i = 0; i < 60; ++i) {
      const Query q = l.Next();
      out.push_back(q.category);
      l.Update(q, i, q.category >= 2 ? OutcomeKind::kValid : OutcomeKind::kInvalid);
    }
    return out;
  };
  CHECK(run(5) == run(5));
  CHECK(run(5) != run(6));
}

TEST_CASE("learner config") {
  LearnerConfig c = LearnerConfig::FromJson({{"max_disjuncts", 2}, {"batch_cap", 4}});
  CHECK(c.max_disjuncts == 2);
  CHECK(c.exact_cap == 12);
  CHECK(c.infer_budget == 200);
  CHECK(c.no_repeat_window == 8);
  CHECK(LearnerConfig::FromJson(c.ToJson()).ToJson() == c.ToJson());
  CHECK_THROWS_AS(LearnerConfig::FromJson({{"p_threshold", 1.5}}), Error);
  CHECK_THROWS_AS(LearnerConfig::FromJson({{"max_disjuncts", 0}}), Error);
  CHECK_THROWS_AS(LearnerConfig::FromJson({{"max_disjuncts", "x"}}), Error);
}

}  // namespace
}  // namespace catfuzz
