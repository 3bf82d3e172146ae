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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <thread>

#include "catfuzz/error.h"
#include "catfuzz/lattice.h"
#include "catfuzz/suite.h"
#include "doctest.h"
#include "oracles.h"

namespace catfuzz {
namespace {

namespace fs = std::filesystem;

Catalog Handmade(std::vector<PropertyInstance> instances) {
  std::sort(instances.begin(), instances.end(), [](const auto& a, const auto& b) {
    return std::pair(a.template_id, ConstantKey(a.constants)) <
           std::pair(b.template_id, ConstantKey(b.constants));
  });
  return Catalog(std::move(instances));
}

PropertyInstance P(std::string id, std::vector<Value> constants = {}) {
  return PropertyInstance{std::move(id), std::move(constants), 0};
}

TEST_CASE("categories partition the seed corpus") {
  const std::vector<Value> corpus = SeedCorpus();
  const InputDatabase db =
      InputDatabase::Build(InstantiateCatalog(corpus, CatalogConfig::Default()), corpus);
  const Lattice& lat = db.lattice();
  std::vector<int> seen(corpus.size(), 0);
  size_t total = 0;
  for (const InputCategory& c : lat.categories()) {
    REQUIRE_FALSE(c.members.empty());
    total += c.members.size();
    for (size_t m : c.members) {
      ++seen[m];
      CHECK(db.input(m).fingerprint.bits == c.props);
      CHECK(lat.CategoryOfInput(m) == c.id);
    }
    CHECK(lat.Lookup(c.props) == std::optional<size_t>(c.id));
  }
  CHECK(total == corpus.size());
  for (int n : seen) CHECK(n == 1);
  CHECK(lat.size() >= 30);
}

// Oracle: group by fingerprint equality, by brute force.
TEST_CASE("five seeds with three fingerprints make three categories") {
  const std::vector<Value> seeds = {Value::Int(3), Value::String("a"), Value::Int(3),
                                    Value::String("a"), Value::None()};
  const Catalog catalog = InstantiateCatalog(seeds, CatalogConfig::Default());
  const InputDatabase db = InputDatabase::Build(catalog, seeds);
  std::vector<size_t> expect(seeds.size());
  size_t groups = 0;
  for (size_t i = 0; i < seeds.size(); ++i) {
    expect[i] = groups;
    for (size_t j = 0; j < i; ++j) {
      if (FingerprintOf(seeds[j], catalog).bits == FingerprintOf(seeds[i], catalog).bits) {
        expect[i] = expect[j];
        break;
      }
    }
    if (expect[i] == groups) ++groups;
  }
  CHECK(groups == 3);
  REQUIRE(db.lattice().size() == 3);
  for (size_t i = 0; i < seeds.size(); ++i) {
    CHECK(db.lattice().CategoryOfInput(i) == expect[i]);
  }
}

TEST_CASE("structurally different values with equal property-sets merge") {
  const Catalog catalog = Handmade({P("rank_eq", {Value::Int(1)}),
                                    P("type_eq", {Value::String("Tensor")}),
                                    P("all_gt", {Value::Int(0)})});
  const InputDatabase db = InputDatabase::Build(
      catalog, {Value::Tensor("float32", {2}, {1, 2}), Value::Tensor("int64", {3}, {5, 6, 7})});
  REQUIRE(db.lattice().size() == 1);
  CHECK(db.lattice().category(0).members == std::vector<size_t>{0, 1});
}

TEST_CASE("weaker by implication closure") {
  const Catalog catalog = Handmade({P("lt", {Value::Int(5)}), P("lt", {Value::Int(10)})});
  const size_t lt5 = *catalog.Find("lt", std::vector<Value>{Value::Int(5)});
  const size_t lt10 = *catalog.Find("lt", std::vector<Value>{Value::Int(10)});
  Bitset only5(catalog.size());
  only5.Set(lt5);
  const Bitset closed = catalog.Close(only5);
  CHECK(closed.Test(lt10));

  // Extensional check: on -20..20 every property the closure adds holds
  // wherever X < 5 holds, and {X<10} admits strictly more integers.
  size_t ext5 = 0, ext10 = 0;
  for (int x = -20; x <= 20; ++x) {
    const Materialized m = Materialize(Value::Int(x));
    const bool a = EvaluateInstance(catalog, lt5, m) == Tri::kTrue;
    const bool b = EvaluateInstance(catalog, lt10, m) == Tri::kTrue;
    CHECK(a == (x < 5));
    CHECK(b == (x < 10));
    for (size_t p : closed.Ones()) {
      if (a) CHECK(EvaluateInstance(catalog, p, m) == Tri::kTrue);
    }
    ext5 += a;
    ext10 += b;
  }
  CHECK(ext10 > ext5);

  const InputDatabase db = InputDatabase::Build(catalog, {Value::Int(3), Value::Int(7)});
  const size_t c3 = db.lattice().CategoryOfInput(0);
  const size_t c7 = db.lattice().CategoryOfInput(1);
  CHECK(db.lattice().IsWeaker(c7, c3));
  CHECK_FALSE(db.lattice().IsWeaker(c3, c7));
  CHECK_FALSE(db.lattice().IsWeaker(c3, c3));
  CHECK(db.lattice().Stronger(c7) == std::vector<size_t>{c3});
}

TEST_CASE("adding a positivity property makes a stronger category") {
  const Catalog catalog = Handmade({P("not_none"),
                                    P("dim_eq", {Value::Int(0), Value::Int(2)}),
                                    P("dim_eq", {Value::Int(1), Value::Int(2)}),
                                    P("all_gt", {Value::Int(0)})});
  const InputDatabase db = InputDatabase::Build(
      catalog, {Value::Tensor("float32", {2, 2}, {-1, 1, 2, 3}),
                Value::Tensor("float32", {2, 2}, {1, 2, 3, 4})});
  const Lattice& lat = db.lattice();
  REQUIRE(lat.size() == 2);
  CHECK(lat.category(0).props.Count() == 3);
  CHECK(lat.category(1).props.Count() == 4);
  CHECK(lat.IsWeaker(0, 1));
  CHECK_FALSE(lat.IsWeaker(1, 0));
  CHECK_FALSE(lat.IsWeaker(0, 0));
}

TEST_CASE("strength order matches the extensional oracle") {
  for (uint64_t seed = 1; seed <= 60; ++seed) {
    const oracle::LatticeCheck r = oracle::CheckLatticeTrial(seed);
    CHECK_MESSAGE(r.mismatches == 0, r.first_mismatch);
  }
}

TEST_CASE("is_weaker is a strict partial order") {
  for (uint64_t seed = 100; seed < 130; ++seed) {
    const oracle::UniverseTrial t = oracle::MakeUniverseTrial(seed);
    const InputDatabase db = InputDatabase::Build(t.catalog, t.corpus);
    const Lattice& lat = db.lattice();
    const size_t n = lat.size();
    for (size_t a = 0; a < n; ++a) {
      CHECK_FALSE(lat.IsWeaker(a, a));
      for (size_t b = 0; b < n; ++b) {
        if (lat.IsWeaker(a, b)) CHECK_FALSE(lat.IsWeaker(b, a));
        for (size_t c = 0; c < n; ++c) {
          if (lat.IsWeaker(a, b) && lat.IsWeaker(b, c)) CHECK(lat.IsWeaker(a, c));
        }
      }
    }
  }
}

TEST_CASE("stronger sets are ordered by size then id") {
  const std::vector<Value> corpus = SeedCorpus();
  const InputDatabase db =
      InputDatabase::Build(InstantiateCatalog(corpus, CatalogConfig::Default()), corpus);
  const Lattice& lat = db.lattice();
  for (size_t c = 0; c < lat.size(); ++c) {
    std::vector<size_t> expect;
    for (size_t d = 0; d < lat.size(); ++d) {
      if (lat.IsWeaker(c, d)) expect.push_back(d);
    }
    std::sort(expect.begin(), expect.end(), [&](size_t x, size_t y) {
      const size_t nx = lat.category(x).props.Count(), ny = lat.category(y).props.Count();
      return nx != ny ? nx < ny : x < y;
    });
    CHECK(lat.Stronger(c) == expect);
  }
}

TEST_CASE("large lattices compute the order on demand") {
  // 5100 distinct sets over 13 properties.
  std::vector<std::vector<size_t>> sets;
  for (uint32_t mask = 0; sets.size() < kPrecomputeOrderLimit + 100; ++mask) {
    std::vector<size_t> s;
    for (size_t b = 0; b < 13; ++b) {
      if (mask & (1u << b)) s.push_back(b);
    }
    sets.push_back(s);
  }
  const Lattice lat = oracle::MakeLattice(sets, 13);
  REQUIRE(lat.size() == sets.size());
  std::vector<std::vector<size_t>> got(4);
  std::vector<std::thread> threads;
  for (size_t t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] { got[t] = lat.Stronger(1 + t % 2); });
  }
  for (auto& th : threads) th.join();
  for (size_t t = 0; t < 4; ++t) {
    const size_t c = 1 + t % 2;
    size_t expect = 0;
    for (size_t d = 0; d < lat.size(); ++d) {
      const Bitset& a = lat.category(c).closed;
      const Bitset& b = lat.category(d).closed;
      expect += a.IsSubsetOf(b) && !(a == b);
    }
    CHECK(got[t].size() == expect);
  }
}

TEST_CASE("sampling") {
  const Lattice single = oracle::MakeLattice({{0}, {1}}, 2);
  CHECK(single.SampleInput(0, 42) == 0);
  CHECK(single.SampleInput(1, 7) == 1);

  const Lattice lat = oracle::MakeLattice({{0}, {1}, {0}, {0}, {0}}, 2);
  REQUIRE(lat.category(0).members.size() == 4);
  CHECK(lat.SampleInput(0, 1234) == lat.SampleInput(0, 1234));

  const int kDraws = 10000;
  std::map<size_t, int> freq;
  for (int s = 0; s < kDraws; ++s) ++freq[lat.SampleInput(0, s)];
  const double p = 0.25;
  const double se = std::sqrt(kDraws * p * (1 - p));
  double chi2 = 0;
  for (size_t m : lat.category(0).members) {
    CHECK(std::fabs(freq[m] - kDraws * p) <= 5 * se);
    chi2 += std::pow(freq[m] - kDraws * p, 2) / (kDraws * p);
  }
  CHECK(freq.size() == 4);
  // 3 degrees of freedom; 16.27 is the 0.001 critical value.
  CHECK(chi2 < 16.27);
}

TEST_CASE("database persists and reloads") {
  const std::vector<Value> corpus = SeedCorpus();
  const InputDatabase db =
      InputDatabase::Build(InstantiateCatalog(corpus, CatalogConfig::Default()), corpus);
  const fs::path dir = fs::temp_directory_path() / "catfuzz_lattice_test_db";
  fs::remove_all(dir);
  db.Save(dir.string());
  for (const char* f : {"catalog.json", "inputs.jsonl", "categories.txt", "order.txt"}) {
    CHECK(fs::exists(dir / f));
  }
  const InputDatabase back = InputDatabase::Load(dir.string());
  CHECK(back.catalog().digest() == db.catalog().digest());
  REQUIRE(back.lattice().size() == db.lattice().size());
  for (size_t c = 0; c < db.lattice().size(); ++c) {
    CHECK(back.lattice().category(c).props == db.lattice().category(c).props);
    CHECK(back.lattice().category(c).members == db.lattice().category(c).members);
    CHECK(back.lattice().Stronger(c) == db.lattice().Stronger(c));
  }
  for (size_t i = 0; i < corpus.size(); ++i) {
    CHECK(back.input(i).value == db.input(i).value);
    CHECK(back.input(i).fingerprint == db.input(i).fingerprint);
  }
  // Saving again is byte-identical.
  const fs::path dir2 = dir.string() + "_2";
  fs::remove_all(dir2);
  back.Save(dir2.string());
  for (const char* f : {"catalog.json", "inputs.jsonl", "categories.txt", "order.txt"}) {
    std::ifstream a(dir / f), b(dir2 / f);
    std::string sa((std::istreambuf_iterator<char>(a)), {});
    std::string sb((std::istreambuf_iterator<char>(b)), {});
    CHECK_MESSAGE(sa == sb, f);
  }
  // A tampered categories file is rejected.
  {
    std::ofstream out(dir / "categories.txt", std::ios::app);
    out << "999\t00\t0\n";
  }
  CHECK_THROWS_AS(InputDatabase::Load(dir.string()), Error);
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST_CASE("fingerprints from another catalog are rejected") {
  const std::vector<Value> a = {Value::Int(3)};
  const std::vector<Value> b = {Value::String("x"), Value::Int(9)};
  const Catalog ca = InstantiateCatalog(a, CatalogConfig::Default());
  const Catalog cb = InstantiateCatalog(b, CatalogConfig::Default());
  try {
    InputDatabase::FromFingerprints(ca, a, {FingerprintOf(a[0], cb)});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMixedCatalog);
  }
}

}  // namespace
}  // namespace catfuzz
