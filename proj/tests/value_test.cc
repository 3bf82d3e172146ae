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
#include <limits>

#include "catfuzz/error.h"
#include "catfuzz/rng.h"
#include "catfuzz/value.h"
#include "doctest.h"
#include "oracles.h"

namespace catfuzz {
namespace {

Value IntList(std::vector<int64_t> xs) {
  std::vector<Value> items;
  for (int64_t x : xs) items.push_back(Value::Int(x));
  return Value::Sequence(items);
}

Value RaggedSeed() {
  Value rows = Value::Sequence({IntList({1, 1, 1, 1}), IntList({2})});
  return Value::FromRecipe(
      Recipe{{RecipeStep{"ragged_constant", {RecipeArg::Literal(rows)}}}, 0});
}

TEST_CASE("none round-trips") {
  const std::string text = Encode(Value::None());
  CHECK(Decode(text).is_none());
  CHECK(Encode(Decode(text)) == text);
}

TEST_CASE("int64 tensor round-trips bit-exact") {
  const Value t = Value::Tensor("int64", {2}, {1, 2});
  const Value back = Decode(Encode(t));
  CHECK(back == t);
  CHECK(back.tensor().dtype == "int64");
  CHECK(back.tensor().shape == std::vector<int64_t>{2});
  CHECK(*back.tensor().data == std::vector<double>{1, 2});
}

TEST_CASE("recipe keeps its step order") {
  Recipe r;
  r.steps.push_back(RecipeStep{"constant", {RecipeArg::Literal(IntList({4}))}});
  r.steps.push_back(RecipeStep{"tensor_shape", {RecipeArg::Ref(0)}});
  r.result = 1;
  const Value v = Value::FromRecipe(r);
  const Value back = Decode(Encode(v));
  CHECK(back == v);
  REQUIRE(back.recipe().steps.size() == 2);
  CHECK(back.recipe().steps[0].ctor == "constant");
  CHECK(back.recipe().steps[1].ctor == "tensor_shape");
  CHECK(back.recipe().steps[1].args[0].ref == std::optional<size_t>(0));

  const Value ragged = RaggedSeed();
  CHECK(Decode(Encode(ragged)) == ragged);
  CHECK(Materialize(ragged).type_name == "RaggedTensor");
}

TEST_CASE("random values round-trip and encode canonically") {
  Rng rng(99);
  for (int i = 0; i < 2000; ++i) {
    const Value v = oracle::RandomValue(rng);
    const std::string text = Encode(v);
    const Value back = Decode(text);
    CHECK(Encode(back) == text);
    // NaN payloads compare unequal by value; the bytes are what matter.
    if (text.find("nan") == std::string::npos) CHECK(back == v);
  }
}

TEST_CASE("equal values encode to identical bytes") {
  std::map<std::string, Value> a{{"b", Value::Int(1)}, {"a", Value::Float(0.1)}};
  std::map<std::string, Value> b{{"a", Value::Float(0.1)}, {"b", Value::Int(1)}};
  CHECK(Encode(Value::Map(a)) == Encode(Value::Map(b)));
  CHECK(Encode(Value::Int(1)) != Encode(Value::Float(1.0)));
}

TEST_CASE("non-finite floats survive the text form") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(Decode(Encode(Value::Float(inf))).as_float() == inf);
  CHECK(Decode(Encode(Value::Float(-inf))).as_float() == -inf);
  CHECK(std::isnan(Decode(Encode(Value::Float(std::nan("")))).as_float()));
  CHECK(Decode(Encode(Value::Float(0.1))).as_float() == 0.1);
}

TEST_CASE("summaries") {
  ValueStats s = Summarize(Value::Tensor("float32", {3}, {1, 2, 3}));
  CHECK(*s.min == 1);
  CHECK(*s.max == 3);
  CHECK(s.all_positive);
  CHECK(s.element_count == 3);

  s = Summarize(Value::Tensor("float32", {0}, {}));
  CHECK(s.element_count == 0);
  CHECK(s.all_positive);
  CHECK_FALSE(s.min.has_value());
  CHECK_FALSE(s.max.has_value());

  s = Summarize(Value::Tensor("float32", {2}, {0, -1}));
  CHECK_FALSE(s.all_nonnegative);
  CHECK_FALSE(s.all_positive);

  s = Summarize(IntList({3, 1, 2}));
  CHECK(*s.min == 1);

  CHECK_THROWS_AS(Summarize(Value::Sequence({Value::String("x")})), Error);
}

TEST_CASE("summaries agree with a full scan") {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const int64_t n = static_cast<int64_t>(rng.Uniform(10001));
    std::vector<double> data;
    for (int64_t i = 0; i < n; ++i) {
      const uint64_t r = rng.Uniform(1000);
      data.push_back(r == 0 ? std::nan("") : r == 1 ? INFINITY : double(r) - 300.5);
    }
    const Value t = Value::Tensor("float64", {n}, data);
    CHECK(t.tensor().data.has_value() == (static_cast<size_t>(n) <= kDataCap));
    const ValueStats s = Summarize(t);
    double lo = INFINITY, hi = -INFINITY;
    bool nan = false, inf = false, pos = true, nonneg = true;
    for (double d : data) {
      if (std::isnan(d)) {
        nan = true;
        continue;
      }
      inf |= std::isinf(d);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
      pos &= d > 0;
      nonneg &= d >= 0;
    }
    CHECK(s.element_count == n);
    CHECK(s.has_nan == nan);
    CHECK(s.has_inf == inf);
    CHECK(s.all_positive == (pos && !nan));
    CHECK(s.all_nonnegative == (nonneg && !nan));
    if (!nan && n > 0) {
      CHECK(*s.min == lo);
      CHECK(*s.max == hi);
    }
  }
}

TEST_CASE("large tensors travel as stats") {
  std::vector<double> data(kDataCap + 1, 2.0);
  const Value t = Value::Tensor("float32", {static_cast<int64_t>(data.size())}, data);
  CHECK_FALSE(t.tensor().data.has_value());
  CHECK(t.tensor().stats.element_count == static_cast<int64_t>(data.size()));
  CHECK(Decode(Encode(t)) == t);
}

TEST_CASE("nesting depth is bounded") {
  Value v = Value::Int(1);
  CHECK_NOTHROW([&] {
    for (int i = 1; i < kMaxDepth; ++i) v = Value::Sequence({v});
    (void)Encode(v);
  }());
  CHECK_THROWS_AS([&] {
    Value w = v;
    w = Value::Sequence({w});
    (void)Decode(Encode(w));
  }(), Error);
}

TEST_CASE("tensor shape must match data") {
  CHECK_THROWS_AS(Value::Tensor("float32", {2, 2}, {1, 2, 3}), Error);
  CHECK_THROWS_AS(Decode("{\"kind\":\"tensor\""), Error);
}

}  // namespace
}  // namespace catfuzz
