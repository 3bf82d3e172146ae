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

#include <algorithm>
#include <cmath>
#include <limits>

#include "catfuzz/rng.h"
#include "catfuzz/suite.h"

namespace catfuzz {
namespace {

constexpr uint64_t kCorpusSeed = 20240417;
constexpr size_t kCorpusSize = 200;

Value IntList(std::initializer_list<int64_t> xs) {
  std::vector<Value> items;
  for (int64_t x : xs) items.push_back(Value::Int(x));
  return Value::Sequence(std::move(items));
}

Value Nested(std::initializer_list<std::initializer_list<int64_t>> rows) {
  std::vector<Value> items;
  for (const auto& r : rows) items.push_back(IntList(r));
  return Value::Sequence(std::move(items));
}

Value OneStep(const std::string& ctor, std::vector<Value> args) {
  RecipeStep step{ctor, {}};
  for (Value& a : args) step.args.push_back(RecipeArg::Literal(std::move(a)));
  return Value::FromRecipe(Recipe{{std::move(step)}, 0});
}

}  // namespace

std::vector<Value> SeedCorpus() {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<Value> c;
  auto add = [&c](int copies, const Value& v) {
    for (int i = 0; i < copies; ++i) c.push_back(v);
  };

  // Dense float tensors; the [2,2] positive ones dominate.
  add(6, Value::Tensor("float32", {2, 2}, {-1, 2, 3, -4}));
  add(4, Value::Tensor("float32", {2, 2}, {0, 1, 2, 3}));
  add(8, Value::Tensor("float32", {4}, {1, 2, 3, 4}));
  add(4, Value::Tensor("float32", {3}, {-1, 0, 2}));
  add(6, Value::Tensor("float32", {1, 2, 2, 1}, {1, 2, 3, 4}));
  add(2, Value::Tensor("float32", {2, 1, 1, 2}, {1, -2, 3, 4}));
  add(1, Value::Tensor("float32", {1, 2, 2, 1}, {1, nan, 3, 4}));
  add(3, Value::Tensor("float32", {2, 2, 2}, {1, 2, 3, 4, 1, 2, 3, 4}));
  add(3, Value::Tensor("float32", {3, 2}, {1, 2, 3, 4, 1, 2}));
  add(2, Value::Tensor("float32", {0}, {}));
  add(1, Value::Tensor("float32", {0, 3}, {}));
  add(1, Value::Tensor("float32", {2}, {nan, 1}));
  add(1, Value::Tensor("float32", {3}, {1, inf, 2}));
  add(1, Value::Tensor("float32", {}, {0}));
  add(1, Value::TensorStatsOnly("float32", {40, 40},
                                ValueStats{0.25, 4.0, false, false, true, true,
                                           1600}));

  // Integer and quantized tensors.
  add(6, Value::Tensor("int64", {3}, {0, 1, 2}));
  add(2, Value::Tensor("int64", {2}, {3, -1}));
  add(2, Value::Tensor("int32", {}, {3}));
  add(1, Value::Tensor("qint32", {2}, {1, 2}));

  // Plain scalars.
  for (int64_t i : {1, 1, 1, 1, 0, 0, 0, 2, 2, 2, 3, 3, 5, 7, 10, -1, 4}) {
    add(1, Value::Int(i));
  }
  for (double d : {0.5, 0.5, 0.5, -2.5, 3.0, 3.0, 0.0}) add(1, Value::Float(d));
  add(2, Value::Bool(true));
  add(2, Value::Bool(false));

  // Strings.
  add(1, Value::String(""));
  add(3, Value::String(","));
  add(3, Value::String("a,b,c"));
  add(2, Value::String("hello world"));
  add(1, Value::String(" "));

  // Lists.
  add(2, IntList({4}));
  add(3, IntList({2, 2}));
  add(2, IntList({1, 0}));
  add(2, IntList({0, 1, 2, 3}));
  add(1, IntList({3, -1}));
  add(2, IntList({}));
  add(1, IntList({1, 2, 3, 4}));
  add(1, IntList({2, 0, 1}));
  add(2, Value::Sequence({Value::Float(0.5), Value::Float(1.5)}));
  add(2, Nested({{1, 2}, {3, 4}}));
  add(2, Nested({{0, 0}, {1, 1}}));
  add(1, Nested({{0, -1}, {1, 0}}));

  // Constructor recipes.
  add(2, OneStep("ragged_constant", {Nested({{1, 1, 1, 1}, {2}})}));
  add(2, OneStep("tensor_shape", {IntList({4})}));
  add(2, OneStep("tensor_shape", {IntList({2, 2})}));
  add(1, OneStep("zeros", {IntList({1, 1, 1, 2})}));
  add(1, OneStep("zeros", {IntList({64, 64})}));
  add(2, OneStep("constant", {Value::Sequence({Value::Float(1.5),
                                               Value::Float(2.5)})}));
  add(2, OneStep("constant", {Nested({{1, 0}, {0, 1}})}));

  add(2, Value::None());
  add(1, Value::Map({{"a", Value::Int(1)}}));

  // The remainder are redundant positive [2,2] tensors.
  Rng rng(kCorpusSeed);
  const std::vector<std::vector<double>> patterns{
      {1, 2, 3, 4}, {0.5, 1, 1.5, 2}, {1, 1, 1, 1}};
  while (c.size() < kCorpusSize) {
    c.push_back(Value::Tensor("float32", {2, 2},
                              patterns[rng.Uniform(patterns.size())]));
  }
  for (size_t i = c.size(); i > 1; --i) {
    std::swap(c[i - 1], c[rng.Uniform(i)]);
  }
  return c;
}

}  // namespace catfuzz
