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

#ifndef CATFUZZ_VALUE_H_
#define CATFUZZ_VALUE_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace catfuzz {

// Tensors with more elements than this travel as dtype + shape + stats.
inline constexpr size_t kDataCap = 1024;
// Deepest nesting of sequences, maps and recipe arguments accepted anywhere.
inline constexpr int kMaxDepth = 16;

enum class ValueKind {
  kNone,
  kBool,
  kInt,
  kFloat,
  kString,
  kSequence,
  kMap,
  kTensor,
  kRecipe,
};

std::string_view KindName(ValueKind kind);

// Aggregate facts about a numeric element collection. min/max are absent
// for empty collections and are computed over the non-NaN elements.
struct ValueStats {
  std::optional<double> min;
  std::optional<double> max;
  bool has_nan = false;
  bool has_inf = false;
  bool all_positive = true;
  bool all_nonnegative = true;
  int64_t element_count = 0;

  static ValueStats Of(std::span<const double> elements);
  friend bool operator==(const ValueStats&, const ValueStats&);
};

struct Recipe;

struct TensorData {
  std::string dtype;
  std::vector<int64_t> shape;
  std::optional<std::vector<double>> data;
  ValueStats stats;
};

// Immutable, cheaply copyable value tree. Copies share storage.
class Value {
 public:
  Value();  // none

  static Value None() { return Value(); }
  static Value Bool(bool b);
  static Value Int(int64_t i);
  static Value Float(double d);
  static Value String(std::string s);
  static Value Sequence(std::vector<Value> items);
  static Value Map(std::map<std::string, Value> entries);
  // Drops `data` (keeping stats) when it holds more than kDataCap elements.
  static Value Tensor(std::string dtype, std::vector<int64_t> shape,
                      std::vector<double> data);
  static Value TensorStatsOnly(std::string dtype, std::vector<int64_t> shape,
                               ValueStats stats);
  static Value FromRecipe(Recipe recipe);

  ValueKind kind() const;
  bool is_none() const { return kind() == ValueKind::kNone; }

  bool as_bool() const;
  int64_t as_int() const;
  double as_float() const;
  const std::string& as_string() const;
  const std::vector<Value>& items() const;
  const std::map<std::string, Value>& entries() const;
  const TensorData& tensor() const;
  const Recipe& recipe() const;

  // True for int and float (bool is not numeric here).
  bool is_number() const;
  double number() const;

  // Nesting depth; scalars and tensors are depth 1.
  int Depth() const;

  friend bool operator==(const Value& a, const Value& b);
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

  struct Rep;

 private:
  explicit Value(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  std::shared_ptr<const Rep> rep_;
};

// One argument of a recipe step: either a literal Value or the result of an
// earlier step.
struct RecipeArg {
  std::optional<size_t> ref;
  Value value;

  static RecipeArg Literal(Value v) { return {std::nullopt, std::move(v)}; }
  static RecipeArg Ref(size_t step) { return {step, Value()}; }
  friend bool operator==(const RecipeArg&, const RecipeArg&) = default;
};

struct RecipeStep {
  std::string ctor;
  std::vector<RecipeArg> args;
  friend bool operator==(const RecipeStep&, const RecipeStep&) = default;
};

// A recorded constructor sequence that rebuilds an opaque host object.
struct Recipe {
  std::vector<RecipeStep> steps;
  size_t result = 0;
  friend bool operator==(const Recipe&, const Recipe&) = default;
};

// Canonical serialization. Keys are sorted, floats use shortest round-trip
// text, and non-finite floats are the strings "nan", "inf", "-inf".
nlohmann::json ToJson(const Value& v);
Value FromJson(const nlohmann::json& j);
std::string Encode(const Value& v);
Value Decode(std::string_view text);

// Exact aggregate statistics of a tensor with data or a (possibly nested)
// numeric sequence. Throws kUnsupportedValue otherwise.
ValueStats Summarize(const Value& v);

// Numeric leaves of a tensor with data or of a nested numeric sequence.
std::optional<std::vector<double>> NumericElements(const Value& v);

// Array shape of a tensor, a number (rank 0), or a rectangular nest of
// numeric sequences. Ragged or non-numeric nests have no shape.
std::optional<std::vector<int64_t>> ShapeOf(const Value& v);

// What a value looks like to predicates and targets: the host-level type
// name plus a plain (recipe-free) view of its contents.
struct Materialized {
  std::string type_name;
  Value view;
};

// Evaluates recipes through the built-in constructor table (constant,
// ragged_constant, tensor_shape, zeros). Non-recipe values materialize to
// themselves. A constructor failure throws kInvalidValue.
Materialized Materialize(const Value& v);
std::string TypeName(const Value& v);
bool IsKnownConstructor(std::string_view name);

// Short human-readable rendering, used in reports and diagnostics.
std::string Describe(const Value& v);

}  // namespace catfuzz

#endif  // CATFUZZ_VALUE_H_
