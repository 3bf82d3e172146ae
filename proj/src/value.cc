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

#include "catfuzz/value.h"

#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>
#include <variant>

#include "catfuzz/error.h"

namespace catfuzz {

using nlohmann::json;

struct Value::Rep {
  std::variant<std::monostate, bool, int64_t, double, std::string,
               std::vector<Value>, std::map<std::string, Value>, TensorData,
               std::shared_ptr<const Recipe>>
      data;
  int depth = 1;
};

namespace {

bool SameFloat(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return std::bit_cast<uint64_t>(a) == std::bit_cast<uint64_t>(b);
}

bool SameOptFloat(const std::optional<double>& a,
                  const std::optional<double>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a.has_value() || SameFloat(*a, *b);
}

void CheckDepth(int depth) {
  if (depth > kMaxDepth) {
    throw Error(ErrorCode::kDepthExceeded,
                "value nesting depth " + std::to_string(depth) + " > " +
                    std::to_string(kMaxDepth));
  }
}

int64_t ShapeProduct(const std::vector<int64_t>& shape) {
  int64_t n = 1;
  for (int64_t d : shape) {
    if (d < 0) {
      throw Error(ErrorCode::kInvalidValue, "negative tensor extent");
    }
    if (d != 0 && n > std::numeric_limits<int64_t>::max() / d) {
      throw Error(ErrorCode::kInvalidValue, "tensor element count overflows");
    }
    n *= d;
  }
  return n;
}

bool IsIntegralDtype(std::string_view dtype) {
  return dtype.starts_with("int") || dtype.starts_with("uint") ||
         dtype.starts_with("qint") || dtype.starts_with("quint") ||
         dtype == "bool";
}

json FloatToJson(double d) {
  if (std::isnan(d)) return "nan";
  if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
  return d;
}

double FloatFromJson(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw Error(ErrorCode::kParse, "expected a float, got " + j.dump());
}

json ElementToJson(double d, bool integral) {
  constexpr double kExactIntLimit = 9007199254740992.0;  // 2^53
  const bool negative_zero = d == 0.0 && std::signbit(d);
  if (integral && std::isfinite(d) && std::trunc(d) == d &&
      std::fabs(d) <= kExactIntLimit && !negative_zero) {
    return static_cast<int64_t>(d);
  }
  return FloatToJson(d);
}

json StatsToJson(const ValueStats& s) {
  json j = json::object();
  j["element_count"] = s.element_count;
  if (s.min) j["min"] = FloatToJson(*s.min);
  if (s.max) j["max"] = FloatToJson(*s.max);
  j["has_nan"] = s.has_nan;
  j["has_inf"] = s.has_inf;
  j["all_positive"] = s.all_positive;
  j["all_nonnegative"] = s.all_nonnegative;
  return j;
}

const json& Field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) {
    throw Error(ErrorCode::kParse, std::string("missing field '") + name + "'");
  }
  return *it;
}

ValueStats StatsFromJson(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, "stats must be an object");
  ValueStats s;
  s.element_count = Field(j, "element_count").get<int64_t>();
  if (j.contains("min")) s.min = FloatFromJson(j.at("min"));
  if (j.contains("max")) s.max = FloatFromJson(j.at("max"));
  s.has_nan = Field(j, "has_nan").get<bool>();
  s.has_inf = Field(j, "has_inf").get<bool>();
  s.all_positive = Field(j, "all_positive").get<bool>();
  s.all_nonnegative = Field(j, "all_nonnegative").get<bool>();
  if (s.all_positive && !s.all_nonnegative) {
    throw Error(ErrorCode::kInvalidValue, "all_positive without all_nonnegative");
  }
  return s;
}

Value FromJsonAt(const json& j, int depth);

RecipeArg ArgFromJson(const json& j, int depth) {
  if (j.is_object() && j.contains("ref") && !j.contains("kind")) {
    return RecipeArg::Ref(j.at("ref").get<size_t>());
  }
  return RecipeArg::Literal(FromJsonAt(j, depth));
}

Value FromJsonAt(const json& j, int depth) {
  CheckDepth(depth);
  if (!j.is_object()) throw Error(ErrorCode::kParse, "value must be an object");
  const std::string& kind = Field(j, "kind").get_ref<const std::string&>();
  try {
    if (kind == "none") return Value::None();
    if (kind == "bool") return Value::Bool(Field(j, "data").get<bool>());
    if (kind == "int") {
      const json& d = Field(j, "data");
      if (!d.is_number_integer()) {
        throw Error(ErrorCode::kParse, "int data must be an integer");
      }
      return Value::Int(d.get<int64_t>());
    }
    if (kind == "float") return Value::Float(FloatFromJson(Field(j, "data")));
    if (kind == "string") {
      return Value::String(Field(j, "data").get<std::string>());
    }
    if (kind == "sequence") {
      std::vector<Value> items;
      for (const json& e : Field(j, "data")) {
        items.push_back(FromJsonAt(e, depth + 1));
      }
      return Value::Sequence(std::move(items));
    }
    if (kind == "map") {
      std::map<std::string, Value> entries;
      for (const auto& [k, e] : Field(j, "data").items()) {
        entries.emplace(k, FromJsonAt(e, depth + 1));
      }
      return Value::Map(std::move(entries));
    }
    if (kind == "tensor") {
      std::string dtype = Field(j, "dtype").get<std::string>();
      std::vector<int64_t> shape;
      for (const json& e : Field(j, "shape")) {
        if (!e.is_number_integer()) {
          throw Error(ErrorCode::kInvalidValue,
                      "non-finite or non-integer shape extent");
        }
        shape.push_back(e.get<int64_t>());
      }
      if (j.contains("data")) {
        std::vector<double> data;
        for (const json& e : j.at("data")) data.push_back(FloatFromJson(e));
        return Value::Tensor(std::move(dtype), std::move(shape),
                             std::move(data));
      }
      return Value::TensorStatsOnly(std::move(dtype), std::move(shape),
                                    StatsFromJson(Field(j, "stats")));
    }
    if (kind == "recipe") {
      Recipe r;
      for (const json& step : Field(j, "steps")) {
        RecipeStep s;
        s.ctor = Field(step, "ctor").get<std::string>();
        for (const json& a : Field(step, "args")) {
          s.args.push_back(ArgFromJson(a, depth + 1));
        }
        r.steps.push_back(std::move(s));
      }
      r.result = Field(j, "result").get<size_t>();
      return Value::FromRecipe(std::move(r));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
  throw Error(ErrorCode::kParse, "unknown value kind '" + kind + "'");
}

std::optional<std::vector<int64_t>> InferShape(const Value& v) {
  if (v.is_number()) return std::vector<int64_t>{};
  if (v.kind() != ValueKind::kSequence) return std::nullopt;
  const auto& items = v.items();
  if (items.empty()) return std::vector<int64_t>{0};
  std::optional<std::vector<int64_t>> inner;
  for (const Value& item : items) {
    auto s = InferShape(item);
    if (!s) return std::nullopt;
    if (inner && *inner != *s) return std::nullopt;
    inner = std::move(s);
  }
  std::vector<int64_t> shape{static_cast<int64_t>(items.size())};
  shape.insert(shape.end(), inner->begin(), inner->end());
  return shape;
}

void CollectNumbers(const Value& v, std::vector<double>& out, bool& ok) {
  if (!ok) return;
  if (v.is_number()) {
    out.push_back(v.number());
  } else if (v.kind() == ValueKind::kSequence) {
    for (const Value& item : v.items()) CollectNumbers(item, out, ok);
  } else {
    ok = false;
  }
}

bool AllIntegers(const Value& v) {
  if (v.kind() == ValueKind::kInt) return true;
  if (v.kind() == ValueKind::kSequence) {
    for (const Value& item : v.items()) {
      if (!AllIntegers(item)) return false;
    }
    return true;
  }
  return false;
}

}  // namespace

std::string_view KindName(ValueKind kind) {
  switch (kind) {
    case ValueKind::kNone: return "none";
    case ValueKind::kBool: return "bool";
    case ValueKind::kInt: return "int";
    case ValueKind::kFloat: return "float";
    case ValueKind::kString: return "string";
    case ValueKind::kSequence: return "sequence";
    case ValueKind::kMap: return "map";
    case ValueKind::kTensor: return "tensor";
    case ValueKind::kRecipe: return "recipe";
  }
  return "?";
}

ValueStats ValueStats::Of(std::span<const double> elements) {
  ValueStats s;
  s.element_count = static_cast<int64_t>(elements.size());
  for (double x : elements) {
    if (std::isnan(x)) {
      s.has_nan = true;
      s.all_positive = false;
      s.all_nonnegative = false;
      continue;
    }
    if (std::isinf(x)) s.has_inf = true;
    if (!(x > 0)) s.all_positive = false;
    if (!(x >= 0)) s.all_nonnegative = false;
    if (!s.min || x < *s.min) s.min = x;
    if (!s.max || x > *s.max) s.max = x;
  }
  return s;
}

bool operator==(const ValueStats& a, const ValueStats& b) {
  return SameOptFloat(a.min, b.min) && SameOptFloat(a.max, b.max) &&
         a.has_nan == b.has_nan && a.has_inf == b.has_inf &&
         a.all_positive == b.all_positive &&
         a.all_nonnegative == b.all_nonnegative &&
         a.element_count == b.element_count;
}

Value::Value() : rep_(std::make_shared<const Rep>()) {}

Value Value::Bool(bool b) {
  return Value(std::make_shared<const Rep>(Rep{b, 1}));
}
Value Value::Int(int64_t i) {
  return Value(std::make_shared<const Rep>(Rep{i, 1}));
}
Value Value::Float(double d) {
  return Value(std::make_shared<const Rep>(Rep{d, 1}));
}
Value Value::String(std::string s) {
  return Value(std::make_shared<const Rep>(Rep{std::move(s), 1}));
}

Value Value::Sequence(std::vector<Value> items) {
  int depth = 1;
  for (const Value& v : items) depth = std::max(depth, v.Depth() + 1);
  CheckDepth(depth);
  return Value(std::make_shared<const Rep>(Rep{std::move(items), depth}));
}

Value Value::Map(std::map<std::string, Value> entries) {
  int depth = 1;
  for (const auto& [k, v] : entries) depth = std::max(depth, v.Depth() + 1);
  CheckDepth(depth);
  return Value(std::make_shared<const Rep>(Rep{std::move(entries), depth}));
}

Value Value::Tensor(std::string dtype, std::vector<int64_t> shape,
                    std::vector<double> data) {
  const int64_t n = ShapeProduct(shape);
  if (n != static_cast<int64_t>(data.size())) {
    throw Error(ErrorCode::kInvalidValue,
                "tensor data length " + std::to_string(data.size()) +
                    " does not match shape product " + std::to_string(n));
  }
  TensorData t;
  t.dtype = std::move(dtype);
  t.shape = std::move(shape);
  t.stats = ValueStats::Of(data);
  if (data.size() <= kDataCap) t.data = std::move(data);
  return Value(std::make_shared<const Rep>(Rep{std::move(t), 1}));
}

Value Value::TensorStatsOnly(std::string dtype, std::vector<int64_t> shape,
                             ValueStats stats) {
  const int64_t n = ShapeProduct(shape);
  if (stats.element_count != n) {
    throw Error(ErrorCode::kInvalidValue,
                "tensor stats element_count does not match shape");
  }
  TensorData t;
  t.dtype = std::move(dtype);
  t.shape = std::move(shape);
  t.stats = stats;
  return Value(std::make_shared<const Rep>(Rep{std::move(t), 1}));
}

Value Value::FromRecipe(Recipe recipe) {
  if (recipe.steps.empty() || recipe.result >= recipe.steps.size()) {
    throw Error(ErrorCode::kInvalidValue, "recipe result index out of range");
  }
  int depth = 1;
  for (size_t i = 0; i < recipe.steps.size(); ++i) {
    for (const RecipeArg& a : recipe.steps[i].args) {
      if (a.ref) {
        if (*a.ref >= i) {
          throw Error(ErrorCode::kInvalidValue,
                      "recipe step reference must point backward");
        }
      } else {
        depth = std::max(depth, a.value.Depth() + 1);
      }
    }
  }
  CheckDepth(depth);
  return Value(std::make_shared<const Rep>(
      Rep{std::make_shared<const Recipe>(std::move(recipe)), depth}));
}

ValueKind Value::kind() const {
  return static_cast<ValueKind>(rep_->data.index());
}

namespace {
[[noreturn]] void WrongKind(ValueKind have, const char* want) {
  throw Error(ErrorCode::kUnsupportedValue,
              std::string("expected ") + want + ", have " +
                  std::string(KindName(have)));
}
}  // namespace

bool Value::as_bool() const {
  if (auto* p = std::get_if<bool>(&rep_->data)) return *p;
  WrongKind(kind(), "bool");
}
int64_t Value::as_int() const {
  if (auto* p = std::get_if<int64_t>(&rep_->data)) return *p;
  WrongKind(kind(), "int");
}
double Value::as_float() const {
  if (auto* p = std::get_if<double>(&rep_->data)) return *p;
  WrongKind(kind(), "float");
}
const std::string& Value::as_string() const {
  if (auto* p = std::get_if<std::string>(&rep_->data)) return *p;
  WrongKind(kind(), "string");
}
const std::vector<Value>& Value::items() const {
  if (auto* p = std::get_if<std::vector<Value>>(&rep_->data)) return *p;
  WrongKind(kind(), "sequence");
}
const std::map<std::string, Value>& Value::entries() const {
  if (auto* p = std::get_if<std::map<std::string, Value>>(&rep_->data)) {
    return *p;
  }
  WrongKind(kind(), "map");
}
const TensorData& Value::tensor() const {
  if (auto* p = std::get_if<TensorData>(&rep_->data)) return *p;
  WrongKind(kind(), "tensor");
}
const Recipe& Value::recipe() const {
  if (auto* p = std::get_if<std::shared_ptr<const Recipe>>(&rep_->data)) {
    return **p;
  }
  WrongKind(kind(), "recipe");
}

bool Value::is_number() const {
  const ValueKind k = kind();
  return k == ValueKind::kInt || k == ValueKind::kFloat;
}

double Value::number() const {
  if (kind() == ValueKind::kInt) return static_cast<double>(as_int());
  return as_float();
}

int Value::Depth() const { return rep_->depth; }

bool operator==(const Value& a, const Value& b) {
  if (a.rep_ == b.rep_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ValueKind::kNone: return true;
    case ValueKind::kBool: return a.as_bool() == b.as_bool();
    case ValueKind::kInt: return a.as_int() == b.as_int();
    case ValueKind::kFloat: return SameFloat(a.as_float(), b.as_float());
    case ValueKind::kString: return a.as_string() == b.as_string();
    case ValueKind::kSequence: return a.items() == b.items();
    case ValueKind::kMap: return a.entries() == b.entries();
    case ValueKind::kTensor: {
      const TensorData& x = a.tensor();
      const TensorData& y = b.tensor();
      if (x.dtype != y.dtype || x.shape != y.shape || !(x.stats == y.stats)) {
        return false;
      }
      if (x.data.has_value() != y.data.has_value()) return false;
      if (!x.data) return true;
      if (x.data->size() != y.data->size()) return false;
      for (size_t i = 0; i < x.data->size(); ++i) {
        if (!SameFloat((*x.data)[i], (*y.data)[i])) return false;
      }
      return true;
    }
    case ValueKind::kRecipe: return a.recipe() == b.recipe();
  }
  return false;
}

json ToJson(const Value& v) {
  json j = json::object();
  j["kind"] = std::string(KindName(v.kind()));
  switch (v.kind()) {
    case ValueKind::kNone:
      break;
    case ValueKind::kBool:
      j["data"] = v.as_bool();
      break;
    case ValueKind::kInt:
      j["data"] = v.as_int();
      break;
    case ValueKind::kFloat:
      j["data"] = FloatToJson(v.as_float());
      break;
    case ValueKind::kString:
      j["data"] = v.as_string();
      break;
    case ValueKind::kSequence: {
      json arr = json::array();
      for (const Value& item : v.items()) arr.push_back(ToJson(item));
      j["data"] = std::move(arr);
      break;
    }
    case ValueKind::kMap: {
      json obj = json::object();
      for (const auto& [k, item] : v.entries()) obj[k] = ToJson(item);
      j["data"] = std::move(obj);
      break;
    }
    case ValueKind::kTensor: {
      const TensorData& t = v.tensor();
      j["dtype"] = t.dtype;
      j["shape"] = t.shape;
      if (t.data) {
        const bool integral = IsIntegralDtype(t.dtype);
        json arr = json::array();
        for (double d : *t.data) arr.push_back(ElementToJson(d, integral));
        j["data"] = std::move(arr);
      } else {
        j["stats"] = StatsToJson(t.stats);
      }
      break;
    }
    case ValueKind::kRecipe: {
      const Recipe& r = v.recipe();
      json steps = json::array();
      for (const RecipeStep& s : r.steps) {
        json args = json::array();
        for (const RecipeArg& a : s.args) {
          if (a.ref) {
            args.push_back(json{{"ref", *a.ref}});
          } else {
            args.push_back(ToJson(a.value));
          }
        }
        steps.push_back(json{{"ctor", s.ctor}, {"args", std::move(args)}});
      }
      j["steps"] = std::move(steps);
      j["result"] = r.result;
      break;
    }
  }
  return j;
}

Value FromJson(const json& j) { return FromJsonAt(j, 1); }

std::string Encode(const Value& v) { return ToJson(v).dump(); }

Value Decode(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
  return FromJson(j);
}

std::optional<std::vector<int64_t>> ShapeOf(const Value& v) {
  if (v.kind() == ValueKind::kTensor) return v.tensor().shape;
  return InferShape(v);
}

std::optional<std::vector<double>> NumericElements(const Value& v) {
  if (v.kind() == ValueKind::kTensor) {
    const TensorData& t = v.tensor();
    if (!t.data) return std::nullopt;
    return *t.data;
  }
  if (v.is_number()) return std::vector<double>{v.number()};
  if (v.kind() != ValueKind::kSequence) return std::nullopt;
  std::vector<double> out;
  bool ok = true;
  CollectNumbers(v, out, ok);
  if (!ok) return std::nullopt;
  return out;
}

ValueStats Summarize(const Value& v) {
  if (v.kind() == ValueKind::kTensor && !v.tensor().data) {
    return v.tensor().stats;
  }
  if (v.kind() != ValueKind::kTensor && v.kind() != ValueKind::kSequence) {
    throw Error(ErrorCode::kUnsupportedValue,
                "summarize needs a tensor or numeric sequence");
  }
  auto elements = NumericElements(v);
  if (!elements) {
    throw Error(ErrorCode::kUnsupportedValue, "non-numeric elements");
  }
  return ValueStats::Of(*elements);
}

namespace {

[[noreturn]] void SetupFailure(const std::string& ctor, const std::string& why) {
  throw Error(ErrorCode::kInvalidValue, ctor + ": " + why);
}

std::string DtypeArg(const std::vector<Value>& args, size_t i,
                     const std::string& ctor, std::string fallback) {
  if (args.size() <= i) return fallback;
  if (args[i].kind() != ValueKind::kString) {
    SetupFailure(ctor, "dtype argument must be a string");
  }
  return args[i].as_string();
}

Materialized Construct(const std::string& ctor,
                       const std::vector<Value>& args) {
  if (ctor == "constant") {
    if (args.empty() || args.size() > 2) SetupFailure(ctor, "takes 1-2 args");
    const Value& src = args[0];
    if (src.kind() == ValueKind::kTensor) {
      const TensorData& t = src.tensor();
      const std::string dtype = DtypeArg(args, 1, ctor, t.dtype);
      if (t.data) return {"Tensor", Value::Tensor(dtype, t.shape, *t.data)};
      return {"Tensor", Value::TensorStatsOnly(dtype, t.shape, t.stats)};
    }
    auto shape = InferShape(src);
    if (!shape) SetupFailure(ctor, "data is not a rectangular numeric nest");
    auto elements = NumericElements(src);
    const std::string dtype =
        DtypeArg(args, 1, ctor, AllIntegers(src) ? "int64" : "float32");
    return {"Tensor", Value::Tensor(dtype, *shape, std::move(*elements))};
  }
  if (ctor == "ragged_constant") {
    if (args.size() != 1) SetupFailure(ctor, "takes 1 arg");
    const Value& src = args[0];
    if (src.kind() != ValueKind::kSequence) {
      SetupFailure(ctor, "expects a nested sequence");
    }
    if (!NumericElements(src)) SetupFailure(ctor, "non-numeric leaves");
    return {"RaggedTensor", src};
  }
  if (ctor == "tensor_shape") {
    if (args.size() != 1) SetupFailure(ctor, "takes 1 arg");
    const Value& src = args[0];
    if (src.kind() != ValueKind::kSequence) {
      SetupFailure(ctor, "expects a sequence of ints");
    }
    for (const Value& d : src.items()) {
      if (d.kind() != ValueKind::kInt || d.as_int() < 0) {
        SetupFailure(ctor, "dimensions must be non-negative ints");
      }
    }
    return {"TensorShape", src};
  }
  if (ctor == "zeros") {
    if (args.empty() || args.size() > 2) SetupFailure(ctor, "takes 1-2 args");
    if (args[0].kind() != ValueKind::kSequence) {
      SetupFailure(ctor, "shape must be a sequence");
    }
    std::vector<int64_t> shape;
    for (const Value& d : args[0].items()) {
      if (d.kind() != ValueKind::kInt || d.as_int() < 0) {
        SetupFailure(ctor, "dimensions must be non-negative ints");
      }
      shape.push_back(d.as_int());
    }
    const std::string dtype = DtypeArg(args, 1, ctor, "float32");
    const int64_t n = ShapeProduct(shape);
    if (n > static_cast<int64_t>(kDataCap)) {
      ValueStats s;
      s.element_count = n;
      s.min = 0.0;
      s.max = 0.0;
      s.all_positive = false;
      return {"Tensor", Value::TensorStatsOnly(dtype, shape, s)};
    }
    return {"Tensor", Value::Tensor(dtype, shape,
                                    std::vector<double>(n, 0.0))};
  }
  SetupFailure(ctor, "unknown constructor");
}

}  // namespace

bool IsKnownConstructor(std::string_view name) {
  return name == "constant" || name == "ragged_constant" ||
         name == "tensor_shape" || name == "zeros";
}

Materialized Materialize(const Value& v) {
  switch (v.kind()) {
    case ValueKind::kNone: return {"NoneType", v};
    case ValueKind::kBool: return {"bool", v};
    case ValueKind::kInt: return {"int", v};
    case ValueKind::kFloat: return {"float", v};
    case ValueKind::kString: return {"str", v};
    case ValueKind::kSequence: return {"list", v};
    case ValueKind::kMap: return {"dict", v};
    case ValueKind::kTensor: return {"Tensor", v};
    case ValueKind::kRecipe: break;
  }
  const Recipe& r = v.recipe();
  std::vector<Materialized> results;
  results.reserve(r.steps.size());
  for (const RecipeStep& step : r.steps) {
    std::vector<Value> args;
    for (const RecipeArg& a : step.args) {
      args.push_back(a.ref ? results[*a.ref].view : a.value);
    }
    results.push_back(Construct(step.ctor, args));
  }
  return results[r.result];
}

std::string TypeName(const Value& v) {
  if (v.kind() != ValueKind::kRecipe) return Materialize(v).type_name;
  try {
    return Materialize(v).type_name;
  } catch (const Error&) {
    return v.recipe().steps[v.recipe().result].ctor;
  }
}

std::string Describe(const Value& v) {
  std::ostringstream out;
  switch (v.kind()) {
    case ValueKind::kNone: return "None";
    case ValueKind::kBool: return v.as_bool() ? "True" : "False";
    case ValueKind::kInt: return std::to_string(v.as_int());
    case ValueKind::kFloat: return json(FloatToJson(v.as_float())).dump();
    case ValueKind::kString: return json(v.as_string()).dump();
    case ValueKind::kSequence:
      out << "list[len=" << v.items().size() << "]";
      return out.str();
    case ValueKind::kMap:
      out << "dict[len=" << v.entries().size() << "]";
      return out.str();
    case ValueKind::kTensor: {
      const TensorData& t = v.tensor();
      out << "Tensor<" << t.dtype << ">" << json(t.shape).dump();
      return out.str();
    }
    case ValueKind::kRecipe: {
      const Recipe& r = v.recipe();
      out << "recipe<";
      for (size_t i = 0; i < r.steps.size(); ++i) {
        out << (i ? "," : "") << r.steps[i].ctor;
      }
      out << ">";
      return out.str();
    }
  }
  return "?";
}

}  // namespace catfuzz
