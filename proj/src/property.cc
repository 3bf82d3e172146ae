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

#include "catfuzz/property.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "catfuzz/error.h"

namespace catfuzz {

using nlohmann::json;

namespace {

Tri FromBool(bool b) { return b ? Tri::kTrue : Tri::kFalse; }

// Numeric scalar view: int/float, or a rank-0 tensor with data.
std::optional<double> ScalarOf(const Value& x) {
  if (x.is_number()) return x.number();
  if (x.kind() == ValueKind::kTensor) {
    const TensorData& t = x.tensor();
    if (t.shape.empty() && t.data) return (*t.data)[0];
  }
  return std::nullopt;
}

struct Elements {
  bool applicable = false;
  std::optional<std::vector<double>> data;
  ValueStats stats;
};

Elements ElementsOf(const Value& x) {
  Elements e;
  if (x.kind() == ValueKind::kTensor) {
    const TensorData& t = x.tensor();
    e.applicable = true;
    e.data = t.data;
    e.stats = t.stats;
  } else if (x.kind() == ValueKind::kSequence) {
    e.data = NumericElements(x);
    if (e.data) {
      e.applicable = true;
      e.stats = ValueStats::Of(*e.data);
    }
  }
  return e;
}

std::optional<int64_t> LengthOf(const Value& x) {
  switch (x.kind()) {
    case ValueKind::kSequence: return static_cast<int64_t>(x.items().size());
    case ValueKind::kString: return static_cast<int64_t>(x.as_string().size());
    case ValueKind::kMap: return static_cast<int64_t>(x.entries().size());
    case ValueKind::kTensor: {
      const auto& shape = x.tensor().shape;
      if (shape.empty()) return std::nullopt;
      return shape[0];
    }
    default: return std::nullopt;
  }
}

std::optional<int64_t> SizeOf(const Value& x) {
  auto shape = ShapeOf(x);
  if (!shape) return std::nullopt;
  int64_t n = 1;
  for (int64_t d : *shape) n *= d;
  return n;
}

std::optional<std::string> DtypeOf(const Value& x) {
  if (x.kind() != ValueKind::kTensor) return std::nullopt;
  return x.tensor().dtype;
}

const std::string& StringConst(std::span<const Value> c, size_t i) {
  return c[i].as_string();
}

// Comparison of an optional measure against a numeric constant.
template <typename T, typename Cmp>
Tri Measure(const std::optional<T>& m, const Value& c, Cmp cmp) {
  if (!m) return Tri::kFalse;
  return FromBool(cmp(static_cast<double>(*m), c.number()));
}

// all(X op C): decided from data when present, else from stats.
template <typename Cmp>
Tri AllElements(const Value& x, double c, Cmp cmp, bool use_max) {
  Elements e = ElementsOf(x);
  if (!e.applicable) return Tri::kFalse;
  if (e.data) {
    return FromBool(std::all_of(e.data->begin(), e.data->end(),
                                [&](double v) { return cmp(v, c); }));
  }
  if (e.stats.element_count == 0) return Tri::kTrue;
  if (e.stats.has_nan) return Tri::kFalse;
  const std::optional<double>& bound = use_max ? e.stats.max : e.stats.min;
  if (!bound) return Tri::kFalse;
  return FromBool(cmp(*bound, c));
}

std::vector<PropertyTemplate> MakeBuiltins() {
  using C = std::span<const Value>;
  const std::vector<std::string> kTypes{"types"};
  const std::vector<std::string> kDtypes{"dtypes"};
  const std::vector<std::string> kNumbers{"numbers"};
  const std::vector<std::string> kLengths{"lengths"};
  const std::vector<std::string> kRanks{"ranks"};
  const std::vector<std::string> kExtents{"extents"};
  const std::vector<std::string> kAxes{"axes"};
  const std::vector<std::string> kPositions{"positions"};
  const auto TS = PropertyGroup::kTypeStructure;
  const auto VA = PropertyGroup::kValue;
  const auto SH = PropertyGroup::kShape;
  const auto Up = Monotone::kIncreasing;
  const auto Down = Monotone::kDecreasing;
  const auto None = Monotone::kNone;

  std::vector<PropertyTemplate> t;
  auto add = [&](std::string id, PropertyGroup g, int arity,
                 std::string pattern,
                 std::vector<std::vector<std::string>> sources, Monotone m,
                 Evaluator f) {
    t.push_back(PropertyTemplate{std::move(id), g, arity, std::move(pattern),
                                 std::move(sources), m, std::move(f)});
  };

  // Type / structure.
  add("is_none", TS, 0, "X is None", {}, None,
      [](const Materialized& x, C) { return FromBool(x.type_name == "NoneType"); });
  add("not_none", TS, 0, "X is not None", {}, None,
      [](const Materialized& x, C) { return FromBool(x.type_name != "NoneType"); });
  add("type_eq", TS, 1, "type(X) == {0}", {kTypes}, None,
      [](const Materialized& x, C c) {
        return FromBool(x.type_name == StringConst(c, 0));
      });
  add("dtype_eq", TS, 1, "X.dtype == {0}", {kDtypes}, None,
      [](const Materialized& x, C c) {
        auto d = DtypeOf(x.view);
        return FromBool(d && *d == StringConst(c, 0));
      });
  add("dtype_float", TS, 0, "X.dtype is floating", {}, None,
      [](const Materialized& x, C) {
        auto d = DtypeOf(x.view);
        return FromBool(d && (d->starts_with("float") ||
                              d->starts_with("bfloat") || *d == "half" ||
                              *d == "double"));
      });
  add("dtype_int", TS, 0, "X.dtype is integer", {}, None,
      [](const Materialized& x, C) {
        auto d = DtypeOf(x.view);
        return FromBool(d && (d->starts_with("int") || d->starts_with("uint")));
      });
  add("dtype_quantized", TS, 0, "X.dtype is quantized", {}, None,
      [](const Materialized& x, C) {
        auto d = DtypeOf(x.view);
        return FromBool(d && (d->starts_with("qint") || d->starts_with("quint")));
      });
  add("elem_type_eq", TS, 1, "all(type(x) == {0} for x in X)", {kTypes}, None,
      [](const Materialized& x, C c) {
        if (x.view.kind() != ValueKind::kSequence) return Tri::kFalse;
        for (const Value& item : x.view.items()) {
          if (TypeName(item) != StringConst(c, 0)) return Tri::kFalse;
        }
        return Tri::kTrue;
      });
  add("is_nested", TS, 0, "X contains sequences", {}, None,
      [](const Materialized& x, C) {
        if (x.view.kind() != ValueKind::kSequence) return Tri::kFalse;
        for (const Value& item : x.view.items()) {
          if (item.kind() == ValueKind::kSequence) return Tri::kTrue;
        }
        return Tri::kFalse;
      });
  add("is_ragged", TS, 0, "X has rows of unequal length", {}, None,
      [](const Materialized& x, C) {
        if (x.view.kind() != ValueKind::kSequence) return Tri::kFalse;
        const auto& items = x.view.items();
        std::optional<size_t> len;
        for (const Value& item : items) {
          if (item.kind() != ValueKind::kSequence) return Tri::kFalse;
          if (len && *len != item.items().size()) return Tri::kTrue;
          len = item.items().size();
        }
        return Tri::kFalse;
      });
  add("is_numeric", TS, 0, "X is a number", {}, None,
      [](const Materialized& x, C) { return FromBool(x.view.is_number()); });

  // Value.
  add("lt", VA, 1, "X < {0}", {kNumbers}, Up, [](const Materialized& x, C c) {
    return Measure(ScalarOf(x.view), c[0], std::less<double>());
  });
  add("le", VA, 1, "X <= {0}", {kNumbers}, Up, [](const Materialized& x, C c) {
    return Measure(ScalarOf(x.view), c[0], std::less_equal<double>());
  });
  add("gt", VA, 1, "X > {0}", {kNumbers}, Down, [](const Materialized& x, C c) {
    return Measure(ScalarOf(x.view), c[0], std::greater<double>());
  });
  add("ge", VA, 1, "X >= {0}", {kNumbers}, Down, [](const Materialized& x, C c) {
    return Measure(ScalarOf(x.view), c[0], std::greater_equal<double>());
  });
  add("eq", VA, 1, "X == {0}", {kNumbers}, None, [](const Materialized& x, C c) {
    return Measure(ScalarOf(x.view), c[0], std::equal_to<double>());
  });
  add("all_lt", VA, 1, "all(X < {0})", {kNumbers}, Up,
      [](const Materialized& x, C c) {
        return AllElements(x.view, c[0].number(), std::less<double>(), true);
      });
  add("all_le", VA, 1, "all(X <= {0})", {kNumbers}, Up,
      [](const Materialized& x, C c) {
        return AllElements(x.view, c[0].number(), std::less_equal<double>(),
                           true);
      });
  add("all_gt", VA, 1, "all(X > {0})", {kNumbers}, Down,
      [](const Materialized& x, C c) {
        return AllElements(x.view, c[0].number(), std::greater<double>(), false);
      });
  add("all_ge", VA, 1, "all(X >= {0})", {kNumbers}, Down,
      [](const Materialized& x, C c) {
        return AllElements(x.view, c[0].number(), std::greater_equal<double>(),
                           false);
      });
  add("any_eq", VA, 1, "any(X == {0})", {kNumbers}, None,
      [](const Materialized& x, C c) {
        Elements e = ElementsOf(x.view);
        if (!e.applicable) return Tri::kFalse;
        if (!e.data) return Tri::kUnknown;
        const double v = c[0].number();
        return FromBool(std::find(e.data->begin(), e.data->end(), v) !=
                        e.data->end());
      });
  add("elem_eq", VA, 2, "X[{0}] == {1}", {kPositions, kNumbers}, None,
      [](const Materialized& x, C c) {
        Elements e = ElementsOf(x.view);
        if (!e.applicable) return Tri::kFalse;
        if (!e.data) return Tri::kUnknown;
        const int64_t i = c[0].as_int();
        if (i < 0 || i >= static_cast<int64_t>(e.data->size())) {
          return Tri::kFalse;
        }
        return FromBool((*e.data)[i] == c[1].number());
      });
  add("has_nan", VA, 0, "any(isnan(X))", {}, None,
      [](const Materialized& x, C) {
        Elements e = ElementsOf(x.view);
        return FromBool(e.applicable && e.stats.has_nan);
      });
  add("has_inf", VA, 0, "any(isinf(X))", {}, None,
      [](const Materialized& x, C) {
        Elements e = ElementsOf(x.view);
        return FromBool(e.applicable && e.stats.has_inf);
      });
  add("all_integral", VA, 0, "all(X == floor(X))", {}, None,
      [](const Materialized& x, C) {
        Elements e = ElementsOf(x.view);
        if (!e.applicable) return Tri::kFalse;
        if (!e.data) return Tri::kUnknown;
        return FromBool(std::all_of(e.data->begin(), e.data->end(), [](double v) {
          return std::isfinite(v) && std::trunc(v) == v;
        }));
      });

  // Shape.
  add("len_lt", SH, 1, "len(X) < {0}", {kLengths}, Up,
      [](const Materialized& x, C c) {
        return Measure(LengthOf(x.view), c[0], std::less<double>());
      });
  add("len_eq", SH, 1, "len(X) == {0}", {kLengths}, None,
      [](const Materialized& x, C c) {
        return Measure(LengthOf(x.view), c[0], std::equal_to<double>());
      });
  add("len_gt", SH, 1, "len(X) > {0}", {kLengths}, Down,
      [](const Materialized& x, C c) {
        return Measure(LengthOf(x.view), c[0], std::greater<double>());
      });
  add("size_lt", SH, 1, "X.size < {0}", {kLengths}, Up,
      [](const Materialized& x, C c) {
        return Measure(SizeOf(x.view), c[0], std::less<double>());
      });
  add("size_eq", SH, 1, "X.size == {0}", {kLengths}, None,
      [](const Materialized& x, C c) {
        return Measure(SizeOf(x.view), c[0], std::equal_to<double>());
      });
  add("size_gt", SH, 1, "X.size > {0}", {kLengths}, Down,
      [](const Materialized& x, C c) {
        return Measure(SizeOf(x.view), c[0], std::greater<double>());
      });
  auto rank = [](const Value& v) -> std::optional<int64_t> {
    auto s = ShapeOf(v);
    if (!s) return std::nullopt;
    return static_cast<int64_t>(s->size());
  };
  add("rank_lt", SH, 1, "X.shape.rank < {0}", {kRanks}, Up,
      [rank](const Materialized& x, C c) {
        return Measure(rank(x.view), c[0], std::less<double>());
      });
  add("rank_eq", SH, 1, "X.shape.rank == {0}", {kRanks}, None,
      [rank](const Materialized& x, C c) {
        return Measure(rank(x.view), c[0], std::equal_to<double>());
      });
  add("rank_gt", SH, 1, "X.shape.rank > {0}", {kRanks}, Down,
      [rank](const Materialized& x, C c) {
        return Measure(rank(x.view), c[0], std::greater<double>());
      });
  auto dim = [](const Value& v, const Value& axis) -> std::optional<int64_t> {
    auto s = ShapeOf(v);
    const int64_t a = axis.as_int();
    if (!s || a < 0 || a >= static_cast<int64_t>(s->size())) {
      return std::nullopt;
    }
    return (*s)[a];
  };
  add("dim_eq", SH, 2, "X.shape[{0}] == {1}", {kAxes, kExtents}, None,
      [dim](const Materialized& x, C c) {
        return Measure(dim(x.view, c[0]), c[1], std::equal_to<double>());
      });
  add("dim_gt", SH, 2, "X.shape[{0}] > {1}", {kAxes, kExtents}, Down,
      [dim](const Materialized& x, C c) {
        return Measure(dim(x.view, c[0]), c[1], std::greater<double>());
      });
  add("has_zero_dim", SH, 0, "0 in X.shape", {}, None,
      [](const Materialized& x, C) {
        auto s = ShapeOf(x.view);
        return FromBool(s && std::find(s->begin(), s->end(), 0) != s->end());
      });
  add("is_square", SH, 0, "X.shape[-1] == X.shape[-2]", {}, None,
      [](const Materialized& x, C) {
        auto s = ShapeOf(x.view);
        return FromBool(s && s->size() >= 2 &&
                        (*s)[s->size() - 1] == (*s)[s->size() - 2]);
      });
  return t;
}

// -- Constant pool ---------------------------------------------------------

const std::vector<double> kCanonical{-1, 0, 1, 2};
constexpr int64_t kMaxDerivedIndex = 4;

Value NumberConstant(double d) {
  if (std::isfinite(d) && std::trunc(d) == d && std::fabs(d) < 9.0e15) {
    return Value::Int(static_cast<int64_t>(d));
  }
  return Value::Float(d);
}

struct Observations {
  std::map<double, int64_t> numbers, lengths, ranks, extents;
  std::map<std::string, int64_t> types, dtypes;
  int64_t max_rank = 0;
  int64_t max_elements = 0;

  void Add(const Value& v) {
    Materialized m;
    try {
      m = Materialize(v);
    } catch (const Error&) {
      ++types[TypeName(v)];
      return;
    }
    const Value& x = m.view;
    ++types[m.type_name];
    if (x.kind() == ValueKind::kSequence) {
      for (const Value& item : x.items()) ++types[TypeName(item)];
    }
    if (x.is_number() && std::isfinite(x.number())) ++numbers[x.number()];
    if (x.kind() == ValueKind::kTensor) {
      const TensorData& t = x.tensor();
      ++dtypes[t.dtype];
      if (t.stats.min && std::isfinite(*t.stats.min)) ++numbers[*t.stats.min];
      if (t.stats.max && std::isfinite(*t.stats.max) &&
          t.stats.max != t.stats.min) {
        ++numbers[*t.stats.max];
      }
    }
    if (x.kind() == ValueKind::kSequence) {
      auto elements = NumericElements(x);
      if (elements && elements->size() <= 16) {
        for (double e : *elements) {
          if (std::isfinite(e)) ++numbers[e];
        }
      }
    }
    if (auto len = LengthOf(x)) {
      ++lengths[static_cast<double>(*len)];
      max_elements = std::max(max_elements, *len);
    }
    if (auto shape = ShapeOf(x)) {
      ++ranks[static_cast<double>(shape->size())];
      max_rank = std::max<int64_t>(max_rank, shape->size());
      int64_t size = 1;
      for (int64_t d : *shape) {
        ++extents[static_cast<double>(d)];
        size *= d;
      }
      if (auto len = LengthOf(x); !len || *len != size) {
        ++lengths[static_cast<double>(size)];
      }
      max_elements = std::max(max_elements, size);
    }
  }
};

template <typename K>
std::vector<K> ByFrequency(const std::map<K, int64_t>& counts) {
  std::vector<std::pair<K, int64_t>> v(counts.begin(), counts.end());
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;
  });
  std::vector<K> out;
  for (const auto& [k, n] : v) out.push_back(k);
  return out;
}

class ConstantPool {
 public:
  ConstantPool(const Observations& obs, size_t cap) {
    std::map<double, int64_t> all;
    for (const auto* m : {&obs.numbers, &obs.lengths, &obs.ranks, &obs.extents}) {
      for (const auto& [k, n] : *m) all[k] += n;
    }
    std::vector<double> ranked = ByFrequency(all);
    if (ranked.size() > cap) ranked.resize(cap);
    for (size_t i = 0; i < ranked.size(); ++i) rank_[ranked[i]] = i;

    numeric_["numbers"] = Select(obs.numbers);
    numeric_["lengths"] = Select(obs.lengths);
    numeric_["ranks"] = Select(obs.ranks);
    numeric_["extents"] = Select(obs.extents);
    numeric_["canonical"] = kCanonical;
    for (int64_t i = 0; i < std::min(obs.max_rank, kMaxDerivedIndex); ++i) {
      numeric_["axes"].push_back(static_cast<double>(i));
    }
    for (int64_t i = 0; i < std::min(obs.max_elements, kMaxDerivedIndex); ++i) {
      numeric_["positions"].push_back(static_cast<double>(i));
    }
    strings_["types"] = ByFrequency(obs.types);
    strings_["dtypes"] = ByFrequency(obs.dtypes);
    for (auto& [name, v] : strings_) {
      if (v.size() > cap) v.resize(cap);
    }
  }

  // Constants of one position, canonical first, then by frequency.
  std::vector<Value> Resolve(const std::vector<std::string>& sources) const {
    std::vector<Value> out;
    std::vector<double> seen_numbers;
    std::vector<std::string> seen_strings;
    for (const std::string& s : sources) {
      if (auto it = numeric_.find(s); it != numeric_.end()) {
        for (double d : it->second) {
          if (std::find(seen_numbers.begin(), seen_numbers.end(), d) ==
              seen_numbers.end()) {
            seen_numbers.push_back(d);
          }
        }
      } else if (auto st = strings_.find(s); st != strings_.end()) {
        for (const std::string& str : st->second) {
          if (std::find(seen_strings.begin(), seen_strings.end(), str) ==
              seen_strings.end()) {
            seen_strings.push_back(str);
          }
        }
      }
    }
    for (double d : seen_numbers) out.push_back(NumberConstant(d));
    for (const std::string& str : seen_strings) out.push_back(Value::String(str));
    return out;
  }

 private:
  // canonical ∪ (observed ∩ kept), ordered canonical-first then by rank.
  std::vector<double> Select(const std::map<double, int64_t>& observed) const {
    std::vector<double> out = kCanonical;
    std::vector<double> kept;
    for (const auto& [k, n] : observed) {
      if (rank_.contains(k) &&
          std::find(kCanonical.begin(), kCanonical.end(), k) == kCanonical.end()) {
        kept.push_back(k);
      }
    }
    std::sort(kept.begin(), kept.end(),
              [&](double a, double b) { return rank_.at(a) < rank_.at(b); });
    out.insert(out.end(), kept.begin(), kept.end());
    return out;
  }

  std::map<double, size_t> rank_;
  std::map<std::string, std::vector<double>> numeric_;
  std::map<std::string, std::vector<std::string>> strings_;
};

uint64_t Fnv1a(std::string_view s, uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string JoinKey(std::string_view id, std::string_view key) {
  std::string out(id);
  out.push_back('\x1f');
  out.append(key);
  return out;
}

}  // namespace

std::string_view GroupName(PropertyGroup group) {
  switch (group) {
    case PropertyGroup::kTypeStructure: return "type-structure";
    case PropertyGroup::kValue: return "value";
    case PropertyGroup::kShape: return "shape";
  }
  return "?";
}

std::optional<PropertyGroup> ParseGroup(std::string_view name) {
  if (name == "type-structure") return PropertyGroup::kTypeStructure;
  if (name == "value") return PropertyGroup::kValue;
  if (name == "shape") return PropertyGroup::kShape;
  return std::nullopt;
}

const std::vector<PropertyTemplate>& BuiltinTemplates() {
  static const std::vector<PropertyTemplate> kTemplates = MakeBuiltins();
  return kTemplates;
}

const PropertyTemplate* FindTemplate(std::string_view id) {
  for (const PropertyTemplate& t : BuiltinTemplates()) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

const std::vector<std::string>& KnownSources() {
  static const std::vector<std::string> kSources{
      "canonical", "numbers", "lengths", "ranks", "extents",
      "axes",      "positions", "types", "dtypes"};
  return kSources;
}

// -- CatalogConfig ---------------------------------------------------------

CatalogConfig CatalogConfig::Default() {
  CatalogConfig c;
  for (const PropertyTemplate& t : BuiltinTemplates()) {
    c.templates.push_back(Entry{t.id, t.group, t.sources, true});
  }
  return c;
}

void CatalogConfig::Validate() const {
  auto fail = [](const std::string& why) {
    throw Error(ErrorCode::kInvalidCatalogConfig, why);
  };
  if (pool_cap == 0) fail("pool_cap must be positive");
  bool groups[3] = {false, false, false};
  size_t enabled = 0;
  for (const Entry& e : templates) {
    const PropertyTemplate* t = FindTemplate(e.id);
    if (!t) fail("unknown template '" + e.id + "'");
    if (t->group != e.group) fail("template '" + e.id + "' has wrong group");
    if (static_cast<int>(e.sources.size()) != t->arity) {
      fail("template '" + e.id + "' needs " + std::to_string(t->arity) +
           " constant source lists");
    }
    for (const auto& list : e.sources) {
      if (list.empty()) fail("template '" + e.id + "' has an empty source list");
      for (const std::string& s : list) {
        const auto& known = KnownSources();
        if (std::find(known.begin(), known.end(), s) == known.end()) {
          fail("unknown constant source '" + s + "'");
        }
      }
    }
    if (e.enabled) {
      groups[static_cast<int>(e.group)] = true;
      ++enabled;
    }
  }
  for (int g = 0; g < 3; ++g) {
    if (!groups[g]) {
      fail("no enabled template in group " +
           std::string(GroupName(static_cast<PropertyGroup>(g))));
    }
  }
  if (max_properties < enabled) {
    fail("max_properties is smaller than the number of enabled templates");
  }
}

CatalogConfig CatalogConfig::FromJson(const json& j) {
  CatalogConfig c = Default();
  try {
    if (!j.is_object()) {
      throw Error(ErrorCode::kInvalidCatalogConfig, "config must be an object");
    }
    if (j.contains("pool_cap")) c.pool_cap = j.at("pool_cap").get<size_t>();
    if (j.contains("max_properties")) {
      c.max_properties = j.at("max_properties").get<size_t>();
    }
    if (j.contains("templates")) {
      for (const json& e : j.at("templates")) {
        const std::string id = e.at("id").get<std::string>();
        auto it = std::find_if(c.templates.begin(), c.templates.end(),
                               [&](const Entry& x) { return x.id == id; });
        if (it == c.templates.end()) {
          throw Error(ErrorCode::kInvalidCatalogConfig,
                      "unknown template '" + id + "'");
        }
        if (e.contains("group")) {
          auto g = ParseGroup(e.at("group").get<std::string>());
          if (!g) {
            throw Error(ErrorCode::kInvalidCatalogConfig,
                        "unknown group for '" + id + "'");
          }
          it->group = *g;
        }
        if (e.contains("sources")) {
          it->sources =
              e.at("sources").get<std::vector<std::vector<std::string>>>();
        }
        if (e.contains("enabled")) it->enabled = e.at("enabled").get<bool>();
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidCatalogConfig, e.what());
  }
  c.Validate();
  return c;
}

CatalogConfig CatalogConfig::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open catalog config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidCatalogConfig, e.what());
  }
  return FromJson(j);
}

json CatalogConfig::ToJson() const {
  json t = json::array();
  for (const Entry& e : templates) {
    t.push_back(json{{"id", e.id},
                     {"group", std::string(GroupName(e.group))},
                     {"sources", e.sources},
                     {"enabled", e.enabled}});
  }
  return json{{"pool_cap", pool_cap},
              {"max_properties", max_properties},
              {"templates", std::move(t)}};
}

// -- Catalog ---------------------------------------------------------------

std::string ConstantKey(std::span<const Value> constants) {
  std::string key;
  for (size_t i = 0; i < constants.size(); ++i) {
    if (i) key.push_back('|');
    key += Encode(constants[i]);
  }
  return key;
}

Catalog::Catalog(std::vector<PropertyInstance> instances)
    : instances_(std::move(instances)) {
  uint64_t digest = 0xcbf29ce484222325ull;
  std::unordered_map<std::string, std::vector<size_t>> families;
  for (size_t i = 0; i < instances_.size(); ++i) {
    PropertyInstance& p = instances_[i];
    p.ordinal = i;
    const PropertyTemplate* t = FindTemplate(p.template_id);
    if (!t) {
      throw Error(ErrorCode::kInvalidCatalogConfig,
                  "unknown template '" + p.template_id + "'");
    }
    if (static_cast<int>(p.constants.size()) != t->arity) {
      throw Error(ErrorCode::kInvalidCatalogConfig,
                  "wrong constant count for '" + p.template_id + "'");
    }
    templates_.push_back(t);
    const std::string key = ConstantKey(p.constants);
    digest = Fnv1a(JoinKey(p.template_id, key) + "\n", digest);
    if (t->monotone != Monotone::kNone) {
      std::span<const Value> head(p.constants.data(), p.constants.size() - 1);
      families[JoinKey(p.template_id, ConstantKey(head))].push_back(i);
    }
  }
  digest_ = digest;
  implied_.resize(instances_.size());
  for (size_t i = 0; i < instances_.size(); ++i) implied_[i] = {i};
  for (const auto& [family, members] : families) {
    for (size_t i : members) {
      const double ci = instances_[i].constants.back().number();
      const Monotone m = templates_[i]->monotone;
      for (size_t j : members) {
        if (i == j) continue;
        const double cj = instances_[j].constants.back().number();
        if ((m == Monotone::kIncreasing && ci <= cj) ||
            (m == Monotone::kDecreasing && cj <= ci)) {
          implied_[i].push_back(j);
        }
      }
      std::sort(implied_[i].begin(), implied_[i].end());
    }
  }
}

const PropertyTemplate& Catalog::TemplateOf(size_t ordinal) const {
  return *templates_.at(ordinal);
}

std::string Catalog::Describe(size_t ordinal) const {
  const PropertyInstance& p = at(ordinal);
  std::string out = TemplateOf(ordinal).pattern;
  for (size_t i = 0; i < p.constants.size(); ++i) {
    const std::string slot = "{" + std::to_string(i) + "}";
    const Value& c = p.constants[i];
    const std::string text =
        c.kind() == ValueKind::kString ? c.as_string() : catfuzz::Describe(c);
    for (size_t pos = out.find(slot); pos != std::string::npos;
         pos = out.find(slot)) {
      out.replace(pos, slot.size(), text);
    }
  }
  return out;
}

std::optional<size_t> Catalog::Find(std::string_view template_id,
                                    std::span<const Value> constants) const {
  const std::string key = ConstantKey(constants);
  auto it = std::lower_bound(
      instances_.begin(), instances_.end(), std::pair(template_id, key),
      [](const PropertyInstance& p, const auto& probe) {
        if (p.template_id != probe.first) return p.template_id < probe.first;
        return ConstantKey(p.constants) < probe.second;
      });
  if (it == instances_.end() || it->template_id != template_id ||
      ConstantKey(it->constants) != key) {
    return std::nullopt;
  }
  return it->ordinal;
}

Bitset Catalog::Close(const Bitset& props) const {
  Bitset out = props;
  for (size_t i : props.Ones()) {
    for (size_t j : implied_[i]) out.Set(j);
  }
  return out;
}

json Catalog::ToJson() const {
  json arr = json::array();
  for (const PropertyInstance& p : instances_) {
    json consts = json::array();
    for (const Value& c : p.constants) consts.push_back(catfuzz::ToJson(c));
    arr.push_back(json{{"template", p.template_id}, {"constants", consts}});
  }
  return json{{"instances", std::move(arr)}};
}

Catalog Catalog::FromJson(const json& j) {
  std::vector<PropertyInstance> instances;
  try {
    for (const json& e : j.at("instances")) {
      PropertyInstance p;
      p.template_id = e.at("template").get<std::string>();
      for (const json& c : e.at("constants")) {
        p.constants.push_back(catfuzz::FromJson(c));
      }
      instances.push_back(std::move(p));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
  for (size_t i = 1; i < instances.size(); ++i) {
    const auto& a = instances[i - 1];
    const auto& b = instances[i];
    if (std::pair(a.template_id, ConstantKey(a.constants)) >=
        std::pair(b.template_id, ConstantKey(b.constants))) {
      throw Error(ErrorCode::kParse, "catalog instances out of canonical order");
    }
  }
  return Catalog(std::move(instances));
}

std::string Catalog::ReportTable() const {
  std::ostringstream out;
  out << "ordinal\tid\tgroup\tconstants\tproperty\n";
  for (const PropertyInstance& p : instances_) {
    out << p.ordinal << '\t' << p.template_id << '\t'
        << GroupName(TemplateOf(p.ordinal).group) << '\t'
        << ConstantKey(p.constants) << '\t' << Describe(p.ordinal) << '\n';
  }
  return out.str();
}

Catalog InstantiateCatalog(std::span<const Value> corpus,
                           const CatalogConfig& config) {
  if (corpus.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "cannot instantiate from empty corpus");
  }
  config.Validate();
  Observations obs;
  for (const Value& v : corpus) obs.Add(v);
  const ConstantPool pool(obs, config.pool_cap);

  std::vector<std::vector<PropertyInstance>> per_template;
  for (const CatalogConfig::Entry& e : config.templates) {
    if (!e.enabled) continue;
    std::vector<PropertyInstance> list;
    const PropertyTemplate* t = FindTemplate(e.id);
    if (t->arity == 0) {
      list.push_back(PropertyInstance{e.id, {}, 0});
    } else if (t->arity == 1) {
      for (const Value& c : pool.Resolve(e.sources[0])) {
        list.push_back(PropertyInstance{e.id, {c}, 0});
      }
    } else {
      const auto first = pool.Resolve(e.sources[0]);
      const auto second = pool.Resolve(e.sources[1]);
      for (const Value& a : first) {
        for (const Value& b : second) {
          list.push_back(PropertyInstance{e.id, {a, b}, 0});
        }
      }
    }
    per_template.push_back(std::move(list));
  }

  size_t total = 0;
  for (const auto& l : per_template) total += l.size();
  if (total > config.max_properties) {
    // Largest per-template quota whose total fits.
    size_t lo = 1, hi = config.max_properties;
    auto fits = [&](size_t q) {
      size_t n = 0;
      for (const auto& l : per_template) n += std::min(l.size(), q);
      return n <= config.max_properties;
    };
    while (lo < hi) {
      const size_t mid = lo + (hi - lo + 1) / 2;
      if (fits(mid)) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    for (auto& l : per_template) {
      if (l.size() > lo) l.resize(lo);
    }
  }

  std::vector<std::pair<std::pair<std::string, std::string>, PropertyInstance>>
      keyed;
  for (auto& l : per_template) {
    for (PropertyInstance& p : l) {
      auto key = std::pair(p.template_id, ConstantKey(p.constants));
      keyed.emplace_back(std::move(key), std::move(p));
    }
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  keyed.erase(std::unique(keyed.begin(), keyed.end(),
                          [](const auto& a, const auto& b) {
                            return a.first == b.first;
                          }),
              keyed.end());
  std::vector<PropertyInstance> instances;
  instances.reserve(keyed.size());
  for (auto& [k, p] : keyed) instances.push_back(std::move(p));
  return Catalog(std::move(instances));
}

Tri EvaluateInstance(const Catalog& catalog, size_t ordinal,
                     const Materialized& x) {
  const PropertyInstance& p = catalog.at(ordinal);
  return catalog.TemplateOf(ordinal).evaluate(x, p.constants);
}

Fingerprint FingerprintOf(const Value& v, const Catalog& catalog) {
  Fingerprint fp{Bitset(catalog.size()), Bitset(catalog.size()),
                 catalog.digest()};
  Materialized m;
  try {
    m = Materialize(v);
  } catch (const Error&) {
    for (size_t i = 0; i < catalog.size(); ++i) fp.unknown.Set(i);
    return fp;
  }
  for (size_t i = 0; i < catalog.size(); ++i) {
    switch (EvaluateInstance(catalog, i, m)) {
      case Tri::kTrue: fp.bits.Set(i); break;
      case Tri::kUnknown: fp.unknown.Set(i); break;
      case Tri::kFalse: break;
    }
  }
  return fp;
}

}  // namespace catfuzz
