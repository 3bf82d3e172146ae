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

#ifndef CATFUZZ_PROPERTY_H_
#define CATFUZZ_PROPERTY_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "catfuzz/bitset.h"
#include "catfuzz/value.h"
#include "json.hpp"

namespace catfuzz {

enum class PropertyGroup { kTypeStructure, kValue, kShape };
std::string_view GroupName(PropertyGroup group);
std::optional<PropertyGroup> ParseGroup(std::string_view name);

// Three-valued predicate result. kUnknown only when the data a predicate
// needs is absent (element facts of a stats-only tensor).
enum class Tri { kFalse, kTrue, kUnknown };

// How an instance's truth moves with its last constant, all other constants
// held equal. kIncreasing: p(c1) implies p(c2) for c1 <= c2 ("X < C").
// kDecreasing: p(c1) implies p(c2) for c2 <= c1 ("X > C").
enum class Monotone { kNone, kIncreasing, kDecreasing };

using Evaluator =
    std::function<Tri(const Materialized& x, std::span<const Value> consts)>;

struct PropertyTemplate {
  std::string id;
  PropertyGroup group;
  int arity = 0;
  // Rendering with {0}/{1} standing for the constants.
  std::string pattern;
  // Default constant sources, one list per constant position.
  std::vector<std::vector<std::string>> sources;
  Monotone monotone = Monotone::kNone;
  Evaluator evaluate;
};

// The built-in template library, in a fixed order.
const std::vector<PropertyTemplate>& BuiltinTemplates();
const PropertyTemplate* FindTemplate(std::string_view id);

// Constant source names understood by the catalog builder.
const std::vector<std::string>& KnownSources();

struct CatalogConfig {
  struct Entry {
    std::string id;
    PropertyGroup group;
    std::vector<std::vector<std::string>> sources;
    bool enabled = true;
  };

  size_t pool_cap = 64;
  size_t max_properties = 4096;
  std::vector<Entry> templates;

  // Every built-in template, enabled, with its default sources.
  static CatalogConfig Default();
  // Starts from Default(); entries in the file override by id. Throws
  // kInvalidCatalogConfig on unknown ids, group mismatches, bad sources, or
  // a group left without any enabled template.
  static CatalogConfig FromJson(const nlohmann::json& j);
  static CatalogConfig Load(const std::string& path);
  nlohmann::json ToJson() const;
  void Validate() const;
};

struct PropertyInstance {
  std::string template_id;
  std::vector<Value> constants;
  size_t ordinal = 0;
};

class Catalog {
 public:
  Catalog() = default;
  // Instances must already be in canonical order; ordinals are reassigned.
  explicit Catalog(std::vector<PropertyInstance> instances);

  size_t size() const { return instances_.size(); }
  const std::vector<PropertyInstance>& instances() const { return instances_; }
  const PropertyInstance& at(size_t ordinal) const {
    return instances_.at(ordinal);
  }
  const PropertyTemplate& TemplateOf(size_t ordinal) const;
  std::string Describe(size_t ordinal) const;

  std::optional<size_t> Find(std::string_view template_id,
                             std::span<const Value> constants) const;

  // Ordinals implied by `ordinal` through its template's monotone rule,
  // including `ordinal` itself, ascending.
  const std::vector<size_t>& Implied(size_t ordinal) const {
    return implied_.at(ordinal);
  }
  // Smallest superset of `props` closed under the implication rules.
  Bitset Close(const Bitset& props) const;

  // Identifies the instance list; fingerprints carry it.
  uint64_t digest() const { return digest_; }

  nlohmann::json ToJson() const;
  static Catalog FromJson(const nlohmann::json& j);

  // One row per instance: ordinal, template id, group, constants.
  std::string ReportTable() const;

 private:
  std::vector<PropertyInstance> instances_;
  std::vector<const PropertyTemplate*> templates_;
  std::vector<std::vector<size_t>> implied_;
  uint64_t digest_ = 0;
};

// Canonical sort key of a constant tuple.
std::string ConstantKey(std::span<const Value> constants);

// Builds the catalog from the templates in `config` and the constant pool
// observed in `corpus`. Deterministic given corpus order and config.
Catalog InstantiateCatalog(std::span<const Value> corpus,
                           const CatalogConfig& config);

struct Fingerprint {
  Bitset bits;
  Bitset unknown;
  uint64_t catalog_digest = 0;

  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

Tri EvaluateInstance(const Catalog& catalog, size_t ordinal,
                     const Materialized& x);
Fingerprint FingerprintOf(const Value& v, const Catalog& catalog);

}  // namespace catfuzz

#endif  // CATFUZZ_PROPERTY_H_
