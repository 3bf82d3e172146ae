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

#ifndef CATFUZZ_LATTICE_H_
#define CATFUZZ_LATTICE_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "catfuzz/bitset.h"
#include "catfuzz/property.h"
#include "catfuzz/value.h"

namespace catfuzz {

// Above this many categories the strength order is computed on demand.
inline constexpr size_t kPrecomputeOrderLimit = 5000;

using ClosureFn = std::function<Bitset(const Bitset&)>;

struct InputCategory {
  size_t id = 0;
  Bitset props;   // satisfied ordinals; unknowns never count
  Bitset closed;  // props closed under the implication rules
  std::vector<size_t> members;
};

// Groups property-sets into categories and answers strength queries.
// Immutable after construction apart from the internal memo.
class Lattice {
 public:
  Lattice();
  // property_sets[i] belongs to input i. Category ids follow first
  // appearance. Throws kMixedCatalog when widths differ.
  Lattice(const std::vector<Bitset>& property_sets, ClosureFn close);

  Lattice(Lattice&&) noexcept;
  Lattice& operator=(Lattice&&) noexcept;

  size_t size() const { return categories_.size(); }
  const std::vector<InputCategory>& categories() const { return categories_; }
  const InputCategory& category(size_t id) const { return categories_.at(id); }
  size_t CategoryOfInput(size_t input) const { return input_category_.at(input); }
  std::optional<size_t> Lookup(const Bitset& props) const;

  // Strict inclusion of closed property-sets: c1 is weaker than c2.
  bool IsWeaker(size_t c1, size_t c2) const;
  // Every c' with IsWeaker(c, c'), by ascending |props| then id.
  const std::vector<size_t>& Stronger(size_t c) const;
  // Uniform member of `c`, reproducible for a given seed.
  size_t SampleInput(size_t c, uint64_t seed) const;

 private:
  std::vector<size_t> ComputeStronger(size_t c) const;

  std::vector<InputCategory> categories_;
  std::vector<size_t> input_category_;
  std::unordered_map<Bitset, size_t> index_;
  std::unique_ptr<std::mutex> mu_;
  mutable std::vector<std::vector<size_t>> stronger_;
  mutable std::vector<char> stronger_ready_;
};

struct InputEntry {
  Value value;
  Fingerprint fingerprint;
};

// Seed inputs, their fingerprints, and the category lattice over them.
// Frozen once built.
class InputDatabase {
 public:
  InputDatabase() = default;
  // Fingerprints every input against `catalog`.
  static InputDatabase Build(Catalog catalog, std::vector<Value> inputs);
  // Throws kMixedCatalog if a fingerprint came from another catalog.
  static InputDatabase FromFingerprints(Catalog catalog,
                                        std::vector<Value> inputs,
                                        std::vector<Fingerprint> fingerprints);

  const Catalog& catalog() const { return *catalog_; }
  const std::vector<InputEntry>& inputs() const { return inputs_; }
  const InputEntry& input(size_t id) const { return inputs_.at(id); }
  const Lattice& lattice() const { return lattice_; }

  // Directory with catalog.json, inputs.jsonl, categories.txt, order.txt.
  void Save(const std::string& dir) const;
  static InputDatabase Load(const std::string& dir);

 private:
  std::shared_ptr<const Catalog> catalog_;
  std::vector<InputEntry> inputs_;
  Lattice lattice_;
};

}  // namespace catfuzz

#endif  // CATFUZZ_LATTICE_H_
