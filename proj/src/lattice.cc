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

#include "catfuzz/lattice.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "catfuzz/error.h"
#include "catfuzz/rng.h"

namespace catfuzz {

using nlohmann::json;

Lattice::Lattice() : mu_(std::make_unique<std::mutex>()) {}
Lattice::Lattice(Lattice&&) noexcept = default;
Lattice& Lattice::operator=(Lattice&&) noexcept = default;

Lattice::Lattice(const std::vector<Bitset>& property_sets, ClosureFn close)
    : mu_(std::make_unique<std::mutex>()) {
  input_category_.reserve(property_sets.size());
  for (size_t i = 0; i < property_sets.size(); ++i) {
    const Bitset& props = property_sets[i];
    if (props.width() != property_sets[0].width()) {
      throw Error(ErrorCode::kMixedCatalog,
                  "property-sets of different widths in one lattice");
    }
    auto [it, inserted] = index_.try_emplace(props, categories_.size());
    if (inserted) {
      categories_.push_back(InputCategory{it->second, props, close(props), {}});
    }
    categories_[it->second].members.push_back(i);
    input_category_.push_back(it->second);
  }
  stronger_.resize(categories_.size());
  stronger_ready_.assign(categories_.size(), 0);
  if (categories_.size() <= kPrecomputeOrderLimit) {
    for (size_t c = 0; c < categories_.size(); ++c) {
      stronger_[c] = ComputeStronger(c);
      stronger_ready_[c] = 1;
    }
  }
}

std::optional<size_t> Lattice::Lookup(const Bitset& props) const {
  auto it = index_.find(props);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Lattice::IsWeaker(size_t c1, size_t c2) const {
  const Bitset& a = categories_.at(c1).closed;
  const Bitset& b = categories_.at(c2).closed;
  return a.IsSubsetOf(b) && !(a == b);
}

std::vector<size_t> Lattice::ComputeStronger(size_t c) const {
  std::vector<size_t> out;
  for (size_t d = 0; d < categories_.size(); ++d) {
    if (IsWeaker(c, d)) out.push_back(d);
  }
  std::sort(out.begin(), out.end(), [&](size_t a, size_t b) {
    const size_t na = categories_[a].props.Count();
    const size_t nb = categories_[b].props.Count();
    return na != nb ? na < nb : a < b;
  });
  return out;
}

const std::vector<size_t>& Lattice::Stronger(size_t c) const {
  if (c >= categories_.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "no category " + std::to_string(c));
  }
  std::lock_guard<std::mutex> lock(*mu_);
  if (!stronger_ready_[c]) {
    stronger_[c] = ComputeStronger(c);
    stronger_ready_[c] = 1;
  }
  return stronger_[c];
}

size_t Lattice::SampleInput(size_t c, uint64_t seed) const {
  const auto& members = categories_.at(c).members;
  Rng rng(seed);
  return members[rng.Uniform(members.size())];
}

// -- InputDatabase ---------------------------------------------------------

namespace {

Lattice LatticeFor(const std::shared_ptr<const Catalog>& catalog,
                   const std::vector<InputEntry>& inputs) {
  std::vector<Bitset> sets;
  sets.reserve(inputs.size());
  for (const InputEntry& e : inputs) sets.push_back(e.fingerprint.bits);
  return Lattice(sets, [catalog](const Bitset& b) { return catalog->Close(b); });
}

std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void WriteFile(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + p.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "short write to " + p.string());
}

}  // namespace

InputDatabase InputDatabase::Build(Catalog catalog, std::vector<Value> inputs) {
  std::vector<Fingerprint> fps;
  fps.reserve(inputs.size());
  for (const Value& v : inputs) fps.push_back(FingerprintOf(v, catalog));
  return FromFingerprints(std::move(catalog), std::move(inputs), std::move(fps));
}

InputDatabase InputDatabase::FromFingerprints(
    Catalog catalog, std::vector<Value> inputs,
    std::vector<Fingerprint> fingerprints) {
  if (inputs.size() != fingerprints.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "inputs and fingerprints differ in count");
  }
  InputDatabase db;
  db.catalog_ = std::make_shared<const Catalog>(std::move(catalog));
  for (size_t i = 0; i < inputs.size(); ++i) {
    const Fingerprint& fp = fingerprints[i];
    if (fp.catalog_digest != db.catalog_->digest() ||
        fp.bits.width() != db.catalog_->size()) {
      throw Error(ErrorCode::kMixedCatalog,
                  "input " + std::to_string(i) +
                      " was fingerprinted against another catalog");
    }
    db.inputs_.push_back(InputEntry{std::move(inputs[i]), fp});
  }
  db.lattice_ = LatticeFor(db.catalog_, db.inputs_);
  return db;
}

void InputDatabase::Save(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  WriteFile(fs::path(dir) / "catalog.json", catalog_->ToJson().dump(1) + "\n");

  std::string inputs;
  for (size_t i = 0; i < inputs_.size(); ++i) {
    json line{{"id", i},
              {"value", ToJson(inputs_[i].value)},
              {"bits", inputs_[i].fingerprint.bits.ToHex()},
              {"unknown", inputs_[i].fingerprint.unknown.ToHex()}};
    inputs += line.dump() + "\n";
  }
  WriteFile(fs::path(dir) / "inputs.jsonl", inputs);

  std::string cats, order;
  for (const InputCategory& c : lattice_.categories()) {
    cats += std::to_string(c.id) + "\t" + c.props.ToHex() + "\t";
    for (size_t i = 0; i < c.members.size(); ++i) {
      if (i) cats += ",";
      cats += std::to_string(c.members[i]);
    }
    cats += "\n";
    order += std::to_string(c.id) + "\t";
    const auto& stronger = lattice_.Stronger(c.id);
    for (size_t i = 0; i < stronger.size(); ++i) {
      if (i) order += " ";
      order += std::to_string(stronger[i]);
    }
    order += "\n";
  }
  WriteFile(fs::path(dir) / "categories.txt", cats);
  WriteFile(fs::path(dir) / "order.txt", order);
}

InputDatabase InputDatabase::Load(const std::string& dir) {
  namespace fs = std::filesystem;
  Catalog catalog;
  try {
    catalog = Catalog::FromJson(json::parse(ReadFile(fs::path(dir) / "catalog.json")));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("catalog.json: ") + e.what());
  }
  std::vector<Value> values;
  std::vector<Fingerprint> fps;
  std::istringstream lines(ReadFile(fs::path(dir) / "inputs.jsonl"));
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      if (j.at("id").get<size_t>() != values.size()) {
        throw Error(ErrorCode::kParse, "inputs.jsonl ids out of order");
      }
      values.push_back(FromJson(j.at("value")));
      fps.push_back(Fingerprint{
          Bitset::FromHex(j.at("bits").get<std::string>(), catalog.size()),
          Bitset::FromHex(j.at("unknown").get<std::string>(), catalog.size()),
          catalog.digest()});
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse, std::string("inputs.jsonl: ") + e.what());
    }
  }
  InputDatabase db =
      FromFingerprints(std::move(catalog), std::move(values), std::move(fps));

  // The categories file must agree with what the inputs imply.
  std::istringstream cats(ReadFile(fs::path(dir) / "categories.txt"));
  size_t n = 0;
  while (std::getline(cats, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    size_t id;
    std::string hex;
    fields >> id >> hex;
    if (id >= db.lattice_.size() ||
        db.lattice_.category(id).props.ToHex() != hex) {
      throw Error(ErrorCode::kParse, "categories.txt disagrees with inputs");
    }
    ++n;
  }
  if (n != db.lattice_.size()) {
    throw Error(ErrorCode::kParse, "categories.txt has wrong category count");
  }
  return db;
}

}  // namespace catfuzz
