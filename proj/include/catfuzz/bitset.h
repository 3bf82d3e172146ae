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

#ifndef CATFUZZ_BITSET_H_
#define CATFUZZ_BITSET_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace catfuzz {

// Fixed-width bitset sized at runtime. Width is part of the identity: two
// bitsets of different widths never compare equal.
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(size_t width);

  size_t width() const { return width_; }
  bool Test(size_t i) const;
  void Set(size_t i, bool value = true);
  size_t Count() const;
  bool None() const;

  bool IsSubsetOf(const Bitset& other) const;
  bool Intersects(const Bitset& other) const;
  Bitset& operator|=(const Bitset& other);
  Bitset& operator&=(const Bitset& other);
  Bitset operator~() const;

  // Ordinals of the set bits, ascending.
  std::vector<size_t> Ones() const;

  // Lowercase hex, most significant nibble first, exactly ceil(width/4)
  // digits. Platform independent.
  std::string ToHex() const;
  static Bitset FromHex(std::string_view hex, size_t width);

  friend bool operator==(const Bitset& a, const Bitset& b) {
    return a.width_ == b.width_ && a.words_ == b.words_;
  }
  friend bool operator<(const Bitset& a, const Bitset& b) {
    if (a.width_ != b.width_) return a.width_ < b.width_;
    return a.words_ < b.words_;
  }

  size_t Hash() const;

 private:
  void CheckWidth(const Bitset& other) const;

  size_t width_ = 0;
  std::vector<uint64_t> words_;
};

inline Bitset operator|(Bitset a, const Bitset& b) { return a |= b; }
inline Bitset operator&(Bitset a, const Bitset& b) { return a &= b; }

}  // namespace catfuzz

template <>
struct std::hash<catfuzz::Bitset> {
  size_t operator()(const catfuzz::Bitset& b) const { return b.Hash(); }
};

#endif  // CATFUZZ_BITSET_H_
