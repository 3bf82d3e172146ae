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

#include "catfuzz/bitset.h"

#include <bit>

#include "catfuzz/error.h"

namespace catfuzz {

Bitset::Bitset(size_t width) : width_(width), words_((width + 63) / 64, 0) {}

bool Bitset::Test(size_t i) const {
  if (i >= width_) return false;
  return (words_[i / 64] >> (i % 64)) & 1u;
}

void Bitset::Set(size_t i, bool value) {
  if (i >= width_) {
    throw Error(ErrorCode::kInvalidArgument, "bit index out of range");
  }
  const uint64_t mask = uint64_t{1} << (i % 64);
  if (value) {
    words_[i / 64] |= mask;
  } else {
    words_[i / 64] &= ~mask;
  }
}

size_t Bitset::Count() const {
  size_t n = 0;
  for (uint64_t w : words_) n += std::popcount(w);
  return n;
}

bool Bitset::None() const {
  for (uint64_t w : words_) {
    if (w != 0) return false;
  }
  return true;
}

void Bitset::CheckWidth(const Bitset& other) const {
  if (width_ != other.width_) {
    throw Error(ErrorCode::kMixedCatalog, "bitset width mismatch");
  }
}

bool Bitset::IsSubsetOf(const Bitset& other) const {
  CheckWidth(other);
  for (size_t i = 0; i < words_.size(); ++i) {
    if ((words_[i] & ~other.words_[i]) != 0) return false;
  }
  return true;
}

bool Bitset::Intersects(const Bitset& other) const {
  CheckWidth(other);
  for (size_t i = 0; i < words_.size(); ++i) {
    if ((words_[i] & other.words_[i]) != 0) return true;
  }
  return false;
}

Bitset& Bitset::operator|=(const Bitset& other) {
  CheckWidth(other);
  for (size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

Bitset& Bitset::operator&=(const Bitset& other) {
  CheckWidth(other);
  for (size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

Bitset Bitset::operator~() const {
  Bitset out(width_);
  for (size_t i = 0; i < words_.size(); ++i) out.words_[i] = ~words_[i];
  if (width_ % 64 != 0 && !out.words_.empty()) {
    out.words_.back() &= (uint64_t{1} << (width_ % 64)) - 1;
  }
  return out;
}

std::vector<size_t> Bitset::Ones() const {
  std::vector<size_t> out;
  for (size_t w = 0; w < words_.size(); ++w) {
    uint64_t bits = words_[w];
    while (bits != 0) {
      out.push_back(w * 64 + std::countr_zero(bits));
      bits &= bits - 1;
    }
  }
  return out;
}

std::string Bitset::ToHex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const size_t nibbles = (width_ + 3) / 4;
  std::string out(nibbles, '0');
  for (size_t n = 0; n < nibbles; ++n) {
    unsigned v = 0;
    for (size_t b = 0; b < 4; ++b) {
      if (Test(n * 4 + b)) v |= 1u << b;
    }
    out[nibbles - 1 - n] = kDigits[v];
  }
  return out;
}

Bitset Bitset::FromHex(std::string_view hex, size_t width) {
  const size_t nibbles = (width + 3) / 4;
  if (hex.size() != nibbles) {
    throw Error(ErrorCode::kParse, "hex bitset has wrong length");
  }
  Bitset out(width);
  for (size_t n = 0; n < nibbles; ++n) {
    const char c = hex[nibbles - 1 - n];
    unsigned v;
    if (c >= '0' && c <= '9') {
      v = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      v = c - 'a' + 10;
    } else {
      throw Error(ErrorCode::kParse, "bad hex digit in bitset");
    }
    for (size_t b = 0; b < 4; ++b) {
      if ((v >> b) & 1u) {
        if (n * 4 + b >= width) {
          throw Error(ErrorCode::kParse, "hex bitset sets bit past width");
        }
        out.Set(n * 4 + b);
      }
    }
  }
  return out;
}

size_t Bitset::Hash() const {
  uint64_t h = 0xcbf29ce484222325ull ^ width_;
  for (uint64_t w : words_) {
    h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return static_cast<size_t>(h);
}

}  // namespace catfuzz
