/*
 * Copyright 2026 The Stabcert Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "stabcert/mask.h"

#include <bit>
#include <string>

#include "stabcert/error.h"

namespace stabcert {

Mask::Mask(std::size_t n) : size_(n), words_((n + 63) / 64, 0) {}

Mask Mask::Ones(std::size_t n) {
  Mask m(n);
  for (auto& w : m.words_) w = ~0ULL;
  m.ClearPadding();
  return m;
}

Mask Mask::FromBits(std::uint64_t bits, std::size_t n) {
  if (n > 64) throw ArgumentError("Mask::FromBits supports at most 64 features");
  Mask m(n);
  if (n > 0) m.words_[0] = bits;
  m.ClearPadding();
  return m;
}

Mask Mask::FromString(std::string_view text) {
  Mask m(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '1') {
      m.set(i);
    } else if (text[i] != '0') {
      throw ArgumentError("mask string may only contain '0' and '1': " +
                          std::string(text));
    }
  }
  return m;
}

Mask Mask::FromIndices(std::size_t n, const std::vector<std::size_t>& kept) {
  Mask m(n);
  for (std::size_t i : kept) {
    if (i >= n) throw DimensionError("mask index out of range");
    m.set(i);
  }
  return m;
}

void Mask::set(std::size_t i, bool value) {
  const std::uint64_t bit = 1ULL << (i & 63);
  if (value) {
    words_[i >> 6] |= bit;
  } else {
    words_[i >> 6] &= ~bit;
  }
}

std::size_t Mask::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

bool Mask::Contains(const Mask& other) const {
  CheckSameSize(other);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if ((other.words_[i] & ~words_[i]) != 0) return false;
  }
  return true;
}

std::uint64_t Mask::ToBits() const {
  if (size_ > 64) throw ArgumentError("Mask::ToBits supports at most 64 features");
  return words_.empty() ? 0 : words_[0];
}

std::vector<std::size_t> Mask::Indices() const {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t bits = words_[w];
    while (bits != 0) {
      out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
  return out;
}

std::string Mask::ToString() const {
  std::string s(size_, '0');
  for (std::size_t i = 0; i < size_; ++i) {
    if (test(i)) s[i] = '1';
  }
  return s;
}

Mask Mask::operator&(const Mask& other) const {
  CheckSameSize(other);
  Mask out = *this;
  for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] &= other.words_[i];
  return out;
}

Mask Mask::operator|(const Mask& other) const {
  CheckSameSize(other);
  Mask out = *this;
  for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] |= other.words_[i];
  return out;
}

Mask Mask::operator^(const Mask& other) const {
  CheckSameSize(other);
  Mask out = *this;
  for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] ^= other.words_[i];
  return out;
}

Mask Mask::operator~() const {
  Mask out = *this;
  for (auto& w : out.words_) w = ~w;
  out.ClearPadding();
  return out;
}

Mask Mask::Minus(const Mask& other) const {
  CheckSameSize(other);
  Mask out = *this;
  for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] &= ~other.words_[i];
  return out;
}

void Mask::CheckSameSize(const Mask& other) const {
  if (size_ != other.size_) {
    throw DimensionError("mask sizes differ: " + std::to_string(size_) +
                         " vs " + std::to_string(other.size_));
  }
}

void Mask::ClearPadding() {
  const std::size_t tail = size_ & 63;
  if (tail != 0 && !words_.empty()) words_.back() &= (1ULL << tail) - 1;
}

std::size_t MaskHash::operator()(const Mask& m) const {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ m.size();
  for (auto w : m.words()) h = (h ^ w) * 0x100000001b3ULL;
  return static_cast<std::size_t>(h);
}

}  // namespace stabcert
