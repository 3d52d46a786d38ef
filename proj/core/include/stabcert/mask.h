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

#ifndef STABCERT_MASK_H_
#define STABCERT_MASK_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace stabcert {

// Fixed-width bit vector over n features; feature i is kept iff bit i is set.
//
// Masks are partially ordered by set inclusion: a >= b iff the features kept
// by b are a subset of those kept by a. The text form lists bit 0 first, so
// "101" keeps features 0 and 2.
class Mask {
 public:
  Mask() = default;
  // All-zero mask over `n` features.
  explicit Mask(std::size_t n);

  static Mask Zeros(std::size_t n) { return Mask(n); }
  static Mask Ones(std::size_t n);
  // Low `n` bits of `bits`; n <= 64.
  static Mask FromBits(std::uint64_t bits, std::size_t n);
  // Parses "0110"-style strings. Throws ArgumentError on other characters.
  static Mask FromString(std::string_view text);
  static Mask FromIndices(std::size_t n, const std::vector<std::size_t>& kept);

  std::size_t size() const { return size_; }
  bool test(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1ULL;
  }
  void set(std::size_t i, bool value = true);
  void reset(std::size_t i) { set(i, false); }
  void flip(std::size_t i) { words_[i >> 6] ^= 1ULL << (i & 63); }

  // Number of kept features.
  std::size_t count() const;
  bool none() const { return count() == 0; }

  // Superset test; throws DimensionError on size mismatch.
  bool Contains(const Mask& other) const;
  // Low 64 bits as an integer index (requires size() <= 64).
  std::uint64_t ToBits() const;
  std::vector<std::size_t> Indices() const;
  std::string ToString() const;

  Mask operator&(const Mask& other) const;
  Mask operator|(const Mask& other) const;
  Mask operator^(const Mask& other) const;
  // Complement within the n features.
  Mask operator~() const;
  // Set difference: bits of *this not in `other`.
  Mask Minus(const Mask& other) const;

  bool operator==(const Mask& other) const = default;

  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  void CheckSameSize(const Mask& other) const;
  void ClearPadding();

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct MaskHash {
  std::size_t operator()(const Mask& m) const;
};

}  // namespace stabcert

#endif  // STABCERT_MASK_H_
