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

#include "stabcert/hash.h"

#include <bit>

namespace stabcert {
namespace {

constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t MixByte(std::uint64_t h, std::uint8_t b) {
  return (h ^ b) * kFnvPrime;
}

}  // namespace

std::uint64_t HashDoubles(std::span<const double> values, std::uint64_t h) {
  for (double v : values) {
    if (v == 0.0) v = 0.0;
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      h = MixByte(h, static_cast<std::uint8_t>(bits >> (8 * i)));
    }
  }
  return h;
}

std::uint64_t HashBytes(std::string_view bytes, std::uint64_t h) {
  for (char c : bytes) h = MixByte(h, static_cast<std::uint8_t>(c));
  return h;
}

}  // namespace stabcert
