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

// Stable 64-bit hashing of numeric data for seed derivation.

#ifndef STABCERT_HASH_H_
#define STABCERT_HASH_H_

#include <cstdint>
#include <span>
#include <string_view>

namespace stabcert {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;

// FNV-1a over the IEEE-754 bits of each value, with -0.0 hashed as 0.0.
std::uint64_t HashDoubles(std::span<const double> values,
                          std::uint64_t h = kFnvOffset);
std::uint64_t HashBytes(std::string_view bytes, std::uint64_t h = kFnvOffset);

}  // namespace stabcert

#endif  // STABCERT_HASH_H_
