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

// JSON encodings of the library's result records. Keys keep insertion
// order so the same record always serializes to the same bytes.

#ifndef STABCERT_REPORT_H_
#define STABCERT_REPORT_H_

#include <nlohmann/json.hpp>

#include "stabcert/bise.h"
#include "stabcert/sca.h"

namespace stabcert {

using Json = nlohmann::ordered_json;

Json ToJson(const CertificateReport& report);
Json ToJson(const BiseScore& score);
Json ToJson(const BiseBounds& bounds);

}  // namespace stabcert

#endif  // STABCERT_REPORT_H_
