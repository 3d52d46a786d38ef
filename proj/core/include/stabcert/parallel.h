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

#ifndef STABCERT_PARALLEL_H_
#define STABCERT_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace stabcert {

// Calls fn(i) for i in [0, count) on up to `workers` threads. The first
// exception thrown by any call is rethrown after all threads join.
void ParallelFor(std::size_t count, int workers,
                 const std::function<void(std::size_t)>& fn);

// Worker count from the environment (STABCERT_WORKERS) or the hardware.
int DefaultWorkers();

}  // namespace stabcert

#endif  // STABCERT_PARALLEL_H_
