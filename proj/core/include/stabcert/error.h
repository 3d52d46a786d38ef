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

#ifndef STABCERT_ERROR_H_
#define STABCERT_ERROR_H_

#include <stdexcept>
#include <string>

namespace stabcert {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter violates an operation's precondition.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Vector or mask lengths disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// An exhaustive computation would exceed the configured cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// A model evaluation failed. Carries the index of the failing sample when
// the failure happened inside a batch.
class ModelError : public Error {
 public:
  using Error::Error;
};

// The external model process broke the line protocol.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace stabcert

#endif  // STABCERT_ERROR_H_
