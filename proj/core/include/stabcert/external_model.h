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

// Adapter for a model served by a child process over newline-delimited JSON.
//
// Handshake (first line written by the child):
//   {"n":<int>,"m":<int>,"probabilities":<bool>}
// Request, one per line on the child's stdin:
//   {"id":<int>,"masked_input":[<f64>...]}
// Response, one per line on the child's stdout, in any order:
//   {"id":<int>,"scores":[<f64>...]}

#ifndef STABCERT_EXTERNAL_MODEL_H_
#define STABCERT_EXTERNAL_MODEL_H_

#include <sys/types.h>

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stabcert/model.h"

namespace stabcert {

struct Handshake {
  std::size_t n = 0;
  std::size_t m = 0;
  bool probabilities = false;
};

// Line codecs, exposed for testing and for writing compatible servers.
Handshake ParseHandshake(const std::string& line);
std::string EncodeHandshake(const Handshake& h);
std::string EncodeRequest(std::uint64_t id, std::span<const double> input);
// Returns the id and fills `scores`. Throws ProtocolError.
std::uint64_t ParseResponse(const std::string& line, Scores& scores);

class ExternalModel : public Model {
 public:
  // Runs `command` through /bin/sh and reads the handshake. Throws
  // ProtocolError if the process cannot be started or the handshake is bad.
  explicit ExternalModel(const std::string& command);
  ~ExternalModel() override;

  ExternalModel(const ExternalModel&) = delete;
  ExternalModel& operator=(const ExternalModel&) = delete;

  std::size_t num_features() const override { return handshake_.n; }
  std::size_t num_outputs() const override { return handshake_.m; }
  bool emits_probabilities() const override {
    return handshake_.probabilities;
  }
  bool concurrency_safe() const override { return false; }

  Scores Evaluate(std::span<const double> x) const override;
  // Streams all requests while collecting responses; responses are matched
  // by id.
  std::vector<Scores> EvaluateBatch(
      std::span<const Features> inputs) const override;

 private:
  std::string ReadLine() const;
  void Shutdown();

  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  Handshake handshake_;
  mutable std::uint64_t next_id_ = 0;
  mutable std::string read_buffer_;
};

}  // namespace stabcert

#endif  // STABCERT_EXTERNAL_MODEL_H_
