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

#include "stabcert/external_model.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "stabcert/error.h"

namespace stabcert {
namespace {

using nlohmann::json;

std::string Errno(const char* what) {
  return std::string(what) + ": " + std::strerror(errno);
}

}  // namespace

Handshake ParseHandshake(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ProtocolError("malformed handshake line: " + line);
  }
  if (!j.is_object() || !j.contains("n") || !j.contains("m") ||
      !j["n"].is_number_integer() || !j["m"].is_number_integer()) {
    throw ProtocolError("handshake must carry integer n and m: " + line);
  }
  Handshake h;
  const auto n = j["n"].get<long long>();
  const auto m = j["m"].get<long long>();
  if (n <= 0 || m <= 0) throw ProtocolError("handshake n and m must be positive");
  h.n = static_cast<std::size_t>(n);
  h.m = static_cast<std::size_t>(m);
  if (j.contains("probabilities")) {
    if (!j["probabilities"].is_boolean()) {
      throw ProtocolError("handshake field probabilities must be a boolean");
    }
    h.probabilities = j["probabilities"].get<bool>();
  }
  return h;
}

std::string EncodeHandshake(const Handshake& h) {
  json j = json::object();
  j["n"] = h.n;
  j["m"] = h.m;
  j["probabilities"] = h.probabilities;
  return j.dump();
}

std::string EncodeRequest(std::uint64_t id, std::span<const double> input) {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["masked_input"] = std::vector<double>(input.begin(), input.end());
  return j.dump();
}

std::uint64_t ParseResponse(const std::string& line, Scores& scores) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception&) {
    throw ProtocolError("malformed response line: " + line);
  }
  if (!j.is_object() || !j.contains("id") || !j["id"].is_number_unsigned() ||
      !j.contains("scores") || !j["scores"].is_array()) {
    throw ProtocolError("response needs an id and a scores array: " + line);
  }
  scores.clear();
  for (const auto& v : j["scores"]) {
    if (!v.is_number()) throw ProtocolError("non-numeric score: " + line);
    scores.push_back(v.get<double>());
  }
  return j["id"].get<std::uint64_t>();
}

ExternalModel::ExternalModel(const std::string& command) {
  // Writes to a dead child must surface as EPIPE, not kill the process.
  ::signal(SIGPIPE, SIG_IGN);
  int to_child[2];
  int from_child[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0) throw ProtocolError(Errno("pipe"));
  if (::pipe2(from_child, O_CLOEXEC) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw ProtocolError(Errno("pipe"));
  }
  pid_ = ::fork();
  if (pid_ < 0) {
    for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) {
      ::close(fd);
    }
    throw ProtocolError(Errno("fork"));
  }
  if (pid_ == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  to_child_ = to_child[1];
  from_child_ = from_child[0];
  ::fcntl(to_child_, F_SETFL, ::fcntl(to_child_, F_GETFL) | O_NONBLOCK);
  try {
    handshake_ = ParseHandshake(ReadLine());
  } catch (...) {
    Shutdown();
    throw;
  }
}

ExternalModel::~ExternalModel() { Shutdown(); }

void ExternalModel::Shutdown() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ <= 0) return;
  int status = 0;
  for (int i = 0; i < 100; ++i) {
    if (::waitpid(pid_, &status, WNOHANG) == pid_) {
      pid_ = -1;
      return;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  ::kill(pid_, SIGKILL);
  ::waitpid(pid_, &status, 0);
  pid_ = -1;
}

std::string ExternalModel::ReadLine() const {
  for (;;) {
    const auto pos = read_buffer_.find('\n');
    if (pos != std::string::npos) {
      std::string line = read_buffer_.substr(0, pos);
      read_buffer_.erase(0, pos + 1);
      return line;
    }
    char buf[4096];
    const ssize_t got = ::read(from_child_, buf, sizeof(buf));
    if (got < 0 && errno == EINTR) continue;
    if (got <= 0) throw ProtocolError("external model closed its output");
    read_buffer_.append(buf, static_cast<std::size_t>(got));
  }
}

Scores ExternalModel::Evaluate(std::span<const double> x) const {
  std::vector<Features> one{Features(x.begin(), x.end())};
  return std::move(EvaluateBatch(one).front());
}

std::vector<Scores> ExternalModel::EvaluateBatch(
    std::span<const Features> inputs) const {
  if (to_child_ < 0) throw ProtocolError("external model is not running");
  const std::uint64_t first_id = next_id_;
  next_id_ += inputs.size();

  std::string outgoing;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].size() != handshake_.n) {
      throw DimensionError("external model expects " +
                           std::to_string(handshake_.n) + " features, got " +
                           std::to_string(inputs[i].size()));
    }
    outgoing += EncodeRequest(first_id + i, inputs[i]);
    outgoing += '\n';
  }

  std::vector<Scores> out(inputs.size());
  std::vector<bool> done(inputs.size(), false);
  std::size_t remaining = inputs.size();
  std::size_t written = 0;
  Scores scores;

  auto drain_lines = [&] {
    for (auto pos = read_buffer_.find('\n'); pos != std::string::npos;
         pos = read_buffer_.find('\n')) {
      const std::string line = read_buffer_.substr(0, pos);
      read_buffer_.erase(0, pos + 1);
      if (line.empty()) continue;
      const std::uint64_t id = ParseResponse(line, scores);
      if (id < first_id || id >= first_id + inputs.size()) {
        throw ProtocolError("response id " + std::to_string(id) +
                            " does not match any pending request");
      }
      const std::size_t index = id - first_id;
      if (done[index]) {
        throw ProtocolError("duplicate response for id " + std::to_string(id));
      }
      if (scores.size() != handshake_.m) {
        throw ModelError("external model returned " +
                         std::to_string(scores.size()) +
                         " scores at sample " + std::to_string(index) +
                         ", declared " + std::to_string(handshake_.m));
      }
      out[index] = scores;
      done[index] = true;
      --remaining;
    }
  };

  drain_lines();
  while (remaining > 0) {
    pollfd fds[2];
    nfds_t count = 0;
    fds[count++] = {from_child_, POLLIN, 0};
    if (written < outgoing.size()) fds[count++] = {to_child_, POLLOUT, 0};
    if (::poll(fds, count, -1) < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(Errno("poll"));
    }
    if (count > 1 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      const ssize_t put = ::write(to_child_, outgoing.data() + written,
                                  outgoing.size() - written);
      if (put < 0 && errno != EAGAIN && errno != EINTR) {
        throw ProtocolError(Errno("write to external model"));
      }
      if (put > 0) written += static_cast<std::size_t>(put);
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      char buf[8192];
      const ssize_t got = ::read(from_child_, buf, sizeof(buf));
      if (got < 0 && errno == EINTR) continue;
      if (got <= 0) {
        throw ProtocolError("external model closed its output with " +
                            std::to_string(remaining) +
                            " responses outstanding");
      }
      read_buffer_.append(buf, static_cast<std::size_t>(got));
      drain_lines();
    }
  }
  return out;
}

}  // namespace stabcert
