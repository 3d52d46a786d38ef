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

// Line-protocol model server used by the adapter tests.
//
//   fake_model_server <mode> [n]
//
// Modes: ok, bad-handshake, wrong-count, unknown-id, exit-early. The served
// function is f(x) = (1 - c/n, c/n) with c the number of non-zero inputs.
// Pending requests are answered in reverse order of arrival.

#include <poll.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace {

bool InputPending(int timeout_ms) {
  pollfd p{0, POLLIN, 0};
  return ::poll(&p, 1, timeout_ms) > 0;
}

void WriteLine(const std::string& s) {
  std::string line = s + "\n";
  std::size_t off = 0;
  while (off < line.size()) {
    const ssize_t w = ::write(1, line.data() + off, line.size() - off);
    if (w <= 0) std::exit(1);
    off += static_cast<std::size_t>(w);
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "ok";
  const int n = argc > 2 ? std::atoi(argv[2]) : 4;
  if (mode == "bad-handshake") {
    WriteLine("hello");
    return 0;
  }
  WriteLine(nlohmann::json{{"n", n}, {"m", 2}, {"probabilities", true}}.dump());
  if (mode == "exit-early") return 0;

  std::string buffer;
  std::vector<nlohmann::json> pending;
  char chunk[4096];
  while (true) {
    const ssize_t got = ::read(0, chunk, sizeof chunk);
    if (got <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(got));
    std::size_t nl;
    while ((nl = buffer.find('\n')) != std::string::npos) {
      pending.push_back(nlohmann::json::parse(buffer.substr(0, nl)));
      buffer.erase(0, nl + 1);
    }
    if (InputPending(5)) continue;
    for (auto it = pending.rbegin(); it != pending.rend(); ++it) {
      double c = 0;
      for (const auto& v : (*it)["masked_input"]) c += v.get<double>() != 0.0;
      std::uint64_t id = (*it)["id"].get<std::uint64_t>();
      if (mode == "unknown-id") id += 1000;
      nlohmann::json scores = {1.0 - c / n, c / n};
      if (mode == "wrong-count") scores.push_back(0.0);
      WriteLine(nlohmann::json{{"id", id}, {"scores", scores}}.dump());
    }
    pending.clear();
  }
  return 0;
}
