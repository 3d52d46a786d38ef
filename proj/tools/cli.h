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

// The stabcert command-line front end.

#ifndef STABCERT_TOOLS_CLI_H_
#define STABCERT_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace stabcert::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvariant = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitConfig = 3;

// Runs one command. args[0] is the program name. Records go to `out`
// unless --out names a file; diagnostics and timing go to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace stabcert::cli

#endif  // STABCERT_TOOLS_CLI_H_
