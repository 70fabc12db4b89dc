// Copyright 2026 The trkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Kept in the library so tests can drive it
// in-process.

#ifndef TRKIT_CLI_HPP_
#define TRKIT_CLI_HPP_

#include <iosfwd>
#include <span>
#include <string>

namespace trkit {

enum ExitCode : int {
  kExitOk = 0,
  kExitSchema = 2,     // malformed input, bad flags, unparseable records
  kExitInvariant = 3,  // a checked property failed
  kExitIo = 4,
};

// Environment variable naming the default TOML config file.
inline constexpr const char* kConfigEnvVar = "TRKIT_CONFIG";

// `args` excludes the program name.
int run_cli(std::span<const std::string> args, std::ostream& out,
            std::ostream& err);

}  // namespace trkit

#endif  // TRKIT_CLI_HPP_
