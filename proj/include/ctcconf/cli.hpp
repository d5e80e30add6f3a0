/* Copyright 2026 The ctcconf Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef CTCCONF_CLI_HPP_
#define CTCCONF_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace ctcconf {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitIo = 3;

// Runs one subcommand (synth, decode, score, train, eval). `args` excludes
// the program name. Every run writes a JSON run summary next to its main
// output and echoes it to `out`; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ctcconf

#endif  // CTCCONF_CLI_HPP_
