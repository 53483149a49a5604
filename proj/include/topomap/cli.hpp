// Copyright 2026 The topomap Authors
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

#ifndef TOPOMAP__CLI_HPP_
#define TOPOMAP__CLI_HPP_

#include <ostream>

namespace topomap
{

enum ExitCode : int
{
  kExitOk = 0,
  kExitInputError = 2,
  kExitValidationError = 3,
  kExitResidualAboveThreshold = 4,
};

/// Entry point of the topomap command line. Output and diagnostics go to
/// the given streams so tests can drive it in-process.
int run_cli(int argc, const char * const * argv, std::ostream & out, std::ostream & err);

}  // namespace topomap

#endif  // TOPOMAP__CLI_HPP_
