// Copyright 2026 The Inextract Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef INEXTRACT_TOOLS_CLI_HPP_
#define INEXTRACT_TOOLS_CLI_HPP_

#include <ostream>

namespace inextract::cli {

// Runs the command line in-process. Exit status: 0 success (or audit
// satisfied), 2 audit violated, 1 usage or input error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace inextract::cli

#endif  // INEXTRACT_TOOLS_CLI_HPP_
