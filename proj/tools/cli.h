/* Copyright 2026 The algaeval Authors. All Rights Reserved.

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

#ifndef ALGAEVAL_TOOLS_CLI_H_
#define ALGAEVAL_TOOLS_CLI_H_

namespace algaeval::cli {

// Stable exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitBackendFailure = 3;
inline constexpr int kExitPartialFailure = 4;

int Main(int argc, char** argv);

}  // namespace algaeval::cli

#endif  // ALGAEVAL_TOOLS_CLI_H_
