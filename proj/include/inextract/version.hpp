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

#ifndef INEXTRACT_VERSION_HPP_
#define INEXTRACT_VERSION_HPP_

namespace inextract {

inline constexpr char kToolName[] = "inextract";
inline constexpr char kToolVersion[] = "0.1.0";
inline constexpr int kSchemaVersion = 1;

}  // namespace inextract

#endif  // INEXTRACT_VERSION_HPP_
