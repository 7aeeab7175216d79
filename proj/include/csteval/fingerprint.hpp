// Copyright 2026 The csteval Authors
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

#ifndef CSTEVAL_FINGERPRINT_HPP_
#define CSTEVAL_FINGERPRINT_HPP_

#include <cstdint>
#include <string>
#include <string_view>

namespace csteval {

// FNV-1a over the bytes of `data`.
uint64_t fnv1a64(std::string_view data);

// 16 lowercase hex digits; used to stamp run artifacts with the exact
// configuration that produced them.
std::string fingerprint_hex(std::string_view canonical_config);

}  // namespace csteval

#endif  // CSTEVAL_FINGERPRINT_HPP_
