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

#ifndef CSTEVAL_UNICODE_DATA_HPP_
#define CSTEVAL_UNICODE_DATA_HPP_

#include <cstddef>
#include <cstdint>

// Raw tables backing unicode.hpp, generated by tools/gen_unicode_data.py.

namespace csteval::uni {

struct CombiningClassEntry {
  uint32_t cp;
  uint8_t ccc;
};

struct DecompositionEntry {
  uint32_t cp;
  uint32_t first;
  uint32_t second;  // 0 for singleton decompositions
};

struct CompositionEntry {
  uint32_t first;
  uint32_t second;
  uint32_t composed;
};

struct CodepointRange {
  uint32_t lo;
  uint32_t hi;
};

struct CaseFoldEntry {
  uint32_t cp;
  uint32_t lower;
};

extern const CombiningClassEntry kCombiningClasses[];
extern const std::size_t kCombiningClassCount;

extern const DecompositionEntry kDecompositions[];
extern const std::size_t kDecompositionCount;

extern const CompositionEntry kCompositions[];
extern const std::size_t kCompositionCount;

extern const CodepointRange kLetters[];
extern const std::size_t kLettersCount;

extern const CodepointRange kDecimalDigits[];
extern const std::size_t kDecimalDigitsCount;

extern const CodepointRange kWhitespace[];
extern const std::size_t kWhitespaceCount;

extern const CodepointRange kPictographic[];
extern const std::size_t kPictographicCount;

extern const CaseFoldEntry kLatinLowercase[];
extern const std::size_t kLatinLowercaseCount;

}  // namespace csteval::uni

#endif  // CSTEVAL_UNICODE_DATA_HPP_
