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

// Reference oracle for edit distance, used to cross-check the production
// dynamic program. Iterative-deepening search over edit scripts instead of
// a table, so the two implementations share no code and no recurrence.

#ifndef CSTEVAL_TESTS_ORACLES_HPP_
#define CSTEVAL_TESTS_ORACLES_HPP_

#include <cstddef>
#include <string>

namespace csteval_test {

// True when `a` can be rewritten into `b` with at most `budget` edits
// (insert, delete, substitute; unit cost). Equal leading symbols are
// consumed without spending budget: if any script within budget exists,
// one that matches equal heads exists too (swap the edit touching the
// matching head for a match; the cost never rises). The only prune is the
// exact length-difference lower bound; everything else is explored.
inline bool editable_within(const char* a, std::size_t na, const char* b, std::size_t nb,
                            std::size_t budget) {
  for (;;) {
    std::size_t diff = na > nb ? na - nb : nb - na;
    if (diff > budget) return false;
    if (na == 0 || nb == 0) return true;  // insert or delete the remainder
    if (*a != *b) break;
    ++a, --na, ++b, --nb;
  }
  if (budget == 0) return false;
  return editable_within(a + 1, na - 1, b + 1, nb - 1, budget - 1) ||  // substitute
         editable_within(a + 1, na - 1, b, nb, budget - 1) ||          // delete a[0]
         editable_within(a, na, b + 1, nb - 1, budget - 1);            // insert b[0]
}

// Minimum edit-script cost by iterative deepening: the first budget that
// admits a script is the distance.
inline std::size_t oracle_edit_distance(const std::string& a, const std::string& b) {
  for (std::size_t budget = 0;; ++budget) {
    if (editable_within(a.data(), a.size(), b.data(), b.size(), budget)) return budget;
  }
}

}  // namespace csteval_test

#endif  // CSTEVAL_TESTS_ORACLES_HPP_
