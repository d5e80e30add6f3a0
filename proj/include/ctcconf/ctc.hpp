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

#ifndef CTCCONF_CTC_HPP_
#define CTCCONF_CTC_HPP_

#include <cstdint>
#include <vector>

#include "ctcconf/core.hpp"
#include "ctcconf/logmath.hpp"

namespace ctcconf {

// Merges repeated classes, then drops blanks.
Label collapse(const Path& path);

// Label with a blank before, between and after every character:
// (-, l1, -, l2, ..., -), length 2|l| + 1.
std::vector<ClassIndex> augment(const Label& label);

// Shortest path length that can collapse to `label`: one frame per
// character plus one separating blank per adjacent repeat.
std::size_t min_frames(const Label& label);

// Sum over frames of log y[t][path[t]]. Throws LengthMismatch.
LogProb path_log_probability(const Posteriorgram& pg, const Path& path);

// log p(label | pg): total probability of every frame path collapsing to
// `label`, by forward recursion over the augmented label in log space.
// Returns kLogZero when no alignment fits in pg.frames().
LogProb label_log_probability(const Posteriorgram& pg, const Label& label);

// Largest classes^frames the enumerator accepts.
inline constexpr std::uint64_t kBruteForcePathLimit = 10'000'000;

// Reference value by explicit enumeration of all classes^frames paths.
// Throws InstanceTooLarge beyond kBruteForcePathLimit.
LogProb label_probability_bruteforce(const Posteriorgram& pg, const Label& label);

struct CtcLoss {
  double nll = 0.0;
  // d nll / d logits, same shape as the logits.
  Matrix grad;
};

// Negative log-likelihood of `label` under row-wise softmax(logits) and its
// gradient with respect to the logits. Throws InfeasibleLabel when no
// alignment exists.
CtcLoss ctc_nll_and_gradient(const Matrix& logits, const Label& label);

// Row-wise softmax of a logit matrix.
Posteriorgram softmax_rows(const Matrix& logits);

}  // namespace ctcconf

#endif  // CTCCONF_CTC_HPP_
