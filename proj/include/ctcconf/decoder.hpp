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

#ifndef CTCCONF_DECODER_HPP_
#define CTCCONF_DECODER_HPP_

#include <cstddef>
#include <vector>

#include "ctcconf/core.hpp"
#include "ctcconf/logmath.hpp"

namespace ctcconf {

struct Hypothesis {
  Label label;
  LogProb log_prob = kLogZero;

  bool operator==(const Hypothesis&) const = default;
};

// Result ordering: higher log_prob first, then lexicographically smaller
// label.
bool hypothesis_before(const Hypothesis& a, const Hypothesis& b);

struct DecodeConfig {
  std::size_t beam_width = 100;
  std::size_t k = 2;
  // Rescore every prefix left in the final beam exactly and keep the best k.
  bool exact_rescoring = true;
};

// Best single path: per-frame argmax (lowest index on ties), collapsed.
// log_prob is that one path's probability.
Hypothesis greedy_decode(const Posteriorgram& pg);

// Prefix beam search. Each prefix carries its blank-ending and
// non-blank-ending mass; at most `beam_width` prefixes survive each frame.
// Returns up to k distinct labels with nonzero mass, best first. Throws
// InvalidArgument unless 1 <= k <= beam_width.
std::vector<Hypothesis> beam_search_topk(const Posteriorgram& pg, std::size_t beam_width = 100,
                                         std::size_t k = 2);

// Replaces every log_prob by label_log_probability and re-sorts.
std::vector<Hypothesis> rescore_exact(const Posteriorgram& pg,
                                      std::vector<Hypothesis> hypotheses);

// Top-k labels. With exact_rescoring, every prefix surviving the search is
// rescored and the k best by exact probability are returned; otherwise the
// beam masses of the top-k are returned unchanged.
std::vector<Hypothesis> decode_topk(const Posteriorgram& pg, const DecodeConfig& config);

}  // namespace ctcconf

#endif  // CTCCONF_DECODER_HPP_
