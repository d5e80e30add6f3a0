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

#ifndef CTCCONF_CONFIDENCE_HPP_
#define CTCCONF_CONFIDENCE_HPP_

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "ctcconf/core.hpp"
#include "ctcconf/decoder.hpp"

namespace ctcconf {

class ErrPredictModel;

enum class Method { kRatio, kRaw, kNormalized, kErrPredict };

std::string_view method_name(Method method);
// Accepts "ratio", "raw", "normalized", "errpredict".
std::optional<Method> parse_method(std::string_view name);

struct ScoredPrediction {
  std::string sample_id;
  Label predicted;
  double score = 0.0;
  Method method = Method::kRatio;
};

// 1 - p2 / p1 for the two most probable readings. Throws
// DegenerateDistribution when p1 == 0, InvalidArgument unless p1 >= p2 >= 0.
double ratio_confidence(double p1, double p2);
// Same score from log probabilities; stays accurate when p1 underflows.
double ratio_confidence_log(LogProb log_p1, LogProb log_p2);

// The CTC probability of the top reading, unchanged.
double raw_confidence(double p1);

// Per-frame geometric mean p1^(1/T).
double normalized_confidence(double p1, std::size_t frames);
double normalized_confidence_log(LogProb log_p1, std::size_t frames);

// Closed-form score from decoded hypotheses (best first). A missing second
// hypothesis counts as p2 = 0. Not valid for Method::kErrPredict.
double score_hypotheses(std::span<const Hypothesis> hypotheses, std::size_t frames,
                        Method method);

// Decodes the top two readings with exact rescoring and applies `method`.
// Method::kErrPredict requires `model`.
ScoredPrediction score_sample(std::string sample_id, const Posteriorgram& pg, Method method,
                              DecodeConfig config = {},
                              const ErrPredictModel* model = nullptr);

}  // namespace ctcconf

#endif  // CTCCONF_CONFIDENCE_HPP_
