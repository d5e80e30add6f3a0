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

#include "ctcconf/confidence.hpp"

#include <algorithm>
#include <cmath>

#include "ctcconf/errpredict.hpp"

namespace ctcconf {

std::string_view method_name(Method method) {
  switch (method) {
    case Method::kRatio:
      return "ratio";
    case Method::kRaw:
      return "raw";
    case Method::kNormalized:
      return "normalized";
    case Method::kErrPredict:
      return "errpredict";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::kRatio, Method::kRaw, Method::kNormalized, Method::kErrPredict}) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

double ratio_confidence(double p1, double p2) {
  if (p1 == 0.0) throw DegenerateDistribution("no reading has nonzero probability");
  if (!(p1 >= p2 && p2 >= 0.0 && p1 <= 1.0)) {
    throw InvalidArgument("ratio confidence needs 1 >= p1 >= p2 >= 0");
  }
  return 1.0 - p2 / p1;
}

double ratio_confidence_log(LogProb log_p1, LogProb log_p2) {
  if (log_p1 == kLogZero) throw DegenerateDistribution("no reading has nonzero probability");
  if (!(log_p1 >= log_p2) || log_p1 > 0.0) {
    throw InvalidArgument("ratio confidence needs 0 >= log_p1 >= log_p2");
  }
  return -std::expm1(log_p2 - log_p1);
}

double raw_confidence(double p1) {
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw InvalidArgument("probability outside [0, 1]");
  return p1;
}

double normalized_confidence(double p1, std::size_t frames) {
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw InvalidArgument("probability outside [0, 1]");
  if (frames == 0) throw InvalidArgument("frame count must be positive");
  return std::pow(p1, 1.0 / static_cast<double>(frames));
}

double normalized_confidence_log(LogProb log_p1, std::size_t frames) {
  if (frames == 0) throw InvalidArgument("frame count must be positive");
  if (log_p1 > 0.0) throw InvalidArgument("log probability above 0");
  return std::exp(log_p1 / static_cast<double>(frames));
}

double score_hypotheses(std::span<const Hypothesis> hypotheses, std::size_t frames,
                        Method method) {
  const LogProb log_p1 = hypotheses.empty() ? kLogZero : hypotheses[0].log_prob;
  const LogProb log_p2 = hypotheses.size() < 2 ? kLogZero : hypotheses[1].log_prob;
  switch (method) {
    case Method::kRatio:
      return ratio_confidence_log(log_p1, log_p2);
    case Method::kRaw:
      return raw_confidence(std::exp(log_p1));
    case Method::kNormalized:
      return normalized_confidence_log(log_p1, frames);
    case Method::kErrPredict:
      break;
  }
  throw InvalidArgument("errpredict scores need a trained model");
}

ScoredPrediction score_sample(std::string sample_id, const Posteriorgram& pg, Method method,
                              DecodeConfig config, const ErrPredictModel* model) {
  config.k = std::max<std::size_t>(config.k, 2);
  config.beam_width = std::max(config.beam_width, config.k);
  const auto hyps = decode_topk(pg, config);
  ScoredPrediction out;
  out.sample_id = std::move(sample_id);
  out.method = method;
  if (!hyps.empty()) out.predicted = hyps.front().label;
  if (method == Method::kErrPredict) {
    if (model == nullptr) throw InvalidArgument("errpredict scores need a trained model");
    out.score = errpredict_confidence(*model, pg);
  } else {
    out.score = score_hypotheses(hyps, pg.frames(), method);
  }
  return out;
}

}  // namespace ctcconf
