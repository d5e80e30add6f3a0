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

#include "ctcconf/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ctcconf/errors.hpp"
#include "ctcconf/io.hpp"

namespace ctcconf {

double accuracy(std::span<const EvalRecord> records) {
  if (records.empty()) throw EmptyInput("accuracy of an empty record set");
  const auto n_correct = std::count_if(records.begin(), records.end(),
                                       [](const EvalRecord& r) { return r.correct; });
  return static_cast<double>(n_correct) / static_cast<double>(records.size());
}

RocCurve roc_curve(std::span<const EvalRecord> records) {
  std::vector<const EvalRecord*> sorted;
  sorted.reserve(records.size());
  std::size_t positives = 0;
  for (const EvalRecord& r : records) {
    if (std::isnan(r.score)) throw InvalidArgument("NaN score for sample " + r.sample_id);
    sorted.push_back(&r);
    positives += r.correct ? 1 : 0;
  }
  const std::size_t negatives = records.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw DegenerateDataset("ROC needs both correct and incorrect samples");
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const EvalRecord* a, const EvalRecord* b) { return a->score > b->score; });

  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t accepted_correct = 0;
  std::size_t accepted_wrong = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    // A block of equal scores crosses the threshold together.
    const double threshold = sorted[i]->score;
    for (; i < sorted.size() && sorted[i]->score == threshold; ++i) {
      (sorted[i]->correct ? accepted_correct : accepted_wrong) += 1;
    }
    curve.points.push_back({threshold,
                            static_cast<double>(accepted_correct) / static_cast<double>(positives),
                            static_cast<double>(accepted_wrong) / static_cast<double>(negatives)});
  }
  return curve;
}

double auc(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const RocPoint& a = curve.points[i - 1];
    const RocPoint& b = curve.points[i];
    area += (b.misread_rate - a.misread_rate) * (a.read_rate + b.read_rate) / 2.0;
  }
  return area;
}

std::string format_roc_csv(const RocCurve& curve) {
  std::string out = "threshold,read_rate,misread_rate\n";
  for (const RocPoint& p : curve.points) {
    out += format_csv_row({format_double(p.threshold), format_double(p.read_rate),
                           format_double(p.misread_rate)});
  }
  return out;
}

}  // namespace ctcconf
