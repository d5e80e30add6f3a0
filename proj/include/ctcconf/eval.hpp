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

#ifndef CTCCONF_EVAL_HPP_
#define CTCCONF_EVAL_HPP_

#include <span>
#include <string>
#include <vector>

namespace ctcconf {

struct EvalRecord {
  std::string sample_id;
  double score = 0.0;
  // Predicted label equals the truth and the sample is not a reject.
  bool correct = false;
};

// One operating point: every sample scoring >= threshold is accepted.
// read_rate is the accepted fraction of correct samples, misread_rate the
// accepted fraction of incorrect ones.
struct RocPoint {
  double threshold;
  double read_rate;
  double misread_rate;

  bool operator==(const RocPoint&) const = default;
};

// Thresholds descending. The first point has threshold +inf (nothing
// accepted), then one point per distinct score, so the last point accepts
// everything.
struct RocCurve {
  std::vector<RocPoint> points;
};

// Throws EmptyInput.
double accuracy(std::span<const EvalRecord> records);

// Throws DegenerateDataset unless both classes are present.
RocCurve roc_curve(std::span<const EvalRecord> records);

// Trapezoidal area under read_rate as a function of misread_rate.
double auc(const RocCurve& curve);

// CSV with header threshold,read_rate,misread_rate.
std::string format_roc_csv(const RocCurve& curve);

}  // namespace ctcconf

#endif  // CTCCONF_EVAL_HPP_
