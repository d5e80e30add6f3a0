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

#include "ctcconf/ctc.hpp"

#include <cmath>

namespace ctcconf {

namespace {

// Whether the recursion may jump from state s-2 straight to state s.
bool can_skip(const std::vector<ClassIndex>& aug, std::size_t s) {
  return s >= 2 && aug[s] != kBlank && aug[s] != aug[s - 2];
}

// Log-space forward variables over the augmented label. `log_y(t, k)`
// yields log y_t,k. Entry (t, s) is the log mass of all prefixes of length
// t + 1 that end in state s.
template <typename LogEmission>
Matrix forward_variables(const std::vector<ClassIndex>& aug, std::size_t frames,
                         LogEmission&& log_y) {
  const std::size_t states = aug.size();
  Matrix alpha(frames, states, kLogZero);
  alpha(0, 0) = log_y(0, aug[0]);
  if (states > 1) alpha(0, 1) = log_y(0, aug[1]);
  for (std::size_t t = 1; t < frames; ++t) {
    // States below `first` cannot still reach the end in time.
    const std::size_t remaining = frames - t;
    const std::size_t first = states > 2 * remaining ? states - 2 * remaining : 0;
    for (std::size_t s = first; s < states; ++s) {
      double acc = alpha(t - 1, s);
      if (s >= 1) acc = log_add(acc, alpha(t - 1, s - 1));
      if (can_skip(aug, s)) acc = log_add(acc, alpha(t - 1, s - 2));
      if (acc != kLogZero) acc += log_y(t, aug[s]);
      alpha(t, s) = acc;
    }
  }
  return alpha;
}

double final_mass(const Matrix& alpha) {
  const std::size_t last = alpha.rows() - 1;
  const std::size_t states = alpha.cols();
  double total = alpha(last, states - 1);
  if (states > 1) total = log_add(total, alpha(last, states - 2));
  return total;
}

}  // namespace

Label collapse(const Path& path) {
  Label label;
  ClassIndex prev = -1;
  for (ClassIndex k : path.indices) {
    if (k != prev && k != kBlank) label.indices.push_back(k);
    prev = k;
  }
  return label;
}

std::vector<ClassIndex> augment(const Label& label) {
  std::vector<ClassIndex> aug(2 * label.size() + 1, kBlank);
  for (std::size_t i = 0; i < label.size(); ++i) aug[2 * i + 1] = label.indices[i];
  return aug;
}

std::size_t min_frames(const Label& label) {
  std::size_t n = label.size();
  for (std::size_t i = 1; i < label.size(); ++i) {
    if (label.indices[i] == label.indices[i - 1]) ++n;
  }
  return n;
}

LogProb path_log_probability(const Posteriorgram& pg, const Path& path) {
  if (path.size() != pg.frames()) {
    throw LengthMismatch("path has " + std::to_string(path.size()) + " frames, posteriorgram " +
                         std::to_string(pg.frames()));
  }
  double total = 0.0;
  for (std::size_t t = 0; t < path.size(); ++t) {
    const ClassIndex k = path.indices[t];
    if (k < 0 || static_cast<std::size_t>(k) >= pg.classes()) {
      throw IndexOutOfRange("path class " + std::to_string(k) + " at frame " + std::to_string(t));
    }
    const double y = pg(t, static_cast<std::size_t>(k));
    if (y <= 0.0) return kLogZero;
    total += std::log(y);
  }
  return total;
}

LogProb label_log_probability(const Posteriorgram& pg, const Label& label) {
  check_label(label, pg.classes());
  if (min_frames(label) > pg.frames()) return kLogZero;
  const auto aug = augment(label);
  const Matrix alpha = forward_variables(aug, pg.frames(), [&](std::size_t t, ClassIndex k) {
    return safe_log(pg(t, static_cast<std::size_t>(k)));
  });
  return std::min(final_mass(alpha), 0.0);
}

LogProb label_probability_bruteforce(const Posteriorgram& pg, const Label& label) {
  check_label(label, pg.classes());
  const std::size_t frames = pg.frames();
  const std::size_t classes = pg.classes();
  std::uint64_t total_paths = 1;
  for (std::size_t t = 0; t < frames; ++t) {
    if (total_paths > kBruteForcePathLimit / classes) {
      throw InstanceTooLarge(std::to_string(classes) + "^" + std::to_string(frames) +
                             " paths exceed the enumeration limit");
    }
    total_paths *= classes;
  }

  Path path{std::vector<ClassIndex>(frames, 0)};
  double mass = 0.0;
  for (std::uint64_t n = 0; n < total_paths; ++n) {
    if (collapse(path) == label) mass += std::exp(path_log_probability(pg, path));
    // Odometer increment, last frame fastest.
    for (std::size_t t = frames; t-- > 0;) {
      if (static_cast<std::size_t>(++path.indices[t]) < classes) break;
      path.indices[t] = 0;
    }
  }
  return safe_log(mass);
}

Posteriorgram softmax_rows(const Matrix& logits) {
  Matrix probs(logits.rows(), logits.cols());
  for (std::size_t t = 0; t < logits.rows(); ++t) {
    auto in = logits.row(t);
    auto out = probs.row(t);
    double hi = in[0];
    for (double v : in) hi = std::max(hi, v);
    double sum = 0.0;
    for (std::size_t k = 0; k < in.size(); ++k) sum += out[k] = std::exp(in[k] - hi);
    for (double& v : out) v /= sum;
  }
  return Posteriorgram(std::move(probs));
}

CtcLoss ctc_nll_and_gradient(const Matrix& logits, const Label& label) {
  const std::size_t frames = logits.rows();
  const std::size_t classes = logits.cols();
  if (frames == 0 || classes == 0) throw DimensionMismatch("empty logit matrix");
  check_label(label, classes);
  if (min_frames(label) > frames) {
    throw InfeasibleLabel("label needs " + std::to_string(min_frames(label)) +
                          " frames, only " + std::to_string(frames) + " available");
  }

  Matrix log_y(frames, classes);
  for (std::size_t t = 0; t < frames; ++t) {
    auto in = logits.row(t);
    double hi = in[0];
    for (double v : in) hi = std::max(hi, v);
    double sum = 0.0;
    for (double v : in) sum += std::exp(v - hi);
    const double log_norm = hi + std::log(sum);
    for (std::size_t k = 0; k < classes; ++k) log_y(t, k) = in[k] - log_norm;
  }
  auto emit = [&](std::size_t t, ClassIndex k) { return log_y(t, static_cast<std::size_t>(k)); };

  const auto aug = augment(label);
  const std::size_t states = aug.size();
  const Matrix alpha = forward_variables(aug, frames, emit);
  const double log_p = final_mass(alpha);
  if (log_p == kLogZero) throw InfeasibleLabel("label has zero probability");

  // beta(t, s): log mass of emitting frames t+1.. given state s at frame t.
  Matrix beta(frames, states, kLogZero);
  beta(frames - 1, states - 1) = 0.0;
  if (states > 1) beta(frames - 1, states - 2) = 0.0;
  for (std::size_t t = frames - 1; t-- > 0;) {
    for (std::size_t s = 0; s < states; ++s) {
      double acc = beta(t + 1, s) + emit(t + 1, aug[s]);
      if (s + 1 < states) acc = log_add(acc, beta(t + 1, s + 1) + emit(t + 1, aug[s + 1]));
      if (s + 2 < states && can_skip(aug, s + 2)) {
        acc = log_add(acc, beta(t + 1, s + 2) + emit(t + 1, aug[s + 2]));
      }
      beta(t, s) = acc;
    }
  }

  CtcLoss out{-log_p, Matrix(frames, classes)};
  for (std::size_t t = 0; t < frames; ++t) {
    auto g = out.grad.row(t);
    for (std::size_t k = 0; k < classes; ++k) g[k] = std::exp(log_y(t, k));
    for (std::size_t s = 0; s < states; ++s) {
      const double joint = alpha(t, s) + beta(t, s);
      if (joint == kLogZero) continue;
      g[static_cast<std::size_t>(aug[s])] -= std::exp(joint - log_p);
    }
  }
  return out;
}

}  // namespace ctcconf
