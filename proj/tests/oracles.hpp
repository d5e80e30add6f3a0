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

// Independent reference computations for the tests. Nothing here calls the
// library's CTC, decoder or evaluation code.

#ifndef CTCCONF_TESTS_ORACLES_HPP_
#define CTCCONF_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "ctcconf/core.hpp"
#include "ctcconf/rng.hpp"

namespace oracle {

using ctcconf::ClassIndex;
using ctcconf::Label;
using ctcconf::Matrix;
using ctcconf::Posteriorgram;

// Rows drawn from a flat Dirichlet, optionally sharpened by raising each
// entry to `power` before normalizing.
inline Posteriorgram random_posteriorgram(ctcconf::Rng& rng, std::size_t frames,
                                          std::size_t classes, double power = 1.0) {
  Matrix m(frames, classes);
  for (std::size_t t = 0; t < frames; ++t) {
    double sum = 0.0;
    for (std::size_t k = 0; k < classes; ++k) {
      const double e = -std::log(1.0 - ctcconf::uniform01(rng));
      m(t, k) = std::pow(e, power);
      sum += m(t, k);
    }
    for (std::size_t k = 0; k < classes; ++k) m(t, k) /= sum;
  }
  return Posteriorgram(std::move(m));
}

inline Matrix random_matrix(ctcconf::Rng& rng, std::size_t rows, std::size_t cols,
                            double scale = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = ctcconf::uniform(rng, -scale, scale);
  return m;
}

// Merge runs, then drop blanks (class 0).
inline Label collapse(const std::vector<ClassIndex>& path) {
  Label out;
  ClassIndex prev = -1;
  for (ClassIndex k : path) {
    if (k != prev && k != 0) out.indices.push_back(k);
    prev = k;
  }
  return out;
}

// Every path of the posteriorgram, accumulated per collapsed label in
// linear space.
inline std::map<Label, double> label_distribution(const Posteriorgram& pg) {
  const std::size_t frames = pg.frames();
  const std::size_t classes = pg.classes();
  std::map<Label, double> out;
  std::vector<ClassIndex> path(frames, 0);
  while (true) {
    double p = 1.0;
    for (std::size_t t = 0; t < frames; ++t) p *= pg(t, static_cast<std::size_t>(path[t]));
    out[collapse(path)] += p;
    std::size_t t = 0;
    while (t < frames && ++path[t] == static_cast<ClassIndex>(classes)) path[t++] = 0;
    if (t == frames) break;
  }
  return out;
}

// All labels over classes 1..classes-1 with length <= max_length.
inline std::vector<Label> all_labels(std::size_t classes, std::size_t max_length) {
  std::vector<Label> out{Label{}};
  std::vector<Label> frontier{Label{}};
  for (std::size_t len = 1; len <= max_length; ++len) {
    std::vector<Label> next;
    for (const Label& l : frontier) {
      for (std::size_t k = 1; k < classes; ++k) {
        Label e = l;
        e.indices.push_back(static_cast<ClassIndex>(k));
        next.push_back(e);
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

struct Reading {
  Label label;
  double prob;
};

// Top-k labels with nonzero mass: probability descending, then label
// ascending.
inline std::vector<Reading> topk(const Posteriorgram& pg, std::size_t k) {
  std::vector<Reading> all;
  for (const auto& [label, p] : label_distribution(pg)) {
    if (p > 0.0) all.push_back({label, p});
  }
  std::sort(all.begin(), all.end(), [](const Reading& a, const Reading& b) {
    return a.prob != b.prob ? a.prob > b.prob : a.label < b.label;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

// Probability that a random positive outscores a random negative, ties
// counting one half, by direct pair counting.
inline double mann_whitney(const std::vector<double>& positives,
                           const std::vector<double>& negatives) {
  double wins = 0.0;
  for (double p : positives) {
    for (double n : negatives) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  }
  return wins / (static_cast<double>(positives.size()) * static_cast<double>(negatives.size()));
}

// Central difference of f with respect to x[i].
inline double central_difference(const std::function<double()>& f, double& x, double step) {
  const double saved = x;
  x = saved + step;
  const double up = f();
  x = saved - step;
  const double down = f();
  x = saved;
  return (up - down) / (2.0 * step);
}

inline double relative_error(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace oracle

#endif  // CTCCONF_TESTS_ORACLES_HPP_
