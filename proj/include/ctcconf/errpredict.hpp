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

#ifndef CTCCONF_ERRPREDICT_HPP_
#define CTCCONF_ERRPREDICT_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ctcconf/core.hpp"

namespace ctcconf {

// Per-frame input features derived from a posteriorgram: the C class
// probabilities, the row entropy divided by log C, and the gap between the
// two largest probabilities. F = C + 2.
struct FeatureConfig {
  std::size_t classes = 0;

  std::size_t dim() const { return classes + 2; }
  bool operator==(const FeatureConfig&) const = default;
};

// T x F feature matrix.
using FeatureSequence = Matrix;

// Throws DimensionMismatch when pg.classes() differs from config.classes.
FeatureSequence extract_features(const Posteriorgram& pg, const FeatureConfig& config);

// Stacked bidirectional GRU layers, a scalar projection per frame, mean
// pooling over frames, logistic output. With zero layers the projection
// reads the features directly.
struct ModelShape {
  FeatureConfig features;
  std::size_t hidden = 32;  // per direction
  std::size_t layers = 2;

  std::size_t feature_dim() const { return features.dim(); }
  std::size_t layer_input(std::size_t layer) const {
    return layer == 0 ? feature_dim() : 2 * hidden;
  }
  std::size_t projection_input() const { return layers == 0 ? feature_dim() : 2 * hidden; }
  std::size_t param_count() const;
  bool operator==(const ModelShape&) const = default;
};

// Parameters live in one flat vector:
//   for each layer, for direction forward then backward:
//     W [3H x in]  input weights, gate rows ordered reset, update, candidate
//     U [3H x H]   recurrent weights, same gate order
//     b [3H]       gate biases
//   w [P]          projection weights
//   c              projection bias
class ErrPredictModel {
 public:
  // All parameters zero.
  explicit ErrPredictModel(ModelShape shape, std::uint64_t seed = 0);

  // Uniform in [-s, s], s = 1 / sqrt(fan-in): fan-in is in + H for the
  // gate parameters of a layer and P for the projection.
  static ErrPredictModel initialized(ModelShape shape, std::uint64_t seed);

  const ModelShape& shape() const { return shape_; }
  std::uint64_t seed() const { return seed_; }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  struct GruView {
    std::span<const double> w;
    std::span<const double> u;
    std::span<const double> b;
  };
  GruView gru(std::size_t layer, std::size_t direction) const;
  // Offset of gru(layer, direction).w inside params().
  std::size_t gru_offset(std::size_t layer, std::size_t direction) const;
  std::size_t projection_offset() const;
  std::span<const double> projection_weights() const;
  double projection_bias() const { return params_.back(); }

  bool operator==(const ErrPredictModel&) const = default;

 private:
  ModelShape shape_;
  std::uint64_t seed_ = 0;
  std::vector<double> params_;
};

// Probability that the OCR output is wrong or the sample must be rejected.
double forward(const ErrPredictModel& model, const FeatureSequence& features);

// 1 iff the prediction differs from the truth or the sample is a reject.
int make_target(const Label& truth, const Label& predicted, bool reject);

inline constexpr double kProbabilityClamp = 1e-12;

// Binary cross-entropy with p clamped to [eps, 1 - eps].
double bce_loss(double p, int target);

struct ParamGradient {
  double loss = 0.0;
  double p_err = 0.0;
  std::vector<double> grad;  // same layout as ErrPredictModel::params()
};

// Exact gradient of bce_loss(forward(model, features), target) by
// backpropagation through time. Zero wherever the clamp is active.
ParamGradient gradient(const ErrPredictModel& model, const FeatureSequence& features,
                       int target);

struct TrainConfig {
  double learning_rate = 1e-4;
  std::size_t batch_size = 1;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
  // When > 0, only this fraction of the data (a seeded subset) trains the
  // error predictor.
  double split_fraction = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainingSample {
  Sample sample;
  Label predicted;  // decoder output for sample.posteriorgram
};

struct TrainResult {
  ErrPredictModel model;
  // Mean loss over each epoch's updates, one entry per epoch.
  std::vector<double> loss_history;
  // Indices into the input that trained the model.
  std::vector<std::size_t> used_indices;
};

// Indices of the dedicated subset for `fraction` of `count` samples.
std::vector<std::size_t> select_dedicated_split(std::size_t count, double fraction,
                                                std::uint64_t seed);

// Adam over shuffled mini-batches; deterministic for a given seed.
TrainResult train(std::span<const TrainingSample> data, const TrainConfig& config,
                  std::size_t hidden = 32, std::size_t layers = 2);

// 1 - forward(model, extract_features(pg)).
double errpredict_confidence(const ErrPredictModel& model, const Posteriorgram& pg);

// Checkpoint: "EPM1", u32 LE header length, JSON header, then the
// parameters as f64 LE in the documented order.
std::vector<std::uint8_t> encode_model(const ErrPredictModel& model);
ErrPredictModel decode_model(std::span<const std::uint8_t> bytes);
void save_model(const std::filesystem::path& path, const ErrPredictModel& model);
ErrPredictModel load_model(const std::filesystem::path& path);

}  // namespace ctcconf

#endif  // CTCCONF_ERRPREDICT_HPP_
