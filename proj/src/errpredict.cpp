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

#include "ctcconf/errpredict.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

#include "ctcconf/io.hpp"
#include "ctcconf/kernels.hpp"
#include "ctcconf/rng.hpp"
#include "json.hpp"

namespace ctcconf {

namespace {

enum : std::uint64_t { kInitStream = 1, kSplitStream = 2, kShuffleStream = 3 };

constexpr char kModelMagic[4] = {'E', 'P', 'M', '1'};
constexpr int kModelVersion = 1;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::size_t gru_size(std::size_t in, std::size_t hidden) {
  return 3 * hidden * in + 3 * hidden * hidden + 3 * hidden;
}

// Activations of one direction of one layer, indexed by frame.
struct DirectionTrace {
  Matrix reset;
  Matrix update;
  Matrix candidate;
  Matrix recurrent_candidate;  // (U h_prev) rows of the candidate gate
  Matrix hidden;
};

struct ForwardTrace {
  std::vector<Matrix> layer_outputs;  // T x 2H per layer
  std::vector<std::array<DirectionTrace, 2>> directions;
  double logit = 0.0;
  double p_err = 0.0;
};

const Matrix& layer_input(const ForwardTrace& trace, const FeatureSequence& features,
                          std::size_t layer) {
  return layer == 0 ? features : trace.layer_outputs[layer - 1];
}

// Frame processed right before `t` in the given direction, if any.
std::ptrdiff_t previous_frame(std::size_t t, std::size_t frames, bool reverse) {
  if (!reverse) return static_cast<std::ptrdiff_t>(t) - 1;
  return t + 1 < frames ? static_cast<std::ptrdiff_t>(t + 1) : -1;
}

void run_direction(const ErrPredictModel::GruView& gru, const Matrix& input,
                   std::size_t hidden, bool reverse, DirectionTrace& out) {
  const std::size_t frames = input.rows();
  const std::size_t in = input.cols();
  const std::size_t gates = 3 * hidden;
  out.reset = Matrix(frames, hidden);
  out.update = Matrix(frames, hidden);
  out.candidate = Matrix(frames, hidden);
  out.recurrent_candidate = Matrix(frames, hidden);
  out.hidden = Matrix(frames, hidden);

  const std::vector<double> zeros(hidden, 0.0);
  std::vector<double> pre(gates);
  std::vector<double> rec(gates);
  for (std::size_t step = 0; step < frames; ++step) {
    const std::size_t t = reverse ? frames - 1 - step : step;
    const std::ptrdiff_t prev = previous_frame(t, frames, reverse);
    std::span<const double> h_prev = prev < 0 ? std::span<const double>(zeros)
                                              : out.hidden.row(static_cast<std::size_t>(prev));
    std::copy(gru.b.begin(), gru.b.end(), pre.begin());
    kernels::gemv(gru.w, gates, in, input.row(t), pre);
    std::fill(rec.begin(), rec.end(), 0.0);
    kernels::gemv(gru.u, gates, hidden, h_prev, rec);
    for (std::size_t j = 0; j < hidden; ++j) {
      const double r = sigmoid(pre[j] + rec[j]);
      const double z = sigmoid(pre[hidden + j] + rec[hidden + j]);
      const double n = std::tanh(pre[2 * hidden + j] + r * rec[2 * hidden + j]);
      out.reset(t, j) = r;
      out.update(t, j) = z;
      out.candidate(t, j) = n;
      out.recurrent_candidate(t, j) = rec[2 * hidden + j];
      out.hidden(t, j) = (1.0 - z) * n + z * h_prev[j];
    }
  }
}

ForwardTrace run_forward(const ErrPredictModel& model, const FeatureSequence& features) {
  const ModelShape& shape = model.shape();
  if (features.cols() != shape.feature_dim()) {
    throw DimensionMismatch("features have " + std::to_string(features.cols()) +
                            " columns, model expects " + std::to_string(shape.feature_dim()));
  }
  if (features.rows() == 0) throw DimensionMismatch("feature sequence has no frames");
  const std::size_t frames = features.rows();
  const std::size_t hidden = shape.hidden;

  ForwardTrace trace;
  trace.directions.resize(shape.layers);
  for (std::size_t layer = 0; layer < shape.layers; ++layer) {
    const Matrix& input = layer_input(trace, features, layer);
    auto& dirs = trace.directions[layer];
    for (std::size_t d = 0; d < 2; ++d) {
      run_direction(model.gru(layer, d), input, hidden, d == 1, dirs[d]);
    }
    Matrix output(frames, 2 * hidden);
    for (std::size_t t = 0; t < frames; ++t) {
      auto row = output.row(t);
      std::copy_n(dirs[0].hidden.row(t).begin(), hidden, row.begin());
      std::copy_n(dirs[1].hidden.row(t).begin(), hidden, row.begin() + hidden);
    }
    trace.layer_outputs.push_back(std::move(output));
  }

  const Matrix& top = layer_input(trace, features, shape.layers);
  const auto w = model.projection_weights();
  double sum = 0.0;
  for (std::size_t t = 0; t < frames; ++t) sum += kernels::dot(w, top.row(t));
  trace.logit = sum / static_cast<double>(frames) + model.projection_bias();
  trace.p_err = sigmoid(trace.logit);
  return trace;
}

// Backpropagation through one direction. `d_output` holds dLoss/dh for the
// direction's hidden states (T x H); input gradients accumulate into
// `d_input` when it is non-null.
void backprop_direction(const ErrPredictModel::GruView& gru, const Matrix& input,
                        const DirectionTrace& tr, std::size_t hidden, bool reverse,
                        const Matrix& d_output, std::span<double> grad_w,
                        std::span<double> grad_u, std::span<double> grad_b, Matrix* d_input) {
  const std::size_t frames = input.rows();
  const std::size_t in = input.cols();
  const std::size_t gates = 3 * hidden;
  const std::vector<double> zeros(hidden, 0.0);
  std::vector<double> dh(hidden);
  std::vector<double> dh_carry(hidden, 0.0);
  std::vector<double> d_pre(gates);
  std::vector<double> d_rec(gates);

  for (std::size_t step = frames; step-- > 0;) {
    const std::size_t t = reverse ? frames - 1 - step : step;
    const std::ptrdiff_t prev = previous_frame(t, frames, reverse);
    std::span<const double> h_prev = prev < 0 ? std::span<const double>(zeros)
                                              : tr.hidden.row(static_cast<std::size_t>(prev));
    for (std::size_t j = 0; j < hidden; ++j) dh[j] = d_output(t, j) + dh_carry[j];

    for (std::size_t j = 0; j < hidden; ++j) {
      const double r = tr.reset(t, j);
      const double z = tr.update(t, j);
      const double n = tr.candidate(t, j);
      const double d_n = dh[j] * (1.0 - z);
      const double d_z = dh[j] * (h_prev[j] - n);
      const double d_n_pre = d_n * (1.0 - n * n);
      const double d_r = d_n_pre * tr.recurrent_candidate(t, j);
      d_pre[j] = d_r * r * (1.0 - r);
      d_pre[hidden + j] = d_z * z * (1.0 - z);
      d_pre[2 * hidden + j] = d_n_pre;
      d_rec[j] = d_pre[j];
      d_rec[hidden + j] = d_pre[hidden + j];
      d_rec[2 * hidden + j] = d_n_pre * r;
      dh_carry[j] = dh[j] * z;
    }

    kernels::axpy(1.0, d_pre, grad_b);
    kernels::ger(grad_w, gates, in, d_pre, input.row(t));
    kernels::ger(grad_u, gates, hidden, d_rec, h_prev);
    kernels::gemv_t(gru.u, gates, hidden, d_rec, dh_carry);
    if (d_input != nullptr) kernels::gemv_t(gru.w, gates, in, d_pre, d_input->row(t));
  }
}

}  // namespace

FeatureSequence extract_features(const Posteriorgram& pg, const FeatureConfig& config) {
  if (pg.classes() != config.classes) {
    throw DimensionMismatch("posteriorgram has " + std::to_string(pg.classes()) +
                            " classes, feature config expects " +
                            std::to_string(config.classes));
  }
  const std::size_t classes = pg.classes();
  const double log_classes = classes > 1 ? std::log(static_cast<double>(classes)) : 1.0;
  FeatureSequence out(pg.frames(), config.dim());
  for (std::size_t t = 0; t < pg.frames(); ++t) {
    auto row = pg.row(t);
    auto dst = out.row(t);
    double entropy = 0.0;
    double first = 0.0;
    double second = 0.0;
    for (std::size_t k = 0; k < classes; ++k) {
      const double y = row[k];
      dst[k] = y;
      if (y > 0.0) entropy -= y * std::log(y);
      if (y > first) {
        second = first;
        first = y;
      } else if (y > second) {
        second = y;
      }
    }
    dst[classes] = classes > 1 ? entropy / log_classes : 0.0;
    dst[classes + 1] = first - second;
  }
  return out;
}

std::size_t ModelShape::param_count() const {
  std::size_t n = 0;
  for (std::size_t layer = 0; layer < layers; ++layer) n += 2 * gru_size(layer_input(layer), hidden);
  return n + projection_input() + 1;
}

ErrPredictModel::ErrPredictModel(ModelShape shape, std::uint64_t seed)
    : shape_(shape), seed_(seed), params_(shape.param_count(), 0.0) {
  if (shape_.features.classes == 0) throw InvalidArgument("feature config needs classes");
  if (shape_.layers > 0 && shape_.hidden == 0) throw InvalidArgument("hidden size must be positive");
}

ErrPredictModel ErrPredictModel::initialized(ModelShape shape, std::uint64_t seed) {
  ErrPredictModel model(shape, seed);
  Rng rng = make_stream(seed, kInitStream);
  for (std::size_t layer = 0; layer < shape.layers; ++layer) {
    const std::size_t in = shape.layer_input(layer);
    const double s = 1.0 / std::sqrt(static_cast<double>(in + shape.hidden));
    for (std::size_t d = 0; d < 2; ++d) {
      const std::size_t begin = model.gru_offset(layer, d);
      for (std::size_t i = 0; i < gru_size(in, shape.hidden); ++i) {
        model.params_[begin + i] = uniform(rng, -s, s);
      }
    }
  }
  const double s = 1.0 / std::sqrt(static_cast<double>(shape.projection_input()));
  for (std::size_t i = model.projection_offset(); i < model.params_.size(); ++i) {
    model.params_[i] = uniform(rng, -s, s);
  }
  return model;
}

std::size_t ErrPredictModel::gru_offset(std::size_t layer, std::size_t direction) const {
  std::size_t offset = 0;
  for (std::size_t l = 0; l < layer; ++l) offset += 2 * gru_size(shape_.layer_input(l), shape_.hidden);
  return offset + direction * gru_size(shape_.layer_input(layer), shape_.hidden);
}

ErrPredictModel::GruView ErrPredictModel::gru(std::size_t layer, std::size_t direction) const {
  const std::size_t in = shape_.layer_input(layer);
  const std::size_t h = shape_.hidden;
  const std::span<const double> all(params_);
  const std::size_t off = gru_offset(layer, direction);
  return GruView{all.subspan(off, 3 * h * in), all.subspan(off + 3 * h * in, 3 * h * h),
                 all.subspan(off + 3 * h * in + 3 * h * h, 3 * h)};
}

std::size_t ErrPredictModel::projection_offset() const {
  return gru_offset(shape_.layers, 0);
}

std::span<const double> ErrPredictModel::projection_weights() const {
  return std::span<const double>(params_).subspan(projection_offset(), shape_.projection_input());
}

double forward(const ErrPredictModel& model, const FeatureSequence& features) {
  return run_forward(model, features).p_err;
}

int make_target(const Label& truth, const Label& predicted, bool reject) {
  return (truth != predicted || reject) ? 1 : 0;
}

double bce_loss(double p, int target) {
  const double q = std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
  return target != 0 ? -std::log(q) : -std::log1p(-q);
}

ParamGradient gradient(const ErrPredictModel& model, const FeatureSequence& features,
                       int target) {
  const ForwardTrace trace = run_forward(model, features);
  const ModelShape& shape = model.shape();
  const std::size_t frames = features.rows();
  const std::size_t hidden = shape.hidden;

  ParamGradient out;
  out.p_err = trace.p_err;
  out.loss = bce_loss(trace.p_err, target);
  out.grad.assign(model.params().size(), 0.0);

  const bool clamped =
      trace.p_err < kProbabilityClamp || trace.p_err > 1.0 - kProbabilityClamp;
  const double d_logit = clamped ? 0.0 : trace.p_err - static_cast<double>(target != 0);
  const double d_v = d_logit / static_cast<double>(frames);

  std::span<double> grad(out.grad);
  const std::size_t proj_in = shape.projection_input();
  const std::size_t proj_off = model.projection_offset();
  const Matrix& top = layer_input(trace, features, shape.layers);
  for (std::size_t t = 0; t < frames; ++t) {
    kernels::axpy(d_v, top.row(t), grad.subspan(proj_off, proj_in));
  }
  grad.back() = d_logit;
  if (shape.layers == 0) return out;

  Matrix d_top(frames, proj_in);
  const auto w = model.projection_weights();
  for (std::size_t t = 0; t < frames; ++t) kernels::axpy(d_v, w, d_top.row(t));

  for (std::size_t layer = shape.layers; layer-- > 0;) {
    const Matrix& input = layer_input(trace, features, layer);
    const std::size_t in = input.cols();
    Matrix d_input(layer > 0 ? frames : 0, layer > 0 ? in : 0);
    for (std::size_t d = 0; d < 2; ++d) {
      Matrix d_out(frames, hidden);
      for (std::size_t t = 0; t < frames; ++t) {
        std::copy_n(d_top.row(t).begin() + d * hidden, hidden, d_out.row(t).begin());
      }
      const std::size_t off = model.gru_offset(layer, d);
      auto g_w = grad.subspan(off, 3 * hidden * in);
      auto g_u = grad.subspan(off + 3 * hidden * in, 3 * hidden * hidden);
      auto g_b = grad.subspan(off + 3 * hidden * in + 3 * hidden * hidden, 3 * hidden);
      backprop_direction(model.gru(layer, d), input, trace.directions[layer][d], hidden, d == 1,
                         d_out, g_w, g_u, g_b, layer > 0 ? &d_input : nullptr);
    }
    d_top = std::move(d_input);
  }
  return out;
}

std::vector<std::size_t> select_dedicated_split(std::size_t count, double fraction,
                                                std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw InvalidArgument("dedicated split fraction must lie in (0, 1)");
  }
  const auto size = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(count)));
  if (size == 0) throw EmptyDataset("dedicated split selects no samples");
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  Rng rng = make_stream(seed, kSplitStream);
  shuffle(order, rng);
  order.resize(size);
  std::sort(order.begin(), order.end());
  return order;
}

TrainResult train(std::span<const TrainingSample> data, const TrainConfig& config,
                  std::size_t hidden, std::size_t layers) {
  if (data.empty()) throw EmptyDataset("no training samples");
  if (!(config.learning_rate >= 0.0) || !std::isfinite(config.learning_rate)) {
    throw InvalidArgument("learning rate must be finite and non-negative");
  }
  if (!(config.split_fraction >= 0.0 && config.split_fraction < 1.0)) {
    throw InvalidArgument("split fraction must lie in [0, 1)");
  }
  if (config.batch_size == 0) throw InvalidArgument("batch size must be positive");

  std::vector<std::size_t> used;
  if (config.split_fraction > 0.0) {
    used = select_dedicated_split(data.size(), config.split_fraction, config.seed);
  } else {
    used.resize(data.size());
    for (std::size_t i = 0; i < used.size(); ++i) used[i] = i;
  }

  const FeatureConfig features{data[used.front()].sample.posteriorgram.classes()};
  std::vector<FeatureSequence> inputs;
  std::vector<int> targets;
  inputs.reserve(used.size());
  for (std::size_t i : used) {
    const TrainingSample& s = data[i];
    inputs.push_back(extract_features(s.sample.posteriorgram, features));
    targets.push_back(make_target(s.sample.label, s.predicted, s.sample.reject));
  }

  TrainResult result{ErrPredictModel::initialized(ModelShape{features, hidden, layers}, config.seed),
                     {}, used};
  ErrPredictModel& model = result.model;
  const std::size_t n_params = model.params().size();
  std::vector<double> m(n_params, 0.0);
  std::vector<double> v(n_params, 0.0);
  std::vector<double> batch_grad(n_params);
  std::uint64_t step = 0;

  Rng order_rng = make_stream(config.seed, kShuffleStream);
  std::vector<std::size_t> order(inputs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(order, order_rng);
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      std::fill(batch_grad.begin(), batch_grad.end(), 0.0);
      for (std::size_t i = begin; i < end; ++i) {
        const ParamGradient g = gradient(model, inputs[order[i]], targets[order[i]]);
        epoch_loss += g.loss;
        kernels::axpy(1.0, g.grad, batch_grad);
      }
      const double scale = 1.0 / static_cast<double>(end - begin);
      for (double& g : batch_grad) g *= scale;
      ++step;
      const kernels::AdamStep adam{
          config.learning_rate,
          config.beta1,
          config.beta2,
          config.epsilon,
          1.0 - std::pow(config.beta1, static_cast<double>(step)),
          1.0 - std::pow(config.beta2, static_cast<double>(step)),
      };
      kernels::adam_update(model.params(), batch_grad, m, v, adam);
    }
    result.loss_history.push_back(epoch_loss / static_cast<double>(order.size()));
  }
  return result;
}

double errpredict_confidence(const ErrPredictModel& model, const Posteriorgram& pg) {
  return 1.0 - forward(model, extract_features(pg, model.shape().features));
}

std::vector<std::uint8_t> encode_model(const ErrPredictModel& model) {
  const ModelShape& shape = model.shape();
  nlohmann::ordered_json header;
  header["format"] = "EPM1";
  header["version"] = kModelVersion;
  header["feature_dim"] = shape.feature_dim();
  header["hidden"] = shape.hidden;
  header["layers"] = shape.layers;
  header["features"] = {{"kind", "posterior_stats"}, {"classes", shape.features.classes}};
  header["seed"] = model.seed();
  header["param_count"] = model.params().size();
  header["param_order"] =
      "per layer, per direction (forward, backward): W[3H x in], U[3H x H], b[3H], gate rows "
      "reset/update/candidate; then projection w[P], projection bias";
  const std::string text = header.dump();

  std::vector<std::uint8_t> out(std::begin(kModelMagic), std::end(kModelMagic));
  const auto len = static_cast<std::uint32_t>(text.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(len >> (8 * i)));
  out.insert(out.end(), text.begin(), text.end());
  for (double p : model.params()) {
    const auto bits = std::bit_cast<std::uint64_t>(p);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  return out;
}

ErrPredictModel decode_model(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || !std::equal(std::begin(kModelMagic), std::end(kModelMagic),
                                      bytes.begin())) {
    throw FormatError("not an EPM1 model checkpoint");
  }
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(bytes[4 + i]) << (8 * i);
  if (bytes.size() < 8 + static_cast<std::size_t>(len)) throw FormatError("truncated model header");
  ModelShape shape;
  std::uint64_t seed = 0;
  std::size_t count = 0;
  try {
    const auto header = nlohmann::json::parse(bytes.begin() + 8, bytes.begin() + 8 + len);
    if (header.at("version").get<int>() != kModelVersion) {
      throw FormatError("unsupported model version");
    }
    shape.features.classes = header.at("features").at("classes").get<std::size_t>();
    shape.hidden = header.at("hidden").get<std::size_t>();
    shape.layers = header.at("layers").get<std::size_t>();
    seed = header.at("seed").get<std::uint64_t>();
    count = header.at("param_count").get<std::size_t>();
    if (header.at("feature_dim").get<std::size_t>() != shape.feature_dim()) {
      throw FormatError("feature_dim disagrees with feature config");
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model header: ") + e.what());
  }
  ErrPredictModel model(shape, seed);
  if (count != model.params().size()) throw FormatError("parameter count disagrees with shape");
  const std::size_t payload = 8 + len;
  if (bytes.size() != payload + 8 * count) throw FormatError("model payload size mismatch");
  auto params = model.params();
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<std::uint64_t>(bytes[payload + 8 * i + b]) << (8 * b);
    }
    params[i] = std::bit_cast<double>(bits);
    if (!std::isfinite(params[i])) throw FormatError("non-finite model parameter");
  }
  return model;
}

void save_model(const std::filesystem::path& path, const ErrPredictModel& model) {
  write_binary_file(path, encode_model(model));
}

ErrPredictModel load_model(const std::filesystem::path& path) {
  return decode_model(read_binary_file(path));
}

}  // namespace ctcconf
