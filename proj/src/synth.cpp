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

#include "ctcconf/synth.hpp"

#include <cmath>
#include <cstdio>

#include "ctcconf/io.hpp"
#include "json.hpp"

namespace ctcconf {

namespace {

constexpr std::string_view kSynthCharacters =
    "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

// Stream 0 of the master seed picks the reject samples; sample i uses
// stream kSampleStreamBase + i.
constexpr std::uint64_t kRejectStream = 0;
constexpr std::uint64_t kSampleStreamBase = 16;

std::string_view style_name(RejectStyle style) {
  switch (style) {
    case RejectStyle::kNoise:
      return "noise";
    case RejectStyle::kMixed:
      return "mixed";
    case RejectStyle::kBoth:
      return "both";
  }
  return "noise";
}

std::string sample_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "s%06zu", i);
  return buf;
}

}  // namespace

void validate_config(const SynthConfig& c) {
  if (c.alphabet_size == 0 || c.alphabet_size > kSynthCharacters.size()) {
    throw InvalidArgument("alphabet_size must lie in [1, " +
                          std::to_string(kSynthCharacters.size()) + "]");
  }
  if (c.min_length > c.max_length) throw InvalidArgument("empty label length range");
  if (c.min_dwell > c.max_dwell) throw InvalidArgument("empty dwell range");
  if (!(c.sharpness > 0.0 && c.sharpness <= 1.0)) {
    throw InvalidArgument("sharpness must lie in (0, 1]");
  }
  if (!(c.confusion >= 0.0 && c.confusion < 1.0)) {
    throw InvalidArgument("confusion must lie in [0, 1)");
  }
  if (!(c.reject_fraction >= 0.0 && c.reject_fraction < 1.0)) {
    throw InvalidArgument("reject_fraction must lie in [0, 1)");
  }
  if (c.min_dwell == 0) {
    throw InfeasibleConfig("zero-frame segments cannot realize every label");
  }
  if (c.reject_fraction > 0.0 && c.reject_style != RejectStyle::kNoise &&
      c.alphabet_size == 1 && c.min_length == c.max_length) {
    throw InfeasibleConfig("mixed rejects need two distinct labels");
  }
}

SynthConfig parse_synth_config(std::string_view json_text) {
  SynthConfig c;
  try {
    const auto j = nlohmann::json::parse(json_text);
    if (!j.is_object()) throw FormatError("synth config must be a JSON object");
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("alphabet_size", c.alphabet_size);
    get("min_length", c.min_length);
    get("max_length", c.max_length);
    get("min_dwell", c.min_dwell);
    get("max_dwell", c.max_dwell);
    get("sharpness", c.sharpness);
    get("confusion", c.confusion);
    get("reject_fraction", c.reject_fraction);
    get("seed", c.seed);
    if (j.contains("reject_style")) {
      const auto style = j.at("reject_style").get<std::string>();
      if (style == "noise") {
        c.reject_style = RejectStyle::kNoise;
      } else if (style == "mixed") {
        c.reject_style = RejectStyle::kMixed;
      } else if (style == "both") {
        c.reject_style = RejectStyle::kBoth;
      } else {
        throw InvalidArgument("unknown reject_style '" + style + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("synth config: ") + e.what());
  }
  return c;
}

std::string format_synth_config(const SynthConfig& c) {
  nlohmann::ordered_json j;
  j["alphabet_size"] = c.alphabet_size;
  j["min_length"] = c.min_length;
  j["max_length"] = c.max_length;
  j["min_dwell"] = c.min_dwell;
  j["max_dwell"] = c.max_dwell;
  j["sharpness"] = c.sharpness;
  j["confusion"] = c.confusion;
  j["reject_fraction"] = c.reject_fraction;
  j["reject_style"] = style_name(c.reject_style);
  j["seed"] = c.seed;
  return j.dump();
}

Alphabet synth_alphabet(std::size_t size) {
  if (size == 0 || size > kSynthCharacters.size()) {
    throw InvalidArgument("synthetic alphabet size out of range");
  }
  return Alphabet::FromString(kSynthCharacters.substr(0, size));
}

Label random_label(const SynthConfig& config, Rng& rng) {
  const auto length = static_cast<std::size_t>(uniform_int(
      rng, static_cast<std::int64_t>(config.min_length), static_cast<std::int64_t>(config.max_length)));
  Label label;
  for (std::size_t i = 0; i < length; ++i) {
    label.indices.push_back(
        static_cast<ClassIndex>(uniform_int(rng, 1, static_cast<std::int64_t>(config.alphabet_size))));
  }
  return label;
}

Path canonical_path(const Label& label, const SynthConfig& config, Rng& rng) {
  if (config.min_dwell == 0) throw InfeasibleConfig("zero-frame segments cannot realize the label");
  Path path;
  auto segment = [&](ClassIndex k) {
    const auto dwell = uniform_int(rng, static_cast<std::int64_t>(config.min_dwell),
                                   static_cast<std::int64_t>(config.max_dwell));
    path.indices.insert(path.indices.end(), static_cast<std::size_t>(dwell), k);
  };
  segment(kBlank);
  for (ClassIndex k : label.indices) {
    segment(k);
    segment(kBlank);
  }
  return path;
}

Posteriorgram synth_posteriorgram(const Label& label, const SynthConfig& config, Rng& rng) {
  if (label.size() < config.min_length || label.size() > config.max_length) {
    throw InvalidArgument("label length outside the configured range");
  }
  const std::size_t classes = config.alphabet_size + 1;
  check_label(label, classes);
  const Path path = canonical_path(label, config, rng);
  const double rest = classes > 1 ? (1.0 - config.sharpness) / static_cast<double>(classes - 1) : 0.0;
  Matrix probs(path.size(), classes, rest);
  for (std::size_t t = 0; t < path.size(); ++t) {
    auto k = static_cast<std::size_t>(path.indices[t]);
    if (classes > 1 && uniform01(rng) < config.confusion) {
      // A uniform share of the peak moves to any class but the intended
      // one; a share of 1 is a full swap.
      const auto shift = 1 + uniform_below(rng, classes - 1);
      const auto wrong = (k + shift) % classes;
      const double u = uniform01(rng);
      probs(t, wrong) = rest + u * (config.sharpness - rest);
      probs(t, k) = rest + (1 - u) * (config.sharpness - rest);
      continue;
    }
    probs(t, k) = config.sharpness;
  }
  return Posteriorgram(std::move(probs));
}

Posteriorgram noise_posteriorgram(std::size_t frames, std::size_t classes, Rng& rng) {
  // Flat Dirichlet rows: normalized unit exponentials.
  Matrix probs(frames, classes);
  for (std::size_t t = 0; t < frames; ++t) {
    auto row = probs.row(t);
    double sum = 0.0;
    for (double& v : row) sum += v = -std::log(1.0 - uniform01(rng));
    for (double& v : row) v /= sum;
  }
  return Posteriorgram(std::move(probs));
}

Posteriorgram mixed_posteriorgram(const Label& first, const Label& second,
                                  const SynthConfig& config, Rng& rng) {
  const Posteriorgram a = synth_posteriorgram(first, config, rng);
  const Posteriorgram b = synth_posteriorgram(second, config, rng);
  const std::size_t frames = std::max(a.frames(), b.frames());
  Matrix probs(frames, a.classes());
  for (std::size_t t = 0; t < frames; ++t) {
    auto ra = a.row(std::min(t, a.frames() - 1));
    auto rb = b.row(std::min(t, b.frames() - 1));
    for (std::size_t k = 0; k < a.classes(); ++k) probs(t, k) = 0.5 * (ra[k] + rb[k]);
  }
  return Posteriorgram(std::move(probs));
}

std::vector<Sample> generate_samples(const SynthConfig& config, std::size_t n) {
  validate_config(config);
  if (n == 0) throw InvalidArgument("sample count must be positive");
  const auto n_reject = static_cast<std::size_t>(
      std::floor(config.reject_fraction * static_cast<double>(n)));

  // reject_rank[i] = ordinal among rejects, or n when sample i is clean.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng reject_rng = make_stream(config.seed, kRejectStream);
  shuffle(order, reject_rng);
  std::vector<std::size_t> reject_rank(n, n);
  for (std::size_t r = 0; r < n_reject; ++r) reject_rank[order[r]] = r;

  const std::size_t classes = config.alphabet_size + 1;
  std::vector<Sample> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = make_stream(config.seed, kSampleStreamBase + i);
    Label label = random_label(config, rng);
    if (reject_rank[i] == n) {
      Posteriorgram pg = synth_posteriorgram(label, config, rng);
      samples.push_back(Sample{sample_id(i), std::move(pg), std::move(label), false});
      continue;
    }
    const bool noise = config.reject_style == RejectStyle::kNoise ||
                       (config.reject_style == RejectStyle::kBoth && reject_rank[i] % 2 == 0);
    if (noise) {
      const std::size_t frames = canonical_path(label, config, rng).size();
      Posteriorgram pg = noise_posteriorgram(frames, classes, rng);
      samples.push_back(Sample{sample_id(i), std::move(pg), std::move(label), true});
    } else {
      Label other;
      do {
        other = random_label(config, rng);
      } while (other == label);
      Posteriorgram pg = mixed_posteriorgram(label, other, config, rng);
      samples.push_back(Sample{sample_id(i), std::move(pg), std::move(label), true});
    }
  }
  return samples;
}

std::filesystem::path generate_dataset(const SynthConfig& config, std::size_t n,
                                       const std::filesystem::path& out_dir) {
  const std::vector<Sample> samples = generate_samples(config, n);
  const Alphabet alphabet = synth_alphabet(config.alphabet_size);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<ManifestEntry> entries;
  entries.reserve(samples.size());
  for (const Sample& s : samples) {
    const std::string file = s.id + ".cpg";
    write_cpg(out_dir / file, s.posteriorgram);
    entries.push_back(ManifestEntry{s.id, file, decode_label(s.label, alphabet), s.reject});
  }
  write_alphabet(out_dir / "alphabet.json", alphabet);
  const auto manifest = out_dir / "manifest.jsonl";
  write_manifest(manifest, entries);
  return manifest;
}

}  // namespace ctcconf
