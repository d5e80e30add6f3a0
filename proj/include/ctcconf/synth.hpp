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

#ifndef CTCCONF_SYNTH_HPP_
#define CTCCONF_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ctcconf/core.hpp"
#include "ctcconf/rng.hpp"

namespace ctcconf {

enum class RejectStyle {
  kNoise,  // every frame an independent random distribution
  kMixed,  // frame-wise average of two different labels' clean posteriorgrams
  kBoth,   // alternates noise and mixed over the reject samples
};

struct SynthConfig {
  std::size_t alphabet_size = 10;
  std::size_t min_length = 3;
  std::size_t max_length = 8;
  // Frames per path segment (each character and each blank gap).
  std::size_t min_dwell = 1;
  std::size_t max_dwell = 3;
  // Mass on the intended class of every frame; the rest is spread evenly.
  double sharpness = 0.9;
  // Per-frame probability that a uniform share of the intended mass moves
  // to a random other class.
  double confusion = 0.05;
  double reject_fraction = 0.0;
  RejectStyle reject_style = RejectStyle::kNoise;
  std::uint64_t seed = 0;
};

// Throws InvalidArgument for out-of-range values and InfeasibleConfig when
// dwell times cannot realize a label.
void validate_config(const SynthConfig& config);

// JSON object with the SynthConfig field names; missing fields keep their
// defaults. reject_style is "noise", "mixed" or "both".
SynthConfig parse_synth_config(std::string_view json_text);
std::string format_synth_config(const SynthConfig& config);

// Digits, then lowercase, then uppercase letters; at most 62 characters.
Alphabet synth_alphabet(std::size_t size);

Label random_label(const SynthConfig& config, Rng& rng);

// Frame path blank, l1, blank, l2, ..., lL, blank with a random dwell per
// segment.
Path canonical_path(const Label& label, const SynthConfig& config, Rng& rng);

// Clean posteriorgram for `label`: sharpness mass on the path class of each
// frame, after per-frame confusion.
Posteriorgram synth_posteriorgram(const Label& label, const SynthConfig& config, Rng& rng);

Posteriorgram noise_posteriorgram(std::size_t frames, std::size_t classes, Rng& rng);

// Average of the clean posteriorgrams of two labels; the shorter one is
// padded by repeating its last frame.
Posteriorgram mixed_posteriorgram(const Label& first, const Label& second,
                                  const SynthConfig& config, Rng& rng);

// Sample i is generated from its own stream of the master seed, so output
// does not depend on generation order. Exactly floor(reject_fraction * n)
// samples are rejects.
std::vector<Sample> generate_samples(const SynthConfig& config, std::size_t n);

// Writes <id>.cpg files, alphabet.json and manifest.jsonl into out_dir
// (created if needed). Returns the manifest path.
std::filesystem::path generate_dataset(const SynthConfig& config, std::size_t n,
                                       const std::filesystem::path& out_dir);

}  // namespace ctcconf

#endif  // CTCCONF_SYNTH_HPP_
