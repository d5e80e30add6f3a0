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

#include "ctcconf/decoder.hpp"

#include <algorithm>
#include <unordered_map>

#include "ctcconf/ctc.hpp"

namespace ctcconf {

namespace {

struct Prefix {
  Label label;
  double blank = kLogZero;      // paths ending in blank
  double non_blank = kLogZero;  // paths ending in label.back()

  double total() const { return log_add(blank, non_blank); }
};

bool prefix_before(const Prefix& a, const Prefix& b) {
  const double ta = a.total();
  const double tb = b.total();
  if (ta != tb) return ta > tb;
  return a.label < b.label;
}

class PrefixTable {
 public:
  explicit PrefixTable(std::size_t reserve) {
    prefixes_.reserve(reserve);
    index_.reserve(reserve);
  }

  Prefix& at(Label&& label) {
    auto [it, inserted] = index_.try_emplace(label, prefixes_.size());
    if (inserted) prefixes_.push_back(Prefix{std::move(label)});
    return prefixes_[it->second];
  }

  std::vector<Prefix> release() { return std::move(prefixes_); }

 private:
  std::vector<Prefix> prefixes_;
  std::unordered_map<Label, std::size_t, LabelHash> index_;
};

}  // namespace

bool hypothesis_before(const Hypothesis& a, const Hypothesis& b) {
  if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
  return a.label < b.label;
}

Hypothesis greedy_decode(const Posteriorgram& pg) {
  Path path;
  path.indices.reserve(pg.frames());
  for (std::size_t t = 0; t < pg.frames(); ++t) {
    auto row = pg.row(t);
    // max_element keeps the first maximum, i.e. the lowest class index.
    const auto best = std::max_element(row.begin(), row.end()) - row.begin();
    path.indices.push_back(static_cast<ClassIndex>(best));
  }
  return Hypothesis{collapse(path), path_log_probability(pg, path)};
}

std::vector<Hypothesis> beam_search_topk(const Posteriorgram& pg, std::size_t beam_width,
                                         std::size_t k) {
  if (k == 0 || beam_width == 0 || k > beam_width) {
    throw InvalidArgument("beam search needs 1 <= k <= beam_width (k=" + std::to_string(k) +
                          ", beam_width=" + std::to_string(beam_width) + ")");
  }
  const std::size_t classes = pg.classes();
  std::vector<double> log_y(classes);

  std::vector<Prefix> beam;
  beam.push_back(Prefix{Label{}, 0.0, kLogZero});

  for (std::size_t t = 0; t < pg.frames(); ++t) {
    for (std::size_t c = 0; c < classes; ++c) log_y[c] = safe_log(pg(t, c));

    PrefixTable next(beam.size() * classes);
    for (const Prefix& p : beam) {
      const double total = p.total();
      const bool has_last = !p.label.empty();
      const ClassIndex last = has_last ? p.label.indices.back() : kBlank;

      {
        Prefix& same = next.at(Label(p.label));
        same.blank = log_add(same.blank, total + log_y[kBlank]);
        // Repeating the last character without a blank keeps the prefix.
        if (has_last) {
          same.non_blank = log_add(same.non_blank, p.non_blank + log_y[last]);
        }
      }

      for (std::size_t c = 1; c < classes; ++c) {
        if (log_y[c] == kLogZero) continue;
        const auto k_class = static_cast<ClassIndex>(c);
        // A repeated character only extends from paths that ended in blank.
        const double source = (has_last && k_class == last) ? p.blank : total;
        if (source == kLogZero) continue;
        Label extended = p.label;
        extended.indices.push_back(k_class);
        Prefix& ext = next.at(std::move(extended));
        ext.non_blank = log_add(ext.non_blank, source + log_y[c]);
      }
    }

    beam = next.release();
    std::erase_if(beam, [](const Prefix& p) { return p.total() == kLogZero; });
    if (beam.size() > beam_width) {
      std::nth_element(beam.begin(), beam.begin() + static_cast<std::ptrdiff_t>(beam_width),
                       beam.end(), prefix_before);
      beam.resize(beam_width);
    }
  }

  std::sort(beam.begin(), beam.end(), prefix_before);
  std::vector<Hypothesis> out;
  for (std::size_t i = 0; i < beam.size() && i < k; ++i) {
    out.push_back(Hypothesis{std::move(beam[i].label), std::min(beam[i].total(), 0.0)});
  }
  return out;
}

std::vector<Hypothesis> rescore_exact(const Posteriorgram& pg,
                                      std::vector<Hypothesis> hypotheses) {
  for (Hypothesis& h : hypotheses) h.log_prob = label_log_probability(pg, h.label);
  std::sort(hypotheses.begin(), hypotheses.end(), hypothesis_before);
  return hypotheses;
}

std::vector<Hypothesis> decode_topk(const Posteriorgram& pg, const DecodeConfig& config) {
  if (!config.exact_rescoring) return beam_search_topk(pg, config.beam_width, config.k);
  if (config.k < 1 || config.k > config.beam_width) {
    throw InvalidArgument("k must lie in [1, beam_width]");
  }
  // Every surviving prefix is rescored, so a label the beam ranked low can
  // still come out on top.
  auto hyps = rescore_exact(pg, beam_search_topk(pg, config.beam_width, config.beam_width));
  if (hyps.size() > config.k) hyps.resize(config.k);
  return hyps;
}

}  // namespace ctcconf
