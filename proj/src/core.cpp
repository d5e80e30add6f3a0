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

#include "ctcconf/core.hpp"

#include <cmath>
#include <sstream>

namespace ctcconf {

namespace {

// Byte length of the UTF-8 sequence introduced by `lead`, or 0 if invalid.
std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead & 0xE0) == 0xC0) return 2;
  if ((lead & 0xF0) == 0xE0) return 3;
  if ((lead & 0xF8) == 0xF0) return 4;
  return 0;
}

const std::string kBlankString{kBlankSymbol};

}  // namespace

std::vector<std::string> split_code_points(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t len = utf8_length(static_cast<unsigned char>(text[i]));
    if (len == 0 || i + len > text.size()) {
      throw FormatError("malformed UTF-8 at byte " + std::to_string(i));
    }
    for (std::size_t j = 1; j < len; ++j) {
      if ((static_cast<unsigned char>(text[i + j]) & 0xC0) != 0x80) {
        throw FormatError("malformed UTF-8 at byte " + std::to_string(i + j));
      }
    }
    out.emplace_back(text.substr(i, len));
    i += len;
  }
  return out;
}

Alphabet::Alphabet(std::vector<std::string> characters)
    : characters_(std::move(characters)) {
  for (std::size_t i = 0; i < characters_.size(); ++i) {
    const std::string& c = characters_[i];
    if (split_code_points(c).size() != 1) {
      throw InvalidArgument("alphabet entry '" + c + "' is not a single character");
    }
    if (c == kBlankSymbol) {
      throw InvalidArgument("alphabet may not contain the blank symbol '" + c + "'");
    }
    if (!lookup_.emplace(c, static_cast<ClassIndex>(i + 1)).second) {
      throw InvalidArgument("duplicate alphabet character '" + c + "'");
    }
  }
}

Alphabet Alphabet::FromString(std::string_view chars) {
  return Alphabet(split_code_points(chars));
}

std::optional<ClassIndex> Alphabet::index_of(std::string_view character) const {
  auto it = lookup_.find(std::string(character));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

const std::string& Alphabet::symbol(ClassIndex index) const {
  if (index == kBlank) return kBlankString;
  if (index < 0 || static_cast<std::size_t>(index) > characters_.size()) {
    throw IndexOutOfRange("class index " + std::to_string(index) +
                          " outside alphabet of " + std::to_string(class_count()) +
                          " classes");
  }
  return characters_[static_cast<std::size_t>(index) - 1];
}

std::size_t LabelHash::operator()(const Label& label) const noexcept {
  // FNV-1a over the indices.
  std::uint64_t h = 1469598103934665603ULL;
  for (ClassIndex k : label.indices) {
    h ^= static_cast<std::uint32_t>(k);
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionMismatch("matrix data has " + std::to_string(data_.size()) +
                            " entries, expected " + std::to_string(rows_ * cols_));
  }
}

Posteriorgram::Posteriorgram(std::size_t frames, std::size_t classes,
                             std::vector<double> probs)
    : Posteriorgram(Matrix(frames, classes, std::move(probs))) {}

Posteriorgram::Posteriorgram(Matrix probs) : probs_(std::move(probs)) {
  if (probs_.rows() == 0) throw DimensionMismatch("posteriorgram needs at least one frame");
  if (probs_.cols() == 0) throw DimensionMismatch("posteriorgram needs at least one class");
}

std::string Violation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::kClassCount:
      os << "class count " << value << " does not match alphabet";
      break;
    case Kind::kNonFinite:
      os << "non-finite entry at row " << row << ", column " << column;
      break;
    case Kind::kNegativeEntry:
      os << "negative entry " << value << " at row " << row << ", column " << column;
      break;
    case Kind::kEntryAboveOne:
      os << "entry " << value << " above 1 at row " << row << ", column " << column;
      break;
    case Kind::kRowSum:
      os << "row " << row << " sums to " << value;
      break;
  }
  return os.str();
}

std::optional<Violation> validate_posteriorgram(const Posteriorgram& pg,
                                                std::optional<std::size_t> expected_classes) {
  if (expected_classes && *expected_classes != pg.classes()) {
    return Violation{Violation::Kind::kClassCount, 0, 0, static_cast<double>(pg.classes())};
  }
  for (std::size_t t = 0; t < pg.frames(); ++t) {
    double sum = 0.0;
    for (std::size_t k = 0; k < pg.classes(); ++k) {
      const double v = pg(t, k);
      if (!std::isfinite(v)) return Violation{Violation::Kind::kNonFinite, t, k, v};
      if (v < 0.0) return Violation{Violation::Kind::kNegativeEntry, t, k, v};
      if (v > 1.0) return Violation{Violation::Kind::kEntryAboveOne, t, k, v};
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      return Violation{Violation::Kind::kRowSum, t, 0, sum};
    }
  }
  return std::nullopt;
}

Posteriorgram renormalized(const Posteriorgram& pg) {
  Matrix out = pg.matrix();
  for (std::size_t t = 0; t < out.rows(); ++t) {
    auto row = out.row(t);
    double sum = 0.0;
    for (double v : row) sum += v;
    for (double& v : row) v /= sum;
  }
  return Posteriorgram(std::move(out));
}

Label encode_label(std::string_view text, const Alphabet& alphabet) {
  Label label;
  const auto chars = split_code_points(text);
  label.indices.reserve(chars.size());
  for (std::size_t i = 0; i < chars.size(); ++i) {
    auto index = alphabet.index_of(chars[i]);
    if (!index) throw UnknownCharacter(i, chars[i]);
    label.indices.push_back(*index);
  }
  return label;
}

void check_label(const Label& label, std::size_t class_count) {
  for (ClassIndex k : label.indices) {
    if (k <= kBlank || static_cast<std::size_t>(k) >= class_count) {
      throw IndexOutOfRange("label index " + std::to_string(k) + " outside [1, " +
                            std::to_string(class_count) + ")");
    }
  }
}

std::string decode_label(const Label& label, const Alphabet& alphabet) {
  check_label(label, alphabet.class_count());
  std::string out;
  for (ClassIndex k : label.indices) out += alphabet.symbol(k);
  return out;
}

std::string render_path(const Path& path, const Alphabet& alphabet) {
  std::string out;
  for (ClassIndex k : path.indices) out += alphabet.symbol(k);
  return out;
}

Path parse_path(std::string_view text, const Alphabet& alphabet) {
  Path path;
  const auto chars = split_code_points(text);
  for (std::size_t i = 0; i < chars.size(); ++i) {
    if (chars[i] == kBlankSymbol) {
      path.indices.push_back(kBlank);
      continue;
    }
    auto index = alphabet.index_of(chars[i]);
    if (!index) throw UnknownCharacter(i, chars[i]);
    path.indices.push_back(*index);
  }
  return path;
}

}  // namespace ctcconf
