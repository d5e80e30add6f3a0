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

#ifndef CTCCONF_CORE_HPP_
#define CTCCONF_CORE_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ctcconf/errors.hpp"

namespace ctcconf {

using ClassIndex = std::int32_t;

// The blank symbol always occupies class 0; character i of the alphabet
// occupies class i + 1.
inline constexpr ClassIndex kBlank = 0;

// Display form of the blank when rendering frame paths.
inline constexpr std::string_view kBlankSymbol = "-";

// Rows of an ingested posteriorgram must sum to 1 within this tolerance.
inline constexpr double kRowSumTolerance = 1e-5;

// Ordered set of distinct characters. Each character is one Unicode code
// point stored as UTF-8.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> characters);

  // Convenience: every code point of `chars` becomes one character.
  static Alphabet FromString(std::string_view chars);

  std::size_t size() const { return characters_.size(); }
  // |alphabet| + 1, counting the blank.
  std::size_t class_count() const { return characters_.size() + 1; }

  const std::vector<std::string>& characters() const { return characters_; }
  std::optional<ClassIndex> index_of(std::string_view character) const;
  // Symbol for a class index; the blank renders as kBlankSymbol.
  const std::string& symbol(ClassIndex index) const;

  bool operator==(const Alphabet& other) const {
    return characters_ == other.characters_;
  }

 private:
  std::vector<std::string> characters_;
  std::unordered_map<std::string, ClassIndex> lookup_;
};

// Blank-free sequence of class indices.
struct Label {
  std::vector<ClassIndex> indices;

  std::size_t size() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
  auto operator<=>(const Label&) const = default;
};

// Frame-level class sequence, one entry per posteriorgram row.
struct Path {
  std::vector<ClassIndex> indices;

  std::size_t size() const { return indices.size(); }
  auto operator<=>(const Path&) const = default;
};

struct LabelHash {
  std::size_t operator()(const Label& label) const noexcept;
};

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// T x C matrix of per-frame class distributions, class 0 = blank. The
// constructor only checks the shape; use validate_posteriorgram for the
// probability invariants.
class Posteriorgram {
 public:
  Posteriorgram(std::size_t frames, std::size_t classes, std::vector<double> probs);
  explicit Posteriorgram(Matrix probs);

  std::size_t frames() const { return probs_.rows(); }
  std::size_t classes() const { return probs_.cols(); }

  double operator()(std::size_t t, std::size_t k) const { return probs_(t, k); }
  std::span<const double> row(std::size_t t) const { return probs_.row(t); }
  const Matrix& matrix() const { return probs_; }

  bool operator==(const Posteriorgram&) const = default;

 private:
  Matrix probs_;
};

struct Violation {
  enum class Kind { kClassCount, kNonFinite, kNegativeEntry, kEntryAboveOne, kRowSum };

  Kind kind;
  std::size_t row = 0;
  std::size_t column = 0;
  // Offending entry, row sum, or class count depending on `kind`.
  double value = 0.0;

  std::string describe() const;
};

// Reports the first violated invariant in row-major order, or nullopt.
std::optional<Violation> validate_posteriorgram(
    const Posteriorgram& pg, std::optional<std::size_t> expected_classes = std::nullopt);

// Divides every row by its sum. Requires a valid posteriorgram.
Posteriorgram renormalized(const Posteriorgram& pg);

struct Sample {
  std::string id;
  Posteriorgram posteriorgram;
  Label label;
  bool reject = false;
};

// Splits UTF-8 text into code points. Throws FormatError on malformed UTF-8.
std::vector<std::string> split_code_points(std::string_view text);

Label encode_label(std::string_view text, const Alphabet& alphabet);
std::string decode_label(const Label& label, const Alphabet& alphabet);

// Throws IndexOutOfRange unless every index lies in [1, class_count).
void check_label(const Label& label, std::size_t class_count);

// Renders a path with the blank shown as kBlankSymbol.
std::string render_path(const Path& path, const Alphabet& alphabet);
// Inverse of render_path; throws UnknownCharacter.
Path parse_path(std::string_view text, const Alphabet& alphabet);

}  // namespace ctcconf

#endif  // CTCCONF_CORE_HPP_
