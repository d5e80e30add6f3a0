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

#ifndef CTCCONF_IO_HPP_
#define CTCCONF_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ctcconf/core.hpp"

namespace ctcconf {

// Posteriorgram container (.cpg):
//   bytes 0..3   "CPG1"
//   u32 LE       T
//   u32 LE       C
//   T*C f32 LE   row-major probabilities, class 0 = blank
std::vector<std::uint8_t> encode_cpg(const Posteriorgram& pg);
// Parses the container without checking probability invariants.
Posteriorgram decode_cpg(std::span<const std::uint8_t> bytes);

void write_cpg(const std::filesystem::path& path, const Posteriorgram& pg);
// Reads, validates and renormalizes. Throws ValidationError when the
// stored matrix violates an invariant.
Posteriorgram read_cpg(const std::filesystem::path& path,
                       std::optional<std::size_t> expected_classes = std::nullopt);

class ValidationError : public Error {
 public:
  explicit ValidationError(Violation violation)
      : Error("invalid posteriorgram: " + violation.describe()), violation_(violation) {}
  const Violation& violation() const { return violation_; }

 private:
  Violation violation_;
};

// Alphabet file: JSON array of single-character strings.
Alphabet parse_alphabet_json(std::string_view json_text);
Alphabet read_alphabet(const std::filesystem::path& path);
void write_alphabet(const std::filesystem::path& path, const Alphabet& alphabet);

// One line of the JSON-lines dataset manifest.
struct ManifestEntry {
  std::string id;
  std::string pg;  // path relative to the manifest's directory
  std::string label;
  bool reject = false;

  bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
  std::filesystem::path base_dir;
  std::vector<ManifestEntry> entries;

  std::filesystem::path posteriorgram_path(const ManifestEntry& entry) const {
    return base_dir / entry.pg;
  }
};

// Ids must be non-empty and unique; throws FormatError otherwise.
Manifest parse_manifest(std::string_view text, std::filesystem::path base_dir);
Manifest read_manifest(const std::filesystem::path& path);
std::string format_manifest(const std::vector<ManifestEntry>& entries);
void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries);

std::string read_text_file(const std::filesystem::path& path);
std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);
void write_binary_file(const std::filesystem::path& path,
                       std::span<const std::uint8_t> bytes);

// Minimal RFC 4180 CSV: fields containing a comma, quote or newline are
// quoted, quotes doubled.
using CsvRow = std::vector<std::string>;
std::string format_csv_row(const CsvRow& row);
std::vector<CsvRow> parse_csv(std::string_view text);

// Shortest round-trip decimal form; infinities as "inf" / "-inf".
std::string format_double(double value);
// Accepts what format_double writes. Throws FormatError.
double parse_double(std::string_view text);

}  // namespace ctcconf

#endif  // CTCCONF_IO_HPP_
