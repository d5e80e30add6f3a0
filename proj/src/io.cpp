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

#include "ctcconf/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_set>

#include "json.hpp"

namespace ctcconf {

namespace {

constexpr char kCpgMagic[4] = {'C', 'P', 'G', '1'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[offset + i]) << (8 * i);
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_cpg(const Posteriorgram& pg) {
  std::vector<std::uint8_t> out;
  out.reserve(12 + 4 * pg.frames() * pg.classes());
  out.insert(out.end(), std::begin(kCpgMagic), std::end(kCpgMagic));
  put_u32(out, static_cast<std::uint32_t>(pg.frames()));
  put_u32(out, static_cast<std::uint32_t>(pg.classes()));
  for (double v : pg.matrix().data()) {
    put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  return out;
}

Posteriorgram decode_cpg(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || !std::equal(std::begin(kCpgMagic), std::end(kCpgMagic),
                                       bytes.begin())) {
    throw FormatError("not a CPG1 posteriorgram");
  }
  const std::uint64_t frames = get_u32(bytes, 4);
  const std::uint64_t classes = get_u32(bytes, 8);
  if (frames == 0 || classes == 0) throw FormatError("posteriorgram with zero extent");
  if (bytes.size() != 12 + 4 * frames * classes) {
    throw FormatError("posteriorgram payload is " + std::to_string(bytes.size() - 12) +
                      " bytes, header announces " + std::to_string(4 * frames * classes));
  }
  std::vector<double> probs(frames * classes);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    probs[i] = std::bit_cast<float>(get_u32(bytes, 12 + 4 * i));
  }
  return Posteriorgram(frames, classes, std::move(probs));
}

void write_cpg(const std::filesystem::path& path, const Posteriorgram& pg) {
  write_binary_file(path, encode_cpg(pg));
}

Posteriorgram read_cpg(const std::filesystem::path& path,
                       std::optional<std::size_t> expected_classes) {
  Posteriorgram pg = decode_cpg(read_binary_file(path));
  if (auto violation = validate_posteriorgram(pg, expected_classes)) {
    throw ValidationError(*violation);
  }
  return renormalized(pg);
}

Alphabet parse_alphabet_json(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("alphabet JSON: ") + e.what());
  }
  if (!doc.is_array()) throw FormatError("alphabet JSON must be an array");
  std::vector<std::string> chars;
  for (const auto& item : doc) {
    if (!item.is_string()) throw FormatError("alphabet entries must be strings");
    chars.push_back(item.get<std::string>());
  }
  try {
    return Alphabet(std::move(chars));
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
}

Alphabet read_alphabet(const std::filesystem::path& path) {
  return parse_alphabet_json(read_text_file(path));
}

void write_alphabet(const std::filesystem::path& path, const Alphabet& alphabet) {
  write_text_file(path, nlohmann::json(alphabet.characters()).dump() + "\n");
}

Manifest parse_manifest(std::string_view text, std::filesystem::path base_dir) {
  Manifest manifest{std::move(base_dir), {}};
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = "manifest line " + std::to_string(line_no);
    ManifestEntry entry;
    try {
      const auto obj = nlohmann::json::parse(line);
      entry.id = obj.at("id").get<std::string>();
      entry.pg = obj.at("pg").get<std::string>();
      entry.label = obj.at("label").get<std::string>();
      entry.reject = obj.at("reject").get<bool>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(where + ": " + e.what());
    }
    if (entry.id.empty()) throw FormatError(where + ": empty id");
    if (!seen.insert(entry.id).second) throw FormatError(where + ": duplicate id " + entry.id);
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

Manifest read_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_text_file(path), path.parent_path());
}

std::string format_manifest(const std::vector<ManifestEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    nlohmann::ordered_json obj;
    obj["id"] = e.id;
    obj["pg"] = e.pg;
    obj["label"] = e.label;
    obj["reject"] = e.reject;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries) {
  write_text_file(path, format_manifest(entries));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return text;
}

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  return {text.begin(), text.end()};
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

void write_binary_file(const std::filesystem::path& path,
                       std::span<const std::uint8_t> bytes) {
  write_text_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                         bytes.size()));
}

std::string format_csv_row(const CsvRow& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out += ',';
    const std::string& f = row[i];
    if (f.find_first_of(",\"\n\r") == std::string::npos) {
      out += f;
      continue;
    }
    out += '"';
    for (char c : f) {
      if (c == '"') out += '"';
      out += c;
    }
    out += '"';
  }
  out += '\n';
  return out;
}

std::vector<CsvRow> parse_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool quoted = false;
  bool row_has_content = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        row_has_content = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        row_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        if (row_has_content || !field.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        field.clear();
        row.clear();
        row_has_content = false;
        break;
      default:
        field += c;
        row_has_content = true;
    }
  }
  if (quoted) throw FormatError("unterminated quoted CSV field");
  if (row_has_content || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw FormatError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace ctcconf
