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

#include <cmath>
#include <filesystem>
#include <limits>

#include "ctcconf/core.hpp"
#include "ctcconf/io.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ctcconf;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "ctcconf_test_core" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("alphabet maps characters after the blank") {
  const Alphabet a = Alphabet::FromString("abc");
  CHECK(a.size() == 3);
  CHECK(a.class_count() == 4);
  CHECK(a.index_of("a") == 1);
  CHECK(a.index_of("c") == 3);
  CHECK_FALSE(a.index_of("d").has_value());
  CHECK(a.symbol(kBlank) == "-");
  CHECK(a.symbol(2) == "b");
  CHECK_THROWS_AS(a.symbol(4), IndexOutOfRange);
}

TEST_CASE("alphabet rejects duplicates, blanks and multi-character entries") {
  CHECK_THROWS_AS(Alphabet({"a", "a"}), InvalidArgument);
  CHECK_THROWS_AS(Alphabet({"-"}), InvalidArgument);
  CHECK_THROWS_AS(Alphabet({"ab"}), InvalidArgument);
  CHECK_THROWS_AS(Alphabet({""}), InvalidArgument);
}

TEST_CASE("multi-byte code points are single characters") {
  const Alphabet a({"é", "ß", "中"});
  CHECK(encode_label("中é", a).indices == std::vector<ClassIndex>{3, 1});
  CHECK(decode_label(Label{{2, 3}}, a) == "ß中");
  CHECK(split_code_points("aé中").size() == 3);
  CHECK_THROWS_AS(split_code_points("\xC3"), FormatError);
}

TEST_CASE("encode_label reports the first unknown character") {
  const Alphabet a = Alphabet::FromString("ab");
  try {
    encode_label("abxa", a);
    FAIL("expected UnknownCharacter");
  } catch (const UnknownCharacter& e) {
    CHECK(e.position() == 2);
    CHECK(e.character() == "x");
  }
}

TEST_CASE("encode and decode round-trip") {
  const Alphabet a = Alphabet::FromString("0123456789");
  Rng rng = make_stream(1, 0);
  for (int trial = 0; trial < 100; ++trial) {
    Label l;
    const auto n = uniform_below(rng, 8);
    for (std::uint64_t i = 0; i < n; ++i) {
      l.indices.push_back(static_cast<ClassIndex>(1 + uniform_below(rng, 10)));
    }
    CHECK(encode_label(decode_label(l, a), a) == l);
  }
}

TEST_CASE("check_label bounds") {
  CHECK_NOTHROW(check_label(Label{{1, 2}}, 3));
  CHECK_THROWS_AS(check_label(Label{{0}}, 3), IndexOutOfRange);
  CHECK_THROWS_AS(check_label(Label{{3}}, 3), IndexOutOfRange);
}

TEST_CASE("paths render with the blank symbol") {
  const Alphabet a = Alphabet::FromString("ehlo");
  const Path p = parse_path("hhee--ll-lo--", a);
  CHECK(p.size() == 13);
  CHECK(render_path(p, a) == "hhee--ll-lo--");
  CHECK_THROWS_AS(parse_path("hx", a), UnknownCharacter);
}

TEST_CASE("validate_posteriorgram finds the first violation") {
  SUBCASE("valid") {
    CHECK_FALSE(validate_posteriorgram(Posteriorgram(2, 2, {0.5, 0.5, 1.0, 0.0})).has_value());
  }
  SUBCASE("class count") {
    const auto v = validate_posteriorgram(Posteriorgram(1, 2, {0.5, 0.5}), 3);
    REQUIRE(v);
    CHECK(v->kind == Violation::Kind::kClassCount);
  }
  SUBCASE("non-finite") {
    const auto v = validate_posteriorgram(
        Posteriorgram(1, 2, {std::numeric_limits<double>::quiet_NaN(), 1.0}));
    REQUIRE(v);
    CHECK(v->kind == Violation::Kind::kNonFinite);
  }
  SUBCASE("negative") {
    const auto v = validate_posteriorgram(Posteriorgram(2, 2, {0.5, 0.5, -0.1, 1.1}));
    REQUIRE(v);
    CHECK(v->kind == Violation::Kind::kNegativeEntry);
    CHECK(v->row == 1);
    CHECK(v->column == 0);
  }
  SUBCASE("above one") {
    const auto v = validate_posteriorgram(Posteriorgram(1, 2, {1.5, -0.5}));
    REQUIRE(v);
    CHECK(v->kind == Violation::Kind::kEntryAboveOne);
  }
  SUBCASE("row sum") {
    const auto v = validate_posteriorgram(Posteriorgram(1, 2, {0.5, 0.4}));
    REQUIRE(v);
    CHECK(v->kind == Violation::Kind::kRowSum);
    CHECK(v->value == doctest::Approx(0.9));
  }
  SUBCASE("row sum within tolerance") {
    CHECK_FALSE(validate_posteriorgram(Posteriorgram(1, 2, {0.5, 0.5 + 5e-6})).has_value());
  }
}

TEST_CASE("posteriorgram shape is checked") {
  CHECK_THROWS_AS(Posteriorgram(2, 2, {0.5, 0.5}), DimensionMismatch);
  CHECK_THROWS_AS(Posteriorgram(0, 2, {}), DimensionMismatch);
}

TEST_CASE("renormalized rows sum to one") {
  const Posteriorgram pg = renormalized(Posteriorgram(1, 2, {0.5, 0.5 + 5e-6}));
  CHECK(pg(0, 0) + pg(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("cpg round-trips at float precision") {
  Rng rng = make_stream(2, 0);
  const Posteriorgram pg = oracle::random_posteriorgram(rng, 7, 5);
  const auto bytes = encode_cpg(pg);
  REQUIRE(bytes.size() == 12 + 7 * 5 * 4);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "CPG1");
  CHECK(bytes[4] == 7);
  CHECK(bytes[8] == 5);
  const Posteriorgram back = decode_cpg(bytes);
  REQUIRE(back.frames() == 7);
  REQUIRE(back.classes() == 5);
  for (std::size_t t = 0; t < 7; ++t) {
    for (std::size_t k = 0; k < 5; ++k) {
      CHECK(back(t, k) == static_cast<double>(static_cast<float>(pg(t, k))));
    }
  }
}

TEST_CASE("cpg decoding rejects malformed containers") {
  CHECK_THROWS_AS(decode_cpg(std::vector<std::uint8_t>{'C', 'P', 'G'}), FormatError);
  std::vector<std::uint8_t> bytes = encode_cpg(Posteriorgram(1, 2, {0.5, 0.5}));
  bytes[0] = 'X';
  CHECK_THROWS_AS(decode_cpg(bytes), FormatError);
  bytes = encode_cpg(Posteriorgram(1, 2, {0.5, 0.5}));
  bytes.pop_back();
  CHECK_THROWS_AS(decode_cpg(bytes), FormatError);
}

TEST_CASE("read_cpg validates and renormalizes") {
  const fs::path dir = scratch_dir("read_cpg");
  write_cpg(dir / "ok.cpg", Posteriorgram(1, 3, {0.2, 0.3, 0.5}));
  const Posteriorgram pg = read_cpg(dir / "ok.cpg", 3);
  CHECK(pg(0, 0) + pg(0, 1) + pg(0, 2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(read_cpg(dir / "ok.cpg", 4), ValidationError);
  write_cpg(dir / "bad.cpg", Posteriorgram(1, 2, {0.2, 0.3}));
  CHECK_THROWS_AS(read_cpg(dir / "bad.cpg"), ValidationError);
  CHECK_THROWS_AS(read_cpg(dir / "missing.cpg"), IoError);
}

TEST_CASE("alphabet JSON") {
  CHECK(parse_alphabet_json(R"(["a","b","é"])") == Alphabet({"a", "b", "é"}));
  CHECK_THROWS_AS(parse_alphabet_json("{}"), FormatError);
  CHECK_THROWS_AS(parse_alphabet_json("[1]"), FormatError);
  CHECK_THROWS_AS(parse_alphabet_json(R"(["a","a"])"), FormatError);
  const fs::path dir = scratch_dir("alphabet");
  write_alphabet(dir / "a.json", Alphabet::FromString("xyz"));
  CHECK(read_alphabet(dir / "a.json") == Alphabet::FromString("xyz"));
}

TEST_CASE("manifest parsing") {
  const std::string text =
      "{\"id\":\"a\",\"pg\":\"a.cpg\",\"label\":\"12\",\"reject\":false}\n"
      "\n"
      "{\"id\":\"b\",\"pg\":\"b.cpg\",\"label\":\"3\",\"reject\":true}\n";
  const Manifest m = parse_manifest(text, "/data");
  REQUIRE(m.entries.size() == 2);
  CHECK(m.entries[1] == ManifestEntry{"b", "b.cpg", "3", true});
  CHECK(m.posteriorgram_path(m.entries[0]) == fs::path("/data/a.cpg"));
  CHECK(parse_manifest(format_manifest(m.entries), "/data").entries == m.entries);

  CHECK_THROWS_AS(parse_manifest("{\"id\":\"a\",\"pg\":\"a\",\"label\":\"\"}\n"
                                 "{\"id\":\"a\",\"pg\":\"b\",\"label\":\"\"}\n",
                                 "."),
                  FormatError);
  CHECK_THROWS_AS(parse_manifest("not json\n", "."), FormatError);
  CHECK_THROWS_AS(parse_manifest("{\"id\":\"\",\"pg\":\"a\",\"label\":\"\"}\n", "."), FormatError);
}

TEST_CASE("csv quoting round-trips") {
  const CsvRow row{"plain", "a,b", "say \"hi\"", "line\nbreak", ""};
  const auto rows = parse_csv(format_csv_row(row) + format_csv_row({"x"}));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == row);
  CHECK(rows[1] == CsvRow{"x"});
  CHECK(format_csv_row({"a,b"}) == "\"a,b\"\n");
  CHECK_THROWS_AS(parse_csv("\"open"), FormatError);
}

TEST_CASE("format_double round-trips exactly") {
  Rng rng = make_stream(3, 0);
  for (int i = 0; i < 200; ++i) {
    const double x = std::ldexp(uniform(rng, -1.0, 1.0), static_cast<int>(uniform_int(rng, -60, 60)));
    CHECK(parse_double(format_double(x)) == x);
  }
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(parse_double("-inf") == -std::numeric_limits<double>::infinity());
  CHECK(parse_double("inf") == std::numeric_limits<double>::infinity());
  CHECK(format_double(0.5) == "0.5");
  CHECK_THROWS_AS(parse_double("1.5x"), FormatError);
}
