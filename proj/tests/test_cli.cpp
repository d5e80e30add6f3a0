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
#include <sstream>

#include "ctcconf/cli.hpp"
#include "ctcconf/errpredict.hpp"
#include "ctcconf/io.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace ctcconf;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ctcconf_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "synth.json";
  write_text_file(p, text);
  return p;
}

const char* kOneHotConfig =
    R"({"alphabet_size":4,"min_length":1,"max_length":3,"sharpness":1.0,"confusion":0.0,"seed":1})";

std::vector<CsvRow> csv(const fs::path& p) { return parse_csv(read_text_file(p)); }

}  // namespace

TEST_CASE("synth exit codes") {
  const fs::path dir = fresh_dir("synth");
  const fs::path cfg = write_config(dir, kOneHotConfig);
  const Result ok = run({"synth", "--config", cfg.string(), "--n", "5", "--out", (dir / "ds").string()});
  CHECK(ok.code == kExitOk);
  CHECK(fs::exists(dir / "ds" / "manifest.jsonl"));
  CHECK(fs::exists(dir / "ds" / "run.json"));
  CHECK(json::parse(ok.out).at("fatal_errors") == 0);

  const fs::path bad = dir / "bad.json";
  write_text_file(bad, R"({"reject_fraction":1.5})");
  CHECK(run({"synth", "--config", bad.string(), "--n", "5", "--out", (dir / "x").string()}).code ==
        kExitInput);

  write_text_file(dir / "blocker", "");
  CHECK(run({"synth", "--config", cfg.string(), "--n", "5", "--out", (dir / "blocker" / "sub").string()})
            .code == kExitIo);
  CHECK(run({"synth", "--config", (dir / "missing.json").string(), "--n", "5", "--out", dir.string()})
            .code == kExitIo);
}

TEST_CASE("argument errors exit with 2") {
  CHECK(run({}).code == kExitInput);
  CHECK(run({"frobnicate"}).code == kExitInput);
  CHECK(run({"decode", "--beam", "ten"}).code == kExitInput);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("decode and score one-hot data") {
  const fs::path dir = fresh_dir("onehot");
  const fs::path cfg = write_config(dir, kOneHotConfig);
  REQUIRE(run({"synth", "--config", cfg.string(), "--n", "20", "--out", (dir / "ds").string()}).code == 0);
  const std::string manifest = (dir / "ds" / "manifest.jsonl").string();
  const fs::path dec = dir / "decode.csv";
  REQUIRE(run({"decode", "--manifest", manifest, "--out", dec.string()}).code == 0);
  CHECK(fs::exists(dir / "decode.csv.run.json"));

  const Manifest m = read_manifest(manifest);
  const auto rows = csv(dec);
  REQUIRE(rows.size() == 21);
  CHECK(rows[0] == CsvRow{"id", "predicted", "log_p1", "log_p2"});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i][0] == m.entries[i - 1].id);
    CHECK(rows[i][1] == m.entries[i - 1].label);
    CHECK(rows[i][2] == "0");
    CHECK(rows[i][3] == "-inf");
  }

  const fs::path ratio = dir / "ratio.csv";
  REQUIRE(run({"score", "--decode", dec.string(), "--manifest", manifest, "--method", "ratio", "--out",
               ratio.string()})
              .code == 0);
  const auto scores = csv(ratio);
  CHECK(scores[0] == CsvRow{"id", "score", "correct"});
  for (std::size_t i = 1; i < scores.size(); ++i) {
    CHECK(scores[i][1] == "1");
    CHECK(scores[i][2] == "1");
  }
}

TEST_CASE("raw scores are the exponentiated log probabilities") {
  const fs::path dir = fresh_dir("raw");
  const fs::path cfg = write_config(dir, R"({"alphabet_size":5,"sharpness":0.8,"confusion":0.1,"seed":2})");
  REQUIRE(run({"synth", "--config", cfg.string(), "--n", "15", "--out", (dir / "ds").string()}).code == 0);
  const std::string manifest = (dir / "ds" / "manifest.jsonl").string();
  const fs::path dec = dir / "decode.csv";
  REQUIRE(run({"decode", "--manifest", manifest, "--beam", "20", "--k", "3", "--out", dec.string()}).code == 0);
  const fs::path raw = dir / "raw.csv";
  REQUIRE(run({"score", "--decode", dec.string(), "--manifest", manifest, "--method", "raw", "--out",
               raw.string()})
              .code == 0);
  const auto d = csv(dec);
  const auto s = csv(raw);
  REQUIRE(d.size() == s.size());
  for (std::size_t i = 1; i < d.size(); ++i) {
    CHECK(parse_double(s[i][1]) == std::exp(parse_double(d[i][2])));
  }
}

TEST_CASE("decode input errors") {
  const fs::path dir = fresh_dir("decode_errors");
  write_text_file(dir / "empty.jsonl", "");
  write_text_file(dir / "alphabet.json", R"(["a"])");
  CHECK(run({"decode", "--manifest", (dir / "empty.jsonl").string(), "--out", (dir / "d.csv").string()})
            .code == kExitInput);
  CHECK(run({"decode", "--manifest", (dir / "empty.jsonl").string(), "--beam", "2", "--k", "3", "--out",
             (dir / "d.csv").string()})
            .code == kExitInput);
}

TEST_CASE("corrupt samples are skipped and counted") {
  const fs::path dir = fresh_dir("skip");
  const fs::path cfg = write_config(dir, kOneHotConfig);
  REQUIRE(run({"synth", "--config", cfg.string(), "--n", "6", "--out", (dir / "ds").string()}).code == 0);
  const Manifest m = read_manifest(dir / "ds" / "manifest.jsonl");
  write_cpg(m.posteriorgram_path(m.entries[2]), Posteriorgram(1, 5, {0.5, 0.5, 0.5, 0.0, 0.0}));
  fs::remove(m.posteriorgram_path(m.entries[4]));
  const Result r = run({"decode", "--manifest", (dir / "ds" / "manifest.jsonl").string(), "--out",
                        (dir / "d.csv").string()});
  CHECK(r.code == kExitOk);
  const json summary = json::parse(r.out);
  CHECK(summary.at("skipped") == 2);
  CHECK(summary.at("warnings").size() == 2);
  CHECK(summary.at("fatal_errors") == 0);
  CHECK(csv(dir / "d.csv").size() == 5);
}

TEST_CASE("score and train argument checks") {
  const fs::path dir = fresh_dir("checks");
  const fs::path cfg = write_config(dir, kOneHotConfig);
  REQUIRE(run({"synth", "--config", cfg.string(), "--n", "8", "--out", (dir / "ds").string()}).code == 0);
  const std::string manifest = (dir / "ds" / "manifest.jsonl").string();
  const fs::path dec = dir / "decode.csv";
  REQUIRE(run({"decode", "--manifest", manifest, "--out", dec.string()}).code == 0);

  CHECK(run({"score", "--decode", dec.string(), "--manifest", manifest, "--method", "errpredict", "--out",
             (dir / "e.csv").string()})
            .code == kExitInput);
  CHECK(run({"score", "--decode", dec.string(), "--manifest", manifest, "--method", "entropy", "--out",
             (dir / "e.csv").string()})
            .code == kExitInput);

  const fs::path other = dir / "other.csv";
  write_text_file(other, "id,predicted,log_p1,log_p2\nnope,1,0,-inf\n");
  CHECK(run({"train", "--manifest", manifest, "--decode", other.string(), "--out",
             (dir / "m.epm").string()})
            .code == kExitInput);
  CHECK(run({"score", "--decode", other.string(), "--manifest", manifest, "--out",
             (dir / "s.csv").string()})
            .code == kExitInput);
}

TEST_CASE("zero epochs saves the initialized model") {
  const fs::path dir = fresh_dir("epochs0");
  const fs::path cfg = write_config(dir, kOneHotConfig);
  REQUIRE(run({"synth", "--config", cfg.string(), "--n", "8", "--out", (dir / "ds").string()}).code == 0);
  const std::string manifest = (dir / "ds" / "manifest.jsonl").string();
  const fs::path dec = dir / "decode.csv";
  REQUIRE(run({"decode", "--manifest", manifest, "--out", dec.string()}).code == 0);
  const fs::path model = dir / "m.epm";
  REQUIRE(run({"train", "--manifest", manifest, "--decode", dec.string(), "--epochs", "0", "--seed", "4",
               "--hidden", "3", "--layers", "1", "--out", model.string()})
              .code == 0);
  CHECK(load_model(model) == ErrPredictModel::initialized(ModelShape{FeatureConfig{5}, 3, 1}, 4));
  CHECK(read_text_file(dir / "m.epm.loss.csv") == "epoch,loss\n");
}

TEST_CASE("training separates clean samples from noise") {
  const fs::path dir = fresh_dir("separable");
  const fs::path cfg = write_config(
      dir,
      R"({"alphabet_size":4,"min_length":2,"max_length":4,"sharpness":0.95,"confusion":0.0,)"
      R"("reject_fraction":0.5,"reject_style":"noise","seed":8})");
  REQUIRE(run({"synth", "--config", cfg.string(), "--n", "100", "--out", (dir / "ds").string()}).code == 0);
  const std::string manifest = (dir / "ds" / "manifest.jsonl").string();
  const fs::path dec = dir / "decode.csv";
  REQUIRE(run({"decode", "--manifest", manifest, "--out", dec.string()}).code == 0);
  const Result r = run({"train", "--manifest", manifest, "--decode", dec.string(), "--epochs", "200",
                        "--lr", "1e-3", "--batch", "8", "--hidden", "8", "--layers", "1", "--seed", "3",
                        "--out", (dir / "m.epm").string()});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out).at("metrics").at("final_loss").get<double>() < 0.1);
  const auto loss = csv(dir / "m.epm.loss.csv");
  CHECK(loss.size() == 201);
}

TEST_CASE("eval writes one curve per method") {
  const fs::path dir = fresh_dir("eval");
  write_text_file(dir / "perfect.csv", "id,score,correct\na,0.9,1\nb,0.8,1\nc,0.1,0\n");
  write_text_file(dir / "flat.csv", "id,score,correct\na,0.5,1\nb,0.5,1\nc,0.5,0\n");
  const Result r = run({"eval", (dir / "perfect.csv").string(), (dir / "flat.csv").string(), "--out",
                        (dir / "out").string()});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "out" / "roc_perfect.csv"));
  CHECK(fs::exists(dir / "out" / "roc_flat.csv"));
  const json summary = json::parse(read_text_file(dir / "out" / "summary.json"));
  CHECK(summary.at("auc").at("perfect") == 1.0);
  CHECK(summary.at("auc").at("flat") == 0.5);
  CHECK(summary.at("accuracy").get<double>() == doctest::Approx(2.0 / 3.0));
  CHECK(summary.at("n") == 3);

  write_text_file(dir / "single.csv", "id,score,correct\na,0.9,1\nb,0.8,1\n");
  CHECK(run({"eval", (dir / "single.csv").string(), "--out", (dir / "out2").string()}).code == kExitInput);
  write_text_file(dir / "broken.csv", "id,score\na,0.9\n");
  CHECK(run({"eval", (dir / "broken.csv").string(), "--out", (dir / "out3").string()}).code == kExitInput);
}

TEST_CASE("the pipeline is reproducible") {
  const fs::path dir = fresh_dir("repro");
  const fs::path cfg = write_config(
      dir, R"({"alphabet_size":6,"max_length":4,"reject_fraction":0.2,"reject_style":"both","seed":5})");
  auto pipeline = [&](const std::string& tag) {
    const fs::path d = dir / tag;
    const std::string manifest = (d / "ds" / "manifest.jsonl").string();
    REQUIRE(run({"synth", "--config", cfg.string(), "--n", "40", "--out", (d / "ds").string()}).code == 0);
    REQUIRE(run({"decode", "--manifest", manifest, "--out", (d / "decode.csv").string()}).code == 0);
    REQUIRE(run({"train", "--manifest", manifest, "--decode", (d / "decode.csv").string(), "--epochs", "2",
                 "--hidden", "4", "--seed", "1", "--out", (d / "m.epm").string()})
                .code == 0);
    std::vector<std::string> eval_args{"eval"};
    for (std::string m : {"ratio", "raw", "normalized", "errpredict"}) {
      const std::string out = (d / (m + ".csv")).string();
      REQUIRE(run({"score", "--decode", (d / "decode.csv").string(), "--manifest", manifest, "--method", m,
                   "--model", (d / "m.epm").string(), "--out", out})
                  .code == 0);
      eval_args.push_back(out);
    }
    eval_args.insert(eval_args.end(), {"--out", (d / "eval").string()});
    REQUIRE(run(eval_args).code == 0);
  };
  pipeline("a");
  pipeline("b");
  for (std::string f : {"decode.csv", "m.epm", "m.epm.loss.csv", "ratio.csv", "raw.csv", "normalized.csv",
                        "errpredict.csv", "eval/summary.json", "eval/roc_ratio.csv", "eval/roc_errpredict.csv"}) {
    CAPTURE(f);
    CHECK(read_binary_file(dir / "a" / f) == read_binary_file(dir / "b" / f));
  }
}
