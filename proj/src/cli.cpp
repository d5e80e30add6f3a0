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

#include "ctcconf/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "CLI11.hpp"
#include "ctcconf/confidence.hpp"
#include "ctcconf/decoder.hpp"
#include "ctcconf/errpredict.hpp"
#include "ctcconf/eval.hpp"
#include "ctcconf/io.hpp"
#include "ctcconf/synth.hpp"
#include "json.hpp"

namespace ctcconf {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// Collected by each command and written as the run summary.
struct RunSummary {
  std::string command;
  Json config = Json::object();
  Json inputs = Json::object();
  Json outputs = Json::object();
  Json metrics = Json::object();
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
  std::size_t fatal_errors = 0;
};

struct DecodeRow {
  std::string id;
  std::string predicted;
  LogProb log_p1 = kLogZero;
  LogProb log_p2 = kLogZero;
};

struct ScoreRow {
  std::string id;
  double score = 0.0;
  bool correct = false;
};

fs::path sibling(const fs::path& path, std::string_view suffix) {
  return fs::path(path.string() + std::string(suffix));
}

Alphabet alphabet_for(const fs::path& manifest, const std::string& flag) {
  return read_alphabet(flag.empty() ? manifest.parent_path() / "alphabet.json" : fs::path(flag));
}

std::vector<DecodeRow> read_decode_csv(const fs::path& path) {
  const auto rows = parse_csv(read_text_file(path));
  if (rows.empty() || rows.front() != CsvRow{"id", "predicted", "log_p1", "log_p2"}) {
    throw FormatError(path.string() + ": expected header id,predicted,log_p1,log_p2");
  }
  std::vector<DecodeRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const CsvRow& r = rows[i];
    if (r.size() != 4) throw FormatError(path.string() + ": row " + std::to_string(i) + " needs 4 fields");
    out.push_back({r[0], r[1], parse_double(r[2]), parse_double(r[3])});
  }
  return out;
}

std::vector<ScoreRow> read_score_csv(const fs::path& path) {
  const auto rows = parse_csv(read_text_file(path));
  if (rows.empty() || rows.front() != CsvRow{"id", "score", "correct"}) {
    throw FormatError(path.string() + ": expected header id,score,correct");
  }
  std::vector<ScoreRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const CsvRow& r = rows[i];
    if (r.size() != 3 || (r[2] != "0" && r[2] != "1")) {
      throw FormatError(path.string() + ": malformed row " + std::to_string(i));
    }
    out.push_back({r[0], parse_double(r[1]), r[2] == "1"});
  }
  return out;
}

// Manifest entries by id; throws FormatError for ids absent from the manifest.
std::vector<const ManifestEntry*> join_manifest(const Manifest& manifest,
                                                const std::vector<DecodeRow>& rows) {
  std::unordered_map<std::string, const ManifestEntry*> by_id;
  for (const ManifestEntry& e : manifest.entries) by_id.emplace(e.id, &e);
  std::unordered_set<std::string> seen;
  std::vector<const ManifestEntry*> out;
  for (const DecodeRow& r : rows) {
    const auto it = by_id.find(r.id);
    if (it == by_id.end()) throw FormatError("decode id '" + r.id + "' is not in the manifest");
    if (!seen.insert(r.id).second) throw FormatError("duplicate decode id '" + r.id + "'");
    out.push_back(it->second);
  }
  return out;
}

void cmd_synth(const fs::path& config_path, std::size_t n, std::optional<std::uint64_t> seed,
               const fs::path& out_dir, RunSummary& run) {
  SynthConfig config = parse_synth_config(read_text_file(config_path));
  if (seed) config.seed = *seed;
  validate_config(config);
  run.config = Json::parse(format_synth_config(config));
  run.config["n"] = n;
  run.inputs["config"] = config_path.string();
  const fs::path manifest = generate_dataset(config, n, out_dir);
  run.outputs["manifest"] = manifest.string();
  run.metrics["samples"] = n;
  run.metrics["rejects"] =
      static_cast<std::size_t>(std::floor(config.reject_fraction * static_cast<double>(n)));
}

void cmd_decode(const fs::path& manifest_path, const std::string& alphabet_flag,
                const DecodeConfig& config, const fs::path& out, RunSummary& run,
                std::ostream& err) {
  if (config.k < 1 || config.k > config.beam_width) {
    throw InvalidArgument("--k must lie in [1, --beam]");
  }
  const Manifest manifest = read_manifest(manifest_path);
  if (manifest.entries.empty()) throw EmptyInput("manifest has no samples");
  const Alphabet alphabet = alphabet_for(manifest_path, alphabet_flag);
  run.config = {{"beam", config.beam_width}, {"k", config.k}};
  run.inputs = {{"manifest", manifest_path.string()}, {"alphabet", alphabet_flag}};

  std::string csv = "id,predicted,log_p1,log_p2\n";
  for (const ManifestEntry& e : manifest.entries) {
    std::optional<Posteriorgram> pg;
    try {
      pg = read_cpg(manifest.posteriorgram_path(e), alphabet.class_count());
    } catch (const Error& ex) {
      ++run.skipped;
      run.warnings.push_back(e.id + ": " + ex.what());
      err << "warning: skipping " << e.id << ": " << ex.what() << "\n";
      continue;
    }
    const auto hyps = decode_topk(*pg, config);
    csv += format_csv_row({e.id, decode_label(hyps[0].label, alphabet),
                           format_double(hyps[0].log_prob),
                           format_double(hyps.size() > 1 ? hyps[1].log_prob : kLogZero)});
  }
  write_text_file(out, csv);
  run.outputs["decode"] = out.string();
  run.metrics["decoded"] = manifest.entries.size() - run.skipped;
}

void cmd_score(const fs::path& decode_path, const fs::path& manifest_path, Method method,
               const std::string& model_flag, const fs::path& out, RunSummary& run) {
  if (method == Method::kErrPredict && model_flag.empty()) {
    throw InvalidArgument("--method errpredict needs --model");
  }
  const auto rows = read_decode_csv(decode_path);
  const Manifest manifest = read_manifest(manifest_path);
  const auto entries = join_manifest(manifest, rows);
  std::optional<ErrPredictModel> model;
  if (method == Method::kErrPredict) model = load_model(model_flag);
  run.config = {{"method", method_name(method)}};
  run.inputs = {{"decode", decode_path.string()}, {"manifest", manifest_path.string()}};
  if (model) run.inputs["model"] = model_flag;

  std::string csv = "id,score,correct\n";
  std::size_t n_correct = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const DecodeRow& r = rows[i];
    const ManifestEntry& e = *entries[i];
    double score = 0.0;
    switch (method) {
      case Method::kRatio:
        score = ratio_confidence_log(r.log_p1, r.log_p2);
        break;
      case Method::kRaw:
        score = std::exp(r.log_p1);
        break;
      case Method::kNormalized:
        score = normalized_confidence_log(r.log_p1, read_cpg(manifest.posteriorgram_path(e)).frames());
        break;
      case Method::kErrPredict:
        score = errpredict_confidence(*model, read_cpg(manifest.posteriorgram_path(e)));
        break;
    }
    const bool correct = !e.reject && r.predicted == e.label;
    n_correct += correct ? 1 : 0;
    csv += format_csv_row({r.id, format_double(score), correct ? "1" : "0"});
  }
  write_text_file(out, csv);
  run.outputs["scores"] = out.string();
  run.metrics["n"] = rows.size();
  if (!rows.empty()) {
    run.metrics["accuracy"] = static_cast<double>(n_correct) / static_cast<double>(rows.size());
  }
}

void cmd_train(const fs::path& manifest_path, const fs::path& decode_path,
               const std::string& alphabet_flag, const TrainConfig& config, std::size_t hidden,
               std::size_t layers, const fs::path& out, RunSummary& run) {
  const auto rows = read_decode_csv(decode_path);
  const Manifest manifest = read_manifest(manifest_path);
  const auto entries = join_manifest(manifest, rows);
  const Alphabet alphabet = alphabet_for(manifest_path, alphabet_flag);
  if (rows.empty()) throw EmptyDataset("decode CSV has no rows");
  run.config = {{"lr", config.learning_rate}, {"epochs", config.epochs},
                {"batch", config.batch_size}, {"seed", config.seed},
                {"split", config.split_fraction}, {"hidden", hidden}, {"layers", layers}};
  run.inputs = {{"manifest", manifest_path.string()}, {"decode", decode_path.string()}};

  std::vector<TrainingSample> data;
  data.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ManifestEntry& e = *entries[i];
    Sample s{e.id, read_cpg(manifest.posteriorgram_path(e), alphabet.class_count()),
             encode_label(e.label, alphabet), e.reject};
    data.push_back({std::move(s), encode_label(rows[i].predicted, alphabet)});
  }
  const TrainResult result = train(data, config, hidden, layers);
  save_model(out, result.model);

  const fs::path loss_path = sibling(out, ".loss.csv");
  std::string csv = "epoch,loss\n";
  for (std::size_t i = 0; i < result.loss_history.size(); ++i) {
    csv += format_csv_row({std::to_string(i + 1), format_double(result.loss_history[i])});
  }
  write_text_file(loss_path, csv);
  run.outputs = {{"model", out.string()}, {"loss", loss_path.string()}};
  run.metrics["train_samples"] = result.used_indices.size();
  if (!result.loss_history.empty()) run.metrics["final_loss"] = result.loss_history.back();
}

void cmd_eval(const std::vector<std::string>& score_paths, const fs::path& out_dir,
              RunSummary& run) {
  if (score_paths.empty()) throw InvalidArgument("eval needs at least one score CSV");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  // Methods are named after the score file stems.
  Json summary;
  Json aucs = Json::object();
  std::optional<double> acc;
  std::size_t n = 0;
  for (const std::string& p : score_paths) {
    const std::string name = fs::path(p).stem().string();
    if (aucs.contains(name)) throw InvalidArgument("duplicate method name '" + name + "'");
    std::vector<EvalRecord> records;
    for (const ScoreRow& r : read_score_csv(p)) records.push_back({r.id, r.score, r.correct});
    if (records.empty()) throw EmptyInput(p + ": no scores");
    const RocCurve curve = roc_curve(records);
    if (!acc) {
      acc = accuracy(records);
      n = records.size();
    }
    aucs[name] = auc(curve);
    const fs::path roc = out_dir / ("roc_" + name + ".csv");
    write_text_file(roc, format_roc_csv(curve));
    run.outputs["roc_" + name] = roc.string();
  }
  summary["accuracy"] = *acc;
  summary["auc"] = aucs;
  summary["n"] = n;
  const fs::path summary_path = out_dir / "summary.json";
  write_text_file(summary_path, summary.dump(2) + "\n");
  run.inputs["scores"] = score_paths;
  run.outputs["summary"] = summary_path.string();
  run.metrics = summary;
}

Json to_json(const RunSummary& run, double seconds) {
  Json j;
  j["command"] = run.command;
  j["config"] = run.config;
  j["inputs"] = run.inputs;
  j["outputs"] = run.outputs;
  j["metrics"] = run.metrics;
  j["skipped"] = run.skipped;
  j["warnings"] = run.warnings;
  j["fatal_errors"] = run.fatal_errors;
  j["wall_time_s"] = seconds;
  return j;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lexicon-free CTC decoding and confidence scoring"};
  app.require_subcommand(1);

  std::string config_path, manifest, alphabet, decode_csv, model, out_path, method_text = "ratio";
  std::size_t n = 0, beam = 100, k = 2, epochs = 10, batch = 1, hidden = 32, layers = 2;
  std::optional<std::uint64_t> seed;
  double lr = 1e-4, split = 0.0;
  std::vector<std::string> scores;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--config", config_path, "Synth config JSON")->required();
  synth->add_option("--n", n, "Number of samples")->required();
  synth->add_option("--seed", seed, "Overrides the config seed");
  synth->add_option("--out", out_path, "Output directory")->required();

  auto* decode = app.add_subcommand("decode", "Top-k decoding of every manifest sample");
  decode->add_option("--manifest", manifest)->required();
  decode->add_option("--alphabet", alphabet, "Defaults to alphabet.json beside the manifest");
  decode->add_option("--beam", beam, "Beam width")->capture_default_str();
  decode->add_option("--k", k, "Hypotheses per sample")->capture_default_str();
  decode->add_option("--out", out_path, "Decode CSV")->required();

  auto* score = app.add_subcommand("score", "Confidence score per decoded sample");
  score->add_option("--decode", decode_csv)->required();
  score->add_option("--manifest", manifest)->required();
  score->add_option("--method", method_text, "ratio, raw, normalized or errpredict")
      ->capture_default_str();
  score->add_option("--model", model, "Error predictor checkpoint");
  score->add_option("--out", out_path, "Score CSV")->required();

  auto* trn = app.add_subcommand("train", "Train the error predictor");
  trn->add_option("--manifest", manifest)->required();
  trn->add_option("--decode", decode_csv)->required();
  trn->add_option("--alphabet", alphabet, "Defaults to alphabet.json beside the manifest");
  trn->add_option("--lr", lr)->capture_default_str();
  trn->add_option("--epochs", epochs)->capture_default_str();
  trn->add_option("--batch", batch)->capture_default_str();
  trn->add_option("--seed", seed);
  trn->add_option("--split", split, "Dedicated training fraction; 0 uses every sample")
      ->capture_default_str();
  trn->add_option("--hidden", hidden)->capture_default_str();
  trn->add_option("--layers", layers)->capture_default_str();
  trn->add_option("--out", out_path, "Model checkpoint")->required();

  auto* ev = app.add_subcommand("eval", "ROC curves and AUC per score CSV");
  ev->add_option("scores", scores, "Score CSVs; each file stem names a method")->required();
  ev->add_option("--out", out_path, "Output directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  const auto start = std::chrono::steady_clock::now();
  RunSummary run;
  fs::path summary_path;
  int code = kExitOk;
  try {
    if (synth->parsed()) {
      run.command = "synth";
      summary_path = fs::path(out_path) / "run.json";
      cmd_synth(config_path, n, seed, out_path, run);
    } else if (decode->parsed()) {
      run.command = "decode";
      summary_path = sibling(out_path, ".run.json");
      cmd_decode(manifest, alphabet, DecodeConfig{beam, k, true}, out_path, run, err);
    } else if (score->parsed()) {
      run.command = "score";
      summary_path = sibling(out_path, ".run.json");
      const auto method = parse_method(method_text);
      if (!method) throw InvalidArgument("unknown method '" + method_text + "'");
      cmd_score(decode_csv, manifest, *method, model, out_path, run);
    } else if (trn->parsed()) {
      run.command = "train";
      summary_path = sibling(out_path, ".run.json");
      TrainConfig config;
      config.learning_rate = lr;
      config.epochs = epochs;
      config.batch_size = batch;
      config.seed = seed.value_or(0);
      config.split_fraction = split;
      cmd_train(manifest, decode_csv, alphabet, config, hidden, layers, out_path, run);
    } else if (ev->parsed()) {
      run.command = "eval";
      summary_path = fs::path(out_path) / "run.json";
      cmd_eval(scores, out_path, run);
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    code = kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    code = kExitInput;
  }
  if (code != kExitOk) run.fatal_errors = 1;

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::string text = to_json(run, seconds).dump(2);
  out << text << "\n";
  if (code == kExitOk) {
    try {
      write_text_file(summary_path, text + "\n");
    } catch (const IoError& e) {
      err << "error: " << e.what() << "\n";
      code = kExitIo;
    }
  }
  return code;
}

}  // namespace ctcconf
