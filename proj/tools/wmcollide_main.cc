//
// Copyright 2026 The wmcollide Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Command-line front end: train, generate, detect, collide, report and
// synth-corpus subcommands.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "wmcollide/collide.h"
#include "wmcollide/config.h"
#include "wmcollide/dataset.h"
#include "wmcollide/detect.h"
#include "wmcollide/error.h"
#include "wmcollide/report.h"
#include "wmcollide/synthetic_corpus.h"
#include "wmcollide/token_model.h"
#include "wmcollide/vocabulary.h"

namespace {

using namespace wmcollide;  // NOLINT

constexpr int kUsageExit = 2;
constexpr int kFailureExit = 1;

struct Options {
  std::string config;
  std::optional<uint64_t> seed;
  std::string out;
  std::string corpus;
  std::string model;
  std::string scheme;
  std::string dataset;
  std::string in;
  std::optional<int> workers;
  std::optional<int64_t> tokens;
  bool quiet = false;
};

// Thrown by Stage() so main can name the stage that failed.
struct StageError {
  std::string stage;
  std::string what;
};

template <typename F>
auto Stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw StageError{name, e.what()};
  }
}

void Log(const Options& o, const std::string& msg) {
  if (!o.quiet) std::cerr << "wmcollide: " << msg << '\n';
}

ExperimentConfig ConfigFor(const Options& o) {
  return Stage("config", [&] {
    ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : LoadConfig(o.config);
    if (o.seed) c.seed = *o.seed;
    if (o.workers) c.workers = *o.workers;
    if (!o.corpus.empty()) c.lm.corpus = o.corpus;
    c.Validate();
    return c;
  });
}

// "kind/strength" uses the config presets; a full scheme id is taken as is.
SchemeConfig SchemeFor(const ExperimentConfig& c, const std::string& text, uint64_t key) {
  return Stage("config", [&] {
    if (text.find('=') != std::string::npos) return ParseSchemeId(text);
    const auto slash = text.find('/');
    if (slash == std::string::npos) {
      throw Error(ErrorCode::kBadConfig, "--scheme must be kind/strength or a scheme id");
    }
    return c.MakeScheme(ParseKind(text.substr(0, slash)), ParseStrength(text.substr(slash + 1)),
                        key);
  });
}

std::string OutDir(const Options& o, const ExperimentConfig& c) {
  if (!o.out.empty()) return o.out;
  if (!c.out_dir.empty()) return c.out_dir;
  return DefaultOutDir();
}

Models ModelsFor(const Options& o, const ExperimentConfig& c) {
  if (o.model.empty()) {
    Log(o, "training models");
    return Stage("train", [&] { return BuildModels(c); });
  }
  TokenModel lm = Stage("load model", [&] { return TokenModel::Load(o.model); });
  std::vector<TokenId> ids =
      Stage("prompts", [&] { return lm.vocab().EncodeText(CorpusText(c.lm)); });
  return Models{std::move(lm), std::nullopt, std::move(ids)};
}

int RunSynth(const Options& o) {
  SyntheticCorpusOptions s;
  if (o.seed) s.seed = *o.seed;
  if (o.tokens) s.num_tokens = *o.tokens;
  const std::string text = Stage("synth-corpus", [&] { return SynthesizeCorpus(s); });
  Stage("write", [&] {
    std::ofstream out(o.out, std::ios::binary);
    out << text;
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + o.out);
  });
  return 0;
}

int RunTrain(const Options& o) {
  const ExperimentConfig c = ConfigFor(o);
  const std::string text = Stage("read corpus", [&] { return CorpusText(c.lm); });
  const TokenModel lm = Stage("train", [&] {
    return TrainLmFromText(text, IngestText(text, c.lm.max_vocab), c.lm.order, c.lm.alpha);
  });
  Stage("write", [&] { lm.Save(o.out); });
  Log(o, "wrote " + o.out + " (|V| = " + std::to_string(lm.vocab_size()) + ")");
  return 0;
}

int RunGenerate(const Options& o) {
  const ExperimentConfig c = ConfigFor(o);
  const Models models = ModelsFor(o, c);
  const Dataset dataset = Stage("generate", [&] {
    const PipelineRunner runner(c, models);
    if (o.scheme.empty()) return BuildDataset(runner);
    const SchemeConfig scheme = SchemeFor(c, o.scheme, c.watermarker_key);
    Dataset d;
    d.vocab_size = models.vocab_size();
    for (int i = 0; i < c.n_samples; ++i) {
      d.records.push_back({SampleId(TextRole::kWatermarked, &scheme, nullptr, i),
                           runner.Watermarked(scheme, i)});
    }
    return d;
  });
  Stage("write", [&] { WriteJsonl(std::filesystem::path(o.out), dataset); });
  Log(o, "wrote " + std::to_string(dataset.records.size()) + " records to " + o.out);
  return 0;
}

int RunDetect(const Options& o) {
  const ExperimentConfig c = ConfigFor(o);
  const Dataset dataset = Stage("read dataset", [&] { return ReadJsonl(std::filesystem::path(o.dataset)); });
  const SchemeConfig scheme = SchemeFor(c, o.scheme, c.watermarker_key);
  std::vector<std::string> ids;
  std::vector<DetectionResult> results;
  Stage("detect", [&] {
    const Watermark mark(scheme, dataset.vocab_size);
    for (const auto& r : dataset.records) {
      ids.push_back(r.sample_id);
      results.push_back(Score(r.sample, mark));
    }
  });
  Stage("write", [&] {
    if (o.out.empty()) {
      WriteScoresCsv(std::cout, ids, results);
      return;
    }
    std::ofstream out(o.out, std::ios::binary);
    WriteScoresCsv(out, ids, results);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + o.out);
  });
  double mean = 0.0;
  for (const auto& r : results) mean += r.statistic;
  if (!results.empty()) mean /= static_cast<double>(results.size());
  Log(o, "scored " + std::to_string(results.size()) + " texts, mean statistic " +
             FormatDouble(mean));
  return 0;
}

int RunCollide(const Options& o) {
  const ExperimentConfig c = ConfigFor(o);
  const std::filesystem::path dir = OutDir(o, c);
  const Models models = ModelsFor(o, c);
  Dataset dataset;
  const CollisionReport report = Stage("collide", [&] {
    const PipelineRunner runner(c, models);
    return RunCollisionMatrix(runner, &dataset,
                              [&](std::string_view stage) { Log(o, "stage " + std::string(stage)); });
  });
  Stage("report", [&] {
    EmitReport(report, dir);
    WriteJsonl(dir / "dataset.jsonl", dataset);
    std::ofstream out(dir / "config.txt", std::ios::binary);
    out << FormatConfig(c);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write config.txt");
  });
  Log(o, "wrote " + dir.string());
  std::cout << Summary(report);
  return 0;
}

int RunReport(const Options& o) {
  const std::filesystem::path in = o.in;
  const std::filesystem::path out = o.out.empty() ? in : std::filesystem::path(o.out);
  const CollisionReport report = Stage("read report", [&] { return ReadReportCsvs(in); });
  Stage("report", [&] {
    if (out != in) WriteReportCsvs(report, out);
    WritePlotsAndSummary(report, out);
  });
  std::cout << Summary(report);
  return 0;
}

void AddCommon(CLI::App* cmd, Options& o, bool with_seed = true) {
  cmd->add_option("--config", o.config, "Experiment config file (key = value)")
      ->check(CLI::ExistingFile);
  if (with_seed) cmd->add_option("--seed", o.seed, "Master seed, overrides the config");
  cmd->add_flag("-q,--quiet", o.quiet, "No progress messages");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wmcollide: watermark collision lab"};
  app.require_subcommand(1);
  Options o;

  auto* synth = app.add_subcommand("synth-corpus", "Write the built-in synthetic corpus");
  synth->add_option("--out", o.out, "Output text file")->required();
  synth->add_option("--seed", o.seed, "Corpus seed");
  synth->add_option("--tokens", o.tokens, "Approximate corpus length in tokens");
  synth->add_flag("-q,--quiet", o.quiet, "No progress messages");

  auto* train = app.add_subcommand("train", "Train the n-gram model: corpus -> model file");
  AddCommon(train, o, false);
  train->add_option("--corpus", o.corpus, "Corpus text file (default: config, else synthetic)");
  train->add_option("--out", o.out, "Model file")->required();

  auto* generate = app.add_subcommand("generate", "Generate a dataset: model + scheme -> JSONL");
  AddCommon(generate, o);
  generate->add_option("--model", o.model, "Model file from `train` (default: train from config)")
      ->check(CLI::ExistingFile);
  generate->add_option("--scheme", o.scheme,
                       "Only z-filtered T_W for this kind/strength or scheme id; "
                       "default is the full pipeline dataset");
  generate->add_option("--out", o.out, "Dataset JSONL file")->required();

  auto* detect = app.add_subcommand("detect", "Score a dataset: dataset + scheme -> scores CSV");
  AddCommon(detect, o, false);
  detect->add_option("--dataset", o.dataset, "Dataset JSONL file")
      ->required()
      ->check(CLI::ExistingFile);
  detect->add_option("--scheme", o.scheme, "kind/strength (watermarker key) or scheme id")
      ->required();
  detect->add_option("--out", o.out, "Scores CSV (default: stdout)");

  auto* collide = app.add_subcommand("collide", "Run the full collision matrix");
  AddCommon(collide, o);
  collide->add_option("--out", o.out, "Output directory (default: config, $WMCOLLIDE_OUT_DIR, "
                                      "wmcollide_out)");
  collide->add_option("--model", o.model, "Shared model file (default: train from config)")
      ->check(CLI::ExistingFile);
  collide->add_option("--workers", o.workers, "Worker threads (0: all cores)");

  auto* report = app.add_subcommand("report", "Plots and summary from collide CSVs");
  report->add_option("--in", o.in, "Directory holding the CSVs")
      ->required()
      ->check(CLI::ExistingDirectory);
  report->add_option("--out", o.out, "Output directory (default: --in)");
  report->add_flag("-q,--quiet", o.quiet, "No progress messages");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageExit;
  }

  try {
    if (synth->parsed()) return RunSynth(o);
    if (train->parsed()) return RunTrain(o);
    if (generate->parsed()) return RunGenerate(o);
    if (detect->parsed()) return RunDetect(o);
    if (collide->parsed()) return RunCollide(o);
    if (report->parsed()) return RunReport(o);
  } catch (const StageError& e) {
    std::cerr << "wmcollide: stage " << e.stage << " failed: " << e.what << '\n';
    return kFailureExit;
  }
  return kUsageExit;
}
