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

#include "wmcollide/dataset.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>

#include "json.hpp"
#include "wmcollide/detect.h"
#include "wmcollide/error.h"
#include "wmcollide/hash.h"
#include "wmcollide/parallel.h"
#include "wmcollide/synthetic_corpus.h"

namespace wmcollide {
namespace {

// Seed stream tags; every text seed is HashWords(master, {tag, ...}).
constexpr uint64_t kStreamPrompt = 0x70726f6d;
constexpr uint64_t kStreamNullPrompt = 0x6e707270;
constexpr uint64_t kStreamWatermarked = 0x7477;
constexpr uint64_t kStreamFresh = 0x66726573;
constexpr uint64_t kStreamUnwatermarked = 0x74777072;
constexpr uint64_t kStreamNull = 0x6e756c6c;
constexpr uint64_t kStreamParaphrase = 0x70617261;

std::mutex& SchemeMutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

std::string CorpusText(const LmConfig& lm) {
  if (!lm.corpus.empty()) return ReadTextFile(lm.corpus);
  SyntheticCorpusOptions options;
  options.seed = lm.synthetic_seed;
  options.num_tokens = lm.synthetic_tokens;
  return SynthesizeCorpus(options);
}

Models BuildModels(const ExperimentConfig& config) {
  const std::string text = CorpusText(config.lm);
  Vocabulary vocab = IngestText(text, config.lm.max_vocab);
  std::vector<TokenId> ids = vocab.EncodeText(text);
  TokenModel lm = TrainLmFromText(text, vocab, config.lm.order, config.lm.alpha);
  std::optional<TokenModel> paraphraser;
  if (config.paraphraser_lm && !(*config.paraphraser_lm == config.lm)) {
    const LmConfig& p = *config.paraphraser_lm;
    const std::string ptext = p.corpus == config.lm.corpus && p.synthetic_seed == config.lm.synthetic_seed &&
                                      p.synthetic_tokens == config.lm.synthetic_tokens
                                  ? text
                                  : CorpusText(p);
    paraphraser = TrainLmFromText(ptext, vocab, p.order, p.alpha);
  }
  return Models{std::move(lm), std::move(paraphraser), std::move(ids)};
}

std::vector<std::vector<TokenId>> PromptPool(std::span<const TokenId> corpus_ids,
                                             const Vocabulary& vocab) {
  std::vector<TokenId> enders;
  for (std::string_view e : {".", "!", "?"}) {
    if (vocab.Contains(e)) enders.push_back(vocab.Lookup(e));
  }
  std::vector<std::vector<TokenId>> pool;
  std::vector<TokenId> current;
  for (TokenId t : corpus_ids) {
    current.push_back(t);
    if (std::find(enders.begin(), enders.end(), t) != enders.end()) {
      if (current.size() >= kMinPromptTokens) pool.push_back(current);
      current.clear();
    }
  }
  if (pool.empty()) {
    throw Error(ErrorCode::kCorpusTooSmall,
                "no corpus sentence with at least " + std::to_string(kMinPromptTokens) +
                    " tokens to use as a prompt");
  }
  return pool;
}

PipelineRunner::PipelineRunner(const ExperimentConfig& config, const Models& models)
    : config_(config), models_(models) {
  config_.Validate();
  prompts_ = PromptPool(models_.corpus_ids, models_.watermarker.vocab());
  for (const auto& s : config_.Watermarkers()) Scheme(s);
  for (const auto& s : config_.Paraphrasers()) Scheme(s);
}

const Watermark& PipelineRunner::Scheme(const SchemeConfig& scheme) const {
  const std::string id = SchemeId(scheme);
  std::lock_guard<std::mutex> lock(SchemeMutex());
  auto& slot = const_cast<std::map<std::string, std::unique_ptr<Watermark>>&>(schemes_)[id];
  if (!slot) slot = std::make_unique<Watermark>(scheme, models_.vocab_size());
  return *slot;
}

const std::vector<TokenId>& PipelineRunner::Prompt(int slot) const {
  const uint64_t h = HashWords(config_.seed, {kStreamPrompt, static_cast<uint64_t>(slot)});
  return prompts_[h % prompts_.size()];
}

TextSample PipelineRunner::Filtered(const SchemeConfig& scheme, int slot, uint64_t stream) const {
  const Watermark& w = Scheme(scheme);
  const bool filter = scheme.delta > 0.0;
  const double z_min = config_.ZThreshold(scheme.kind);
  const uint64_t sid = HashString(SchemeId(scheme));
  GenerationJob job;
  job.lm = &models_.watermarker;
  job.scheme = &w;
  job.prompt = Prompt(slot);
  job.max_new_tokens = config_.max_new_tokens;
  job.temperature = config_.temperature;
  for (int attempt = 0; attempt < config_.filter_max_attempts; ++attempt) {
    job.seed = HashWords(config_.seed, {stream, sid, static_cast<uint64_t>(slot),
                                        static_cast<uint64_t>(attempt)});
    TextSample text = Generate(job).text;
    if (text.tokens.size() < kMinPipelineTokens) continue;
    if (filter && Score(text, w).statistic < z_min) continue;
    return text;
  }
  throw Error(ErrorCode::kFilterExhausted,
              "no generation for " + SchemeId(scheme) + " slot " + std::to_string(slot) +
                  " passed the z >= " + FormatDouble(z_min) + " filter in " +
                  std::to_string(config_.filter_max_attempts) + " attempts");
}

TextSample PipelineRunner::Watermarked(const SchemeConfig& scheme, int slot) const {
  return Filtered(scheme, slot, kStreamWatermarked);
}

TextSample PipelineRunner::Fresh(const SchemeConfig& scheme, int slot) const {
  return Filtered(scheme, slot, kStreamFresh);
}

TextSample PipelineRunner::Plain(int slot, uint64_t stream, const std::vector<TokenId>& prompt) const {
  GenerationJob job;
  job.lm = &models_.watermarker;
  job.prompt = prompt;
  job.max_new_tokens = config_.max_new_tokens;
  job.temperature = config_.temperature;
  for (int attempt = 0; attempt < config_.filter_max_attempts; ++attempt) {
    job.seed = HashWords(config_.seed, {stream, static_cast<uint64_t>(slot),
                                        static_cast<uint64_t>(attempt)});
    TextSample text = Generate(job).text;
    if (text.tokens.size() >= kMinPipelineTokens) return text;
  }
  throw Error(ErrorCode::kFilterExhausted,
              "no unwatermarked generation reached " + std::to_string(kMinPipelineTokens) +
                  " tokens for slot " + std::to_string(slot));
}

TextSample PipelineRunner::Unwatermarked(int slot) const {
  return Plain(slot, kStreamUnwatermarked, Prompt(slot));
}

TextSample PipelineRunner::Null(int index) const {
  const uint64_t h = HashWords(config_.seed, {kStreamNullPrompt, static_cast<uint64_t>(index)});
  return Plain(index, kStreamNull, prompts_[h % prompts_.size()]);
}

TextSample PipelineRunner::Paraphrase(const TextSample& source, const SchemeConfig* scheme,
                                      uint64_t salt) const {
  ParaphraseJob job;
  job.lm = &models_.paraphraser();
  job.scheme = scheme != nullptr ? &Scheme(*scheme) : nullptr;
  job.source = &source;
  job.retention_rate = config_.retention_rate;
  job.span_length = static_cast<size_t>(config_.span_length);
  job.retention_slack = config_.retention_slack;
  job.copy_weight = config_.copy_weight;
  job.sharpness = config_.sharpness;
  job.temperature = config_.temperature;
  job.seed = HashWords(config_.seed, {kStreamParaphrase, salt, source.seed,
                                      scheme != nullptr ? HashString(SchemeId(*scheme)) : 0});
  return wmcollide::Paraphrase(job);
}

bool PairIncluded(const ExperimentConfig& config, const SchemeConfig& w, const SchemeConfig& p) {
  return config.include_sir_pairs || !(w.kind == SchemeKind::kSirLike && p.kind == SchemeKind::kSirLike);
}

std::string SampleId(TextRole role, const SchemeConfig* w, const SchemeConfig* p, int slot) {
  char index[16];
  std::snprintf(index, sizeof(index), "%05d", slot);
  std::string id(RoleName(role));
  if (w != nullptr) id += "/" + SchemeLabel(*w);
  if (p != nullptr) id += "/" + SchemeLabel(*p);
  return id + "/" + index;
}

Dataset BuildDataset(const PipelineRunner& runner, const std::vector<SchemeConfig>& watermarkers,
                     const std::vector<SchemeConfig>& paraphrasers) {
  const auto& config = runner.config();
  const int n = config.n_samples;

  // Unwatermarked generations do not depend on the watermarker.
  std::vector<TextSample> unwatermarked(n);
  ParallelFor(n, config.workers, [&](size_t i) {
    unwatermarked[i] = runner.Unwatermarked(static_cast<int>(i));
  });

  Dataset dataset;
  dataset.vocab_size = runner.models().vocab_size();
  for (const auto& w : watermarkers) {
    std::vector<const SchemeConfig*> pairs;
    for (const auto& p : paraphrasers) {
      if (PairIncluded(config, w, p)) pairs.push_back(&p);
    }
    std::vector<TextSample> tw(n), tp_prime(n);
    std::vector<std::vector<TextSample>> tp(pairs.size(), std::vector<TextSample>(n));
    const std::string label = SchemeLabel(w);
    ParallelFor(n, config.workers, [&](size_t i) {
      try {
        tw[i] = runner.Watermarked(w, static_cast<int>(i));
        tp_prime[i] = runner.Paraphrase(tw[i], nullptr, kSingleSalt);
      } catch (const Error& e) {
        throw e.WithContext("watermarker " + label);
      }
      for (size_t k = 0; k < pairs.size(); ++k) {
        try {
          tp[k][i] = runner.Paraphrase(tw[i], pairs[k], kDualSalt);
        } catch (const Error& e) {
          throw e.WithContext("pair " + label + " -> " + SchemeLabel(*pairs[k]));
        }
      }
    });
    for (int i = 0; i < n; ++i) {
      dataset.records.push_back({SampleId(TextRole::kWatermarked, &w, nullptr, i), tw[i]});
    }
    for (int i = 0; i < n; ++i) {
      dataset.records.push_back({SampleId(TextRole::kUnwatermarkedGen, &w, nullptr, i), unwatermarked[i]});
    }
    for (int i = 0; i < n; ++i) {
      dataset.records.push_back({SampleId(TextRole::kParaphrasedSingle, &w, nullptr, i), tp_prime[i]});
    }
    for (size_t k = 0; k < pairs.size(); ++k) {
      for (int i = 0; i < n; ++i) {
        dataset.records.push_back({SampleId(TextRole::kParaphrasedDual, &w, pairs[k], i), tp[k][i]});
      }
    }
  }
  return dataset;
}

Dataset BuildDataset(const PipelineRunner& runner) {
  return BuildDataset(runner, runner.config().Watermarkers(), runner.config().Paraphrasers());
}

void WriteJsonl(std::ostream& out, const Dataset& dataset) {
  for (const auto& r : dataset.records) {
    nlohmann::ordered_json j;
    j["schema_version"] = kDatasetSchemaVersion;
    j["sample_id"] = r.sample_id;
    j["role"] = std::string(RoleName(r.sample.role));
    j["tokens"] = r.sample.tokens;
    j["watermarker_id"] = r.sample.watermarker_id ? nlohmann::ordered_json(*r.sample.watermarker_id)
                                                  : nlohmann::ordered_json(nullptr);
    j["paraphraser_id"] = r.sample.paraphraser_id ? nlohmann::ordered_json(*r.sample.paraphraser_id)
                                                  : nlohmann::ordered_json(nullptr);
    j["seed"] = r.sample.seed;
    j["vocab_size"] = dataset.vocab_size;
    out << j.dump() << '\n';
  }
}

void WriteJsonl(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  WriteJsonl(out, dataset);
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

Dataset ReadJsonl(std::istream& in) {
  Dataset dataset;
  std::string line;
  int line_no = 0;
  bool have_vocab = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "dataset line " + std::to_string(line_no);
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.at("schema_version").get<int>() != kDatasetSchemaVersion) {
        throw Error(ErrorCode::kFormatError, where + ": unsupported schema_version");
      }
      DatasetRecord r;
      r.sample_id = j.at("sample_id").get<std::string>();
      r.sample.role = ParseRole(j.at("role").get<std::string>());
      r.sample.tokens = j.at("tokens").get<std::vector<TokenId>>();
      if (!j.at("watermarker_id").is_null()) r.sample.watermarker_id = j["watermarker_id"].get<std::string>();
      if (!j.at("paraphraser_id").is_null()) r.sample.paraphraser_id = j["paraphraser_id"].get<std::string>();
      r.sample.seed = j.at("seed").get<uint64_t>();
      const int vocab_size = j.at("vocab_size").get<int>();
      if (have_vocab && vocab_size != dataset.vocab_size) {
        throw Error(ErrorCode::kFormatError, where + ": vocab_size differs from earlier records");
      }
      dataset.vocab_size = vocab_size;
      have_vocab = true;
      r.sample.Validate();
      dataset.records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kFormatError, where + ": " + e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kFormatError) throw;
      throw Error(ErrorCode::kFormatError, where + ": " + e.message());
    }
  }
  return dataset;
}

Dataset ReadJsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  return ReadJsonl(in);
}

}  // namespace wmcollide
