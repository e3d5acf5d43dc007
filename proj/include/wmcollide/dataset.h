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

#ifndef WMCOLLIDE_DATASET_H_
#define WMCOLLIDE_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wmcollide/config.h"
#include "wmcollide/hash.h"
#include "wmcollide/pipeline.h"
#include "wmcollide/text_sample.h"
#include "wmcollide/token_model.h"
#include "wmcollide/watermark.h"

namespace wmcollide {

// The language models an experiment runs on. Both share one vocabulary,
// built from the watermarker corpus; the paraphraser model may be trained on
// another corpus or with other order/alpha.
struct Models {
  TokenModel watermarker;
  std::optional<TokenModel> paraphraser_slot;
  std::vector<TokenId> corpus_ids;  // watermarker corpus, for prompts

  const TokenModel& paraphraser() const {
    return paraphraser_slot ? *paraphraser_slot : watermarker;
  }
  int vocab_size() const { return watermarker.vocab_size(); }
};

// Corpus text for an LM config: the file, or the synthetic corpus when the
// path is empty.
std::string CorpusText(const LmConfig& lm);

Models BuildModels(const ExperimentConfig& config);

// Corpus sentences (split after ".", "!" or "?") with at least
// kMinPromptTokens tokens. Throws kCorpusTooSmall when there are none.
inline constexpr size_t kMinPromptTokens = 10;
std::vector<std::vector<TokenId>> PromptPool(std::span<const TokenId> corpus_ids,
                                             const Vocabulary& vocab);

// Produces every text of the pipeline as a pure function of the config, the
// models and a slot index, so any subset can be computed in any order or in
// parallel with identical results.
class PipelineRunner {
 public:
  PipelineRunner(const ExperimentConfig& config, const Models& models);

  const ExperimentConfig& config() const { return config_; }
  const Models& models() const { return models_; }

  // Cached detector/bias object for a scheme.
  const Watermark& Scheme(const SchemeConfig& scheme) const;

  // T_W slot i: generations under `scheme` retried until one has at least
  // kMinPipelineTokens tokens and, when delta > 0, a z-score at or above the
  // kind's threshold. Throws kFilterExhausted after filter_max_attempts.
  TextSample Watermarked(const SchemeConfig& scheme, int slot) const;
  // The same filter on an independent seed stream: the paraphraser scheme
  // used as a single watermark.
  TextSample Fresh(const SchemeConfig& scheme, int slot) const;
  // T_W' slot i: unwatermarked generation from the same prompt as T_W slot i.
  TextSample Unwatermarked(int slot) const;
  // Calibration null j: unwatermarked generation on its own seed stream.
  TextSample Null(int index) const;
  // Paraphrase of `source` under `scheme` (nullptr: unwatermarked). `salt`
  // distinguishes paraphrases of the same source.
  TextSample Paraphrase(const TextSample& source, const SchemeConfig* scheme,
                        uint64_t salt) const;

  const std::vector<TokenId>& Prompt(int slot) const;

 private:
  TextSample Filtered(const SchemeConfig& scheme, int slot, uint64_t stream) const;
  TextSample Plain(int slot, uint64_t stream, const std::vector<TokenId>& prompt) const;

  ExperimentConfig config_;
  const Models& models_;
  std::vector<std::vector<TokenId>> prompts_;
  std::map<std::string, std::unique_ptr<Watermark>> schemes_;
};

// Paraphrase salts: T_P and T_P' of one source use independent streams.
inline constexpr uint64_t kDualSalt = HashString("tp");
inline constexpr uint64_t kSingleSalt = HashString("tp_prime");

// Texts shorter than this are regenerated: the paraphraser needs 8 tokens.
inline constexpr size_t kMinPipelineTokens = 8;

struct DatasetRecord {
  std::string sample_id;
  TextSample sample;

  friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

inline constexpr int kDatasetSchemaVersion = 1;

struct Dataset {
  int vocab_size = 0;
  std::vector<DatasetRecord> records;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// For each watermarker: n T_W (z-filtered), n T_W', n T_P'; for each
// (watermarker, paraphraser) pair: n T_P. SirLike->SirLike pairs are skipped
// unless config.include_sir_pairs. Records are ordered by watermarker, then
// role, then paraphraser, then slot.
Dataset BuildDataset(const PipelineRunner& runner,
                     const std::vector<SchemeConfig>& watermarkers,
                     const std::vector<SchemeConfig>& paraphrasers);
Dataset BuildDataset(const PipelineRunner& runner);

bool PairIncluded(const ExperimentConfig& config, const SchemeConfig& w, const SchemeConfig& p);

// sample ids: "tw/<w>/00007", "tw_prime/<w>/00007", "tp_prime/<w>/00007",
// "tp/<w>/<p>/00007" with <w>, <p> scheme labels.
std::string SampleId(TextRole role, const SchemeConfig* w, const SchemeConfig* p, int slot);

// One JSON object per line:
// {"schema_version":1,"sample_id":...,"role":...,"tokens":[...],
//  "watermarker_id":...|null,"paraphraser_id":...|null,"seed":...,"vocab_size":...}
void WriteJsonl(std::ostream& out, const Dataset& dataset);
void WriteJsonl(const std::filesystem::path& path, const Dataset& dataset);
// Throws kFormatError naming the line on malformed input or an unknown
// schema version, kIoError when the file cannot be read.
Dataset ReadJsonl(std::istream& in);
Dataset ReadJsonl(const std::filesystem::path& path);

}  // namespace wmcollide

#endif  // WMCOLLIDE_DATASET_H_
