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

#ifndef WMCOLLIDE_CONFIG_H_
#define WMCOLLIDE_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wmcollide/pipeline.h"
#include "wmcollide/scheme.h"

namespace wmcollide {

// Where the language model comes from. An empty corpus path means the
// built-in synthetic corpus.
struct LmConfig {
  std::string corpus;
  int order = 3;
  double alpha = 1e-3;
  int max_vocab = 5000;
  uint64_t synthetic_seed = 2024;
  int synthetic_tokens = 600000;

  friend bool operator==(const LmConfig&, const LmConfig&) = default;
};

struct ExperimentConfig {
  LmConfig lm;
  // Second slot for the paraphraser's model; unset means it shares lm.
  std::optional<LmConfig> paraphraser_lm;

  std::vector<SchemeKind> kinds{SchemeKind::kKgwLike, SchemeKind::kPrwLike,
                                SchemeKind::kSirLike};
  std::vector<Strength> strengths{Strength::kWeak, Strength::kStrong};
  uint64_t watermarker_key = kWatermarkerKey;
  uint64_t paraphraser_key = kParaphraserKey;
  double weak_delta = kWeakDelta;
  double strong_delta = kStrongDelta;
  double kgw_gamma = 0.25;
  double prw_gamma = 0.25;
  double sir_gamma = 0.5;
  Seeding kgw_seeding = Seeding::kSelfHash;
  int sir_chunk_length = 10;
  bool include_sir_pairs = false;

  int n_samples = 200;
  int n_calibration = 5000;
  int max_new_tokens = kDefaultMaxNewTokens;
  double temperature = 1.0;
  std::vector<double> fpr_targets{0.01, 0.05, 0.10};

  double retention_rate = kDefaultRetentionRate;
  int span_length = static_cast<int>(kDefaultSpanLength);
  double retention_slack = 0.0;
  double copy_weight = kDefaultCopyWeight;
  double sharpness = kDefaultSharpness;

  double z_threshold_kgw = 4.0;
  double z_threshold_prw = 4.0;
  double z_threshold_sir = 0.0;
  int filter_max_attempts = 200;
  // Paraphraser used for the (T_P, D_W) baseline column, as "kind/strength".
  std::string reference_paraphraser = "kgw/weak";

  uint64_t seed = 1;
  std::string out_dir;
  int workers = 0;  // 0: hardware concurrency

  // Scheme grid in report order: kinds outer, strengths inner.
  std::vector<SchemeConfig> Watermarkers() const;
  std::vector<SchemeConfig> Paraphrasers() const;
  SchemeConfig MakeScheme(SchemeKind kind, Strength strength, uint64_t key) const;
  double ZThreshold(SchemeKind kind) const;
  // The paraphraser named by reference_paraphraser, with the paraphraser key.
  SchemeConfig ReferenceParaphraser() const;
  const LmConfig& ParaphraserLm() const { return paraphraser_lm ? *paraphraser_lm : lm; }

  // Throws kBadConfig on any violated invariant, e.g. equal keys, FPR targets
  // outside (0, 1) or not strictly ascending.
  void Validate() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Flat "key = value" text, one entry per line, '#' starts a comment.
// Values are numbers, true/false, "quoted strings" or [comma, lists].
// Keys: see docs/formats.md. Unknown keys and malformed values throw
// kBadConfig naming the line.
ExperimentConfig ParseConfig(std::string_view text);
ExperimentConfig LoadConfig(const std::string& path);

// Writes every key; ParseConfig(FormatConfig(c)) == c.
std::string FormatConfig(const ExperimentConfig& config);

// Output directory when none is configured: $WMCOLLIDE_OUT_DIR, else
// "wmcollide_out".
std::string DefaultOutDir();

}  // namespace wmcollide

#endif  // WMCOLLIDE_CONFIG_H_
