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

#ifndef WMCOLLIDE_PIPELINE_H_
#define WMCOLLIDE_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wmcollide/text_sample.h"
#include "wmcollide/token_model.h"
#include "wmcollide/watermark.h"

namespace wmcollide {

inline constexpr int kDefaultMaxNewTokens = 128;

struct GenerationJob {
  const TokenModel* lm = nullptr;
  const Watermark* scheme = nullptr;  // nullptr: unwatermarked
  std::vector<TokenId> prompt;
  int max_new_tokens = kDefaultMaxNewTokens;
  double temperature = 1.0;
  uint64_t seed = 0;
  bool record_masks = false;
};

struct GenerationResult {
  TextSample text;
  std::vector<uint8_t> green_flags;  // per emitted token, under the job scheme
  std::vector<GreenMask> masks;      // filled only when record_masks is set
};

// Autoregressive loop: base logits from the model conditioned on prompt plus
// output, scheme bias, sample. The watermark itself only sees the emitted
// tokens (the first step uses the empty-context sentinel), so a detector can
// re-derive every green list from the text alone. Stops after EOS or
// max_new_tokens. A scheme with delta = 0 draws exactly like no scheme.
// Throws kBadConfig for an empty prompt or max_new_tokens < 1.
GenerationResult Generate(const GenerationJob& job);

inline constexpr double kDefaultRetentionRate = 0.15;
inline constexpr size_t kDefaultSpanLength = 16;
inline constexpr double kDefaultCopyWeight = 0.9;
inline constexpr double kDefaultSharpness = 1.0;

struct ParaphraseJob {
  const TokenModel* lm = nullptr;
  const Watermark* scheme = nullptr;  // nullptr: unwatermarked paraphrase
  const TextSample* source = nullptr;
  double retention_rate = kDefaultRetentionRate;
  // Retained positions come in runs of this many eligible tokens.
  size_t span_length = kDefaultSpanLength;
  // Retained positions draw from (1 - slack) [. == source_i] + slack P(.),
  // then the scheme bias; 0 copies them verbatim whatever the bias.
  double retention_slack = 0.0;
  // Pull towards reproducing the source token at a rewritten position. The
  // weight at position i is copy_weight * P(source_i | source prefix): tokens
  // the model finds natural in the source survive, odd ones get rewritten.
  double copy_weight = kDefaultCopyWeight;
  // Exponent applied to the paraphraser's next-token distribution before the
  // scheme bias; > 1 means more conservative rewrites.
  double sharpness = kDefaultSharpness;
  double temperature = 1.0;
  uint64_t seed = 0;
};

// Constrained regeneration: ceil(retention_rate * eligible) positions holding
// non-reserved source tokens are kept verbatim (chosen from the seed); every
// other position is regenerated left to right from
//   log((1 - w_i) P(. | output prefix) + w_i [. == source_i]) + scheme bias.
// Positions holding reserved ids (UNK, EOS) are always copied. Output has
// the source length. Role is ParaphrasedDual when both the source
// watermark and the paraphrase scheme are present, ParaphrasedSingle when the
// scheme is absent. Throws kTooShort when the source has fewer than 8 tokens.
TextSample Paraphrase(const ParaphraseJob& job);

// Positions kept verbatim by Paraphrase for this source and seed.
std::vector<size_t> RetainedPositions(std::span<const TokenId> source,
                                      double retention_rate, uint64_t seed,
                                      size_t span_length = kDefaultSpanLength);

}  // namespace wmcollide

#endif  // WMCOLLIDE_PIPELINE_H_
