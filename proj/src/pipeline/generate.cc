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

#include <algorithm>
#include <cmath>
#include <vector>

#include "wmcollide/error.h"
#include "wmcollide/hash.h"
#include "wmcollide/pipeline.h"
#include "wmcollide/sampling.h"

namespace wmcollide {
namespace {

bool BiasActive(const Watermark* scheme) {
  return scheme != nullptr && scheme->config().delta != 0.0;
}

Rng SeededRng(uint64_t seed, uint64_t stream) {
  return Rng(HashWords(seed, {stream}));
}

constexpr uint64_t kGenerateStream = 1;
constexpr uint64_t kRetainStream = 2;
constexpr uint64_t kParaphraseStream = 3;

}  // namespace

GenerationResult Generate(const GenerationJob& job) {
  if (job.lm == nullptr) throw Error(ErrorCode::kBadConfig, "generation job without model");
  if (job.prompt.empty()) throw Error(ErrorCode::kBadConfig, "empty prompt");
  if (job.max_new_tokens < 1) throw Error(ErrorCode::kBadConfig, "max_new_tokens must be >= 1");
  if (!(job.temperature > 0.0)) throw Error(ErrorCode::kBadConfig, "temperature must be > 0");
  if (job.scheme != nullptr && job.scheme->vocab_size() != job.lm->vocab_size()) {
    throw Error(ErrorCode::kBadConfig, "scheme and model vocab sizes differ");
  }

  const TokenModel& lm = *job.lm;
  Rng rng = SeededRng(job.seed, kGenerateStream);
  const bool biased = BiasActive(job.scheme);
  const bool exact_path = !biased && job.temperature == 1.0;

  GenerationResult result;
  auto& out = result.text.tokens;
  std::vector<TokenId> context(job.prompt);
  std::vector<double> logits(exact_path ? 0 : lm.vocab_size());
  for (int step = 0; step < job.max_new_tokens; ++step) {
    if (job.record_masks && job.scheme != nullptr) {
      result.masks.push_back(job.scheme->Mask(out));
    }
    TokenId next;
    if (exact_path) {
      next = lm.Sample(context, rng);
    } else {
      lm.LogitsInto(context, logits);
      if (biased) job.scheme->ApplyBias(out, logits);
      next = SampleToken(logits, job.temperature, rng);
    }
    if (job.scheme != nullptr) {
      result.green_flags.push_back(job.scheme->IsGreen(out, next) ? 1 : 0);
    }
    out.push_back(next);
    context.push_back(next);
    if (next == kEosId) break;
  }
  result.text.seed = job.seed;
  if (job.scheme != nullptr) {
    result.text.role = TextRole::kWatermarked;
    result.text.watermarker_id = job.scheme->id();
  } else {
    result.text.role = TextRole::kUnwatermarkedGen;
  }
  return result;
}

std::vector<size_t> RetainedPositions(std::span<const TokenId> source,
                                      double retention_rate, uint64_t seed,
                                      size_t span_length) {
  if (!(retention_rate >= 0.0 && retention_rate <= 1.0)) {
    throw Error(ErrorCode::kBadConfig, "retention_rate must be in [0, 1]");
  }
  if (span_length == 0) throw Error(ErrorCode::kBadConfig, "span_length must be >= 1");
  std::vector<size_t> eligible;
  for (size_t i = 0; i < source.size(); ++i) {
    if (!IsReserved(source[i])) eligible.push_back(i);
  }
  const auto keep = static_cast<size_t>(
      std::ceil(retention_rate * static_cast<double>(eligible.size()) - 1e-9));
  // Spans are runs of span_length eligible positions; whole spans are drawn
  // in shuffled order and the last one drawn is cut to hit the exact count.
  const size_t num_spans = (eligible.size() + span_length - 1) / span_length;
  std::vector<size_t> order(num_spans);
  for (size_t i = 0; i < num_spans; ++i) order[i] = i;
  SplitMix64 stream(HashWords(seed, {kRetainStream}));
  std::vector<size_t> retained;
  retained.reserve(keep);
  for (size_t i = 0; i < num_spans && retained.size() < keep; ++i) {
    const size_t j = i + stream.Next() % (num_spans - i);
    std::swap(order[i], order[j]);
    const size_t begin = order[i] * span_length;
    const size_t end = std::min(begin + span_length, eligible.size());
    for (size_t k = begin; k < end && retained.size() < keep; ++k) {
      retained.push_back(eligible[k]);
    }
  }
  std::sort(retained.begin(), retained.end());
  return retained;
}

TextSample Paraphrase(const ParaphraseJob& job) {
  if (job.lm == nullptr || job.source == nullptr) {
    throw Error(ErrorCode::kBadConfig, "paraphrase job without model or source");
  }
  const auto& source = job.source->tokens;
  if (source.size() < 8) throw Error(ErrorCode::kTooShort, "paraphrase source needs >= 8 tokens");
  if (!(job.copy_weight >= 0.0 && job.copy_weight <= 1.0)) {
    throw Error(ErrorCode::kBadConfig, "copy_weight must be in [0, 1]");
  }
  if (!(job.temperature > 0.0)) throw Error(ErrorCode::kBadConfig, "temperature must be > 0");
  if (!(job.retention_slack >= 0.0 && job.retention_slack <= 1.0)) {
    throw Error(ErrorCode::kBadConfig, "retention_slack must be in [0, 1]");
  }
  if (!(job.sharpness > 0.0)) throw Error(ErrorCode::kBadConfig, "sharpness must be > 0");
  if (job.scheme != nullptr && job.scheme->vocab_size() != job.lm->vocab_size()) {
    throw Error(ErrorCode::kBadConfig, "scheme and model vocab sizes differ");
  }

  const TokenModel& lm = *job.lm;
  const auto retained = RetainedPositions(source, job.retention_rate, job.seed, job.span_length);
  // Reserved ids (UNK, EOS) carry no content and are never rewritten.
  std::vector<uint8_t> keep(source.size(), 0);
  for (size_t i = 0; i < source.size(); ++i) keep[i] = IsReserved(source[i]) ? 1 : 0;
  for (size_t i : retained) keep[i] = 1;

  Rng rng = SeededRng(job.seed, kParaphraseStream);
  const bool biased = BiasActive(job.scheme);
  const bool exact_path = !biased && job.temperature == 1.0 && job.sharpness == 1.0;

  TextSample result;
  auto& out = result.tokens;
  out.reserve(source.size());
  std::vector<TokenId> context{kBosId};
  std::vector<TokenId> source_context{kBosId};
  std::vector<double> logits(exact_path ? 0 : lm.vocab_size());
  for (size_t i = 0; i < source.size(); ++i) {
    const TokenId src = source[i];
    TokenId next = src;
    // Retained positions prefer the source token with weight 1 - slack;
    // rewritten ones with a copy weight scaled by how natural the source is.
    const double w = keep[i] ? (IsReserved(src) ? 1.0 : 1.0 - job.retention_slack)
                             : job.copy_weight * lm.Probability(source_context, src);
    if (w < 1.0) {
      if (exact_path) {
        next = NextUnit(rng) < w ? src : lm.Sample(context, rng);
      } else {
        lm.LogitsInto(context, logits);
        if (job.sharpness != 1.0) {
          for (double& l : logits) l *= job.sharpness;
          LogSoftmaxInPlace(logits);
        }
        // log((1 - w) p_t + w [t == src]) shifted by -log(1 - w), which
        // softmax ignores; only the source entry changes.
        if (src >= 0 && src < lm.vocab_size()) {
          logits[src] = std::log(std::exp(logits[src]) + w / (1.0 - w));
        }
        if (biased) job.scheme->ApplyBias(out, logits);
        next = SampleToken(logits, job.temperature, rng);
      }
    }
    out.push_back(next);
    context.push_back(next);
    source_context.push_back(src);
  }

  result.seed = job.seed;
  result.watermarker_id = job.source->watermarker_id;
  if (job.scheme != nullptr) {
    result.paraphraser_id = job.scheme->id();
    result.role = job.source->watermarker_id ? TextRole::kParaphrasedDual
                                             : TextRole::kParaphrasedSingle;
  } else {
    result.role = TextRole::kParaphrasedSingle;
  }
  return result;
}

}  // namespace wmcollide
