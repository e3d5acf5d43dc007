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

#ifndef WMCOLLIDE_WATERMARK_H_
#define WMCOLLIDE_WATERMARK_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wmcollide/scheme.h"
#include "wmcollide/vocabulary.h"

namespace wmcollide {

// Context id used to seed the first step when there is no preceding token.
inline constexpr uint64_t kContextSentinel = 0xFFFFFFFFULL;

// Embedding width of the SirLike surrogate.
inline constexpr int kSirDims = 64;

// Number of green tokens for a vocabulary: round(gamma * |V|).
int GreenListSize(double gamma, int vocab_size);

class GreenMask {
 public:
  GreenMask() = default;
  explicit GreenMask(int size) : bits_(size, false) {}

  int size() const { return static_cast<int>(bits_.size()); }
  bool operator[](TokenId id) const { return bits_[id]; }
  void Set(TokenId id, bool green = true) { bits_[id] = green; }
  int Count() const;
  std::vector<TokenId> GreenIds() const;

  friend bool operator==(const GreenMask&, const GreenMask&) = default;

 private:
  std::vector<bool> bits_;
};

// The functions below are direct, table-free definitions of each scheme. The
// Watermark class computes the same values through precomputed tables.
//
// KgwLike green list after `context` (only its last token matters):
//   prev = last id, or kContextSentinel when the context is empty
//   kPrevToken: seed = HashWords(key, {kKgwPrevTag, prev}); the mask is the
//     first round(gamma |V|) entries of a Fisher-Yates shuffle of [0, |V|)
//     driven by SplitMix64(seed), swap index i + Next() % (|V| - i).
//   kSelfHash: each candidate c scores HashWords(key, {kKgwSelfTag, prev, c});
//     the round(gamma |V|) highest scores are green (ties to lower id).
// Throws kBadConfig for vocab_size < 4 or a non-KgwLike config.
GreenMask GreenMaskKgw(const SchemeConfig& config, std::span<const TokenId> context,
                       int vocab_size);

// PrwLike fixed split: candidate c scores HashWords(key, {kPrwTag, c}); the
// round(gamma |V|) highest are green.
GreenMask GreenMaskPrw(const SchemeConfig& config, int vocab_size);

// SirLike surrogate. Not the trained network of the original method, but a
// keyed feature hash with the same locality:
//   e   = normalize(sum of g_key(t) over the last chunk_length context ids)
//         (g_key(kContextSentinel) when the context is empty)
//   b_t = +delta if <e, r_t> >= 0 else -delta
// g_key(t) and r_t are 64-d Gaussian vectors built from HashWords; r_t does not
// depend on the key and comes in antithetic pairs (r_{2i+1} = -r_{2i}), so the
// bias is exactly balanced over any even-sized vocabulary.
std::vector<double> SirBias(const SchemeConfig& config, std::span<const TokenId> context,
                            int vocab_size);

// base + scheme bias for the step after `context`. vocab size = base.size().
// Throws kNumericalError if base contains a non-finite value.
std::vector<double> BiasLogits(std::span<const double> base, const SchemeConfig& config,
                               std::span<const TokenId> context);

// A scheme bound to a vocabulary size with its lookup tables built up front.
// Immutable after construction and safe to share between threads.
class Watermark {
 public:
  Watermark(const SchemeConfig& config, int vocab_size);

  const SchemeConfig& config() const { return config_; }
  const std::string& id() const { return id_; }
  int vocab_size() const { return vocab_size_; }

  // Tokens that receive +delta at the step after `context` (for SirLike, the
  // tokens with positive bias).
  GreenMask Mask(std::span<const TokenId> context) const;
  bool IsGreen(std::span<const TokenId> context, TokenId token) const;

  // Adds the scheme bias to `logits` (size vocab_size) in place.
  void ApplyBias(std::span<const TokenId> context, std::span<double> logits) const;

  // Null probability that a token counts as green; the z-test reference.
  double gamma() const { return config_.gamma; }

 private:
  int64_t MaskRow(std::span<const TokenId> context) const;
  std::span<const uint64_t> Row(int64_t row) const;
  void SirEmbedding(std::span<const TokenId> context, std::span<double> e) const;
  double SirProjection(std::span<const double> e, TokenId token) const;

  SchemeConfig config_;
  std::string id_;
  int vocab_size_;
  int words_per_row_ = 0;
  std::vector<uint64_t> rows_;          // KgwLike: |V|+1 rows, PrwLike: 1 row
  std::vector<double> sir_basis_;       // r_t, |V| x kSirDims
  std::vector<double> sir_features_;    // g_key(t), |V| x kSirDims
  std::vector<double> sir_sentinel_;    // g_key(kContextSentinel)
};

}  // namespace wmcollide

#endif  // WMCOLLIDE_WATERMARK_H_
