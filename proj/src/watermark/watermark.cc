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

#include "wmcollide/watermark.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "wmcollide/error.h"
#include "wmcollide/hash.h"

namespace wmcollide {
namespace {

// Domain-separation tags so the schemes never share hash streams.
constexpr uint64_t kKgwPrevTag = 0x6B67772D70726576ULL;   // "kgw-prev"
constexpr uint64_t kKgwSelfTag = 0x6B67772D73656C66ULL;   // "kgw-self"
constexpr uint64_t kPrwTag = 0x7072772D73706C74ULL;       // "prw-splt"
constexpr uint64_t kSirFeatureTag = 0x7369722D66656174ULL;  // "sir-feat"
constexpr uint64_t kSirBasisSeed = 0x7369722D62617369ULL;   // "sir-basi"

void CheckVocab(int vocab_size) {
  if (vocab_size < 4) throw Error(ErrorCode::kBadConfig, "vocab_size must be >= 4");
}

void CheckKind(const SchemeConfig& config, SchemeKind kind) {
  if (config.kind != kind) {
    throw Error(ErrorCode::kBadConfig, "scheme kind mismatch: got " +
                                           std::string(KindName(config.kind)));
  }
}

uint64_t PrevOf(std::span<const TokenId> context) {
  return context.empty() ? kContextSentinel
                         : static_cast<uint64_t>(static_cast<uint32_t>(context.back()));
}

// Marks the `k` highest-scoring ids; ties go to the lower id.
template <typename ScoreFn>
void MarkTopK(int vocab_size, int k, ScoreFn score, std::vector<uint64_t>& scratch,
              std::vector<TokenId>& order, auto&& mark) {
  scratch.resize(vocab_size);
  order.resize(vocab_size);
  for (int c = 0; c < vocab_size; ++c) scratch[c] = score(c);
  std::iota(order.begin(), order.end(), 0);
  auto better = [&](TokenId a, TokenId b) {
    return scratch[a] != scratch[b] ? scratch[a] > scratch[b] : a < b;
  };
  std::nth_element(order.begin(), order.begin() + k, order.end(), better);
  for (int i = 0; i < k; ++i) mark(order[i]);
}

template <typename Mark>
void KgwMarks(const SchemeConfig& config, uint64_t prev, int vocab_size,
              std::vector<uint64_t>& scratch, std::vector<TokenId>& order, Mark&& mark) {
  const int k = GreenListSize(config.gamma, vocab_size);
  if (config.seeding == Seeding::kPrevToken) {
    SplitMix64 stream(HashWords(config.key, {kKgwPrevTag, prev}));
    order.resize(vocab_size);
    std::iota(order.begin(), order.end(), 0);
    const auto n = static_cast<uint64_t>(vocab_size);
    for (int i = 0; i < k; ++i) {
      const auto j = static_cast<size_t>(i + stream.Next() % (n - i));
      std::swap(order[i], order[j]);
      mark(order[i]);
    }
  } else {
    MarkTopK(
        vocab_size, k,
        [&](int c) {
          return HashWords(config.key, {kKgwSelfTag, prev, static_cast<uint64_t>(c)});
        },
        scratch, order, mark);
  }
}

template <typename Mark>
void PrwMarks(const SchemeConfig& config, int vocab_size, Mark&& mark) {
  std::vector<uint64_t> scratch;
  std::vector<TokenId> order;
  MarkTopK(
      vocab_size, GreenListSize(config.gamma, vocab_size),
      [&](int c) { return HashWords(config.key, {kPrwTag, static_cast<uint64_t>(c)}); },
      scratch, order, mark);
}

void GaussianVector(uint64_t seed, uint64_t a, uint64_t b, std::span<double> out) {
  for (size_t j = 0; j < out.size(); ++j) {
    out[j] = GaussianFromHash(HashWords(seed, {a, b, j, 0}), HashWords(seed, {a, b, j, 1}));
  }
}

void Normalize(std::span<double> v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& x : v) x /= norm;
  }
}

void SirBasisVector(TokenId t, std::span<double> out) {
  GaussianVector(kSirBasisSeed, static_cast<uint64_t>(t / 2), 0, out);
  Normalize(out);
  if (t % 2 == 1) {
    for (double& x : out) x = -x;
  }
}

void SirFeature(uint64_t key, uint64_t token, std::span<double> out) {
  GaussianVector(key, kSirFeatureTag, token, out);
}

void SirEmbeddingDirect(const SchemeConfig& config, std::span<const TokenId> context,
                        std::span<double> e) {
  std::fill(e.begin(), e.end(), 0.0);
  std::vector<double> g(kSirDims);
  if (context.empty()) {
    SirFeature(config.key, kContextSentinel, g);
    std::copy(g.begin(), g.end(), e.begin());
  } else {
    const size_t n = std::min<size_t>(context.size(), config.chunk_length);
    for (TokenId t : context.last(n)) {
      SirFeature(config.key, static_cast<uint32_t>(t), g);
      for (int j = 0; j < kSirDims; ++j) e[j] += g[j];
    }
  }
  Normalize(e);
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

}  // namespace

int GreenListSize(double gamma, int vocab_size) {
  return static_cast<int>(std::lround(gamma * vocab_size));
}

int GreenMask::Count() const {
  return static_cast<int>(std::count(bits_.begin(), bits_.end(), true));
}

std::vector<TokenId> GreenMask::GreenIds() const {
  std::vector<TokenId> ids;
  for (int i = 0; i < size(); ++i) {
    if (bits_[i]) ids.push_back(i);
  }
  return ids;
}

GreenMask GreenMaskKgw(const SchemeConfig& config, std::span<const TokenId> context,
                       int vocab_size) {
  CheckKind(config, SchemeKind::kKgwLike);
  CheckVocab(vocab_size);
  config.Validate();
  GreenMask mask(vocab_size);
  std::vector<uint64_t> scratch;
  std::vector<TokenId> order;
  KgwMarks(config, PrevOf(context), vocab_size, scratch, order,
           [&](TokenId id) { mask.Set(id); });
  return mask;
}

GreenMask GreenMaskPrw(const SchemeConfig& config, int vocab_size) {
  CheckKind(config, SchemeKind::kPrwLike);
  CheckVocab(vocab_size);
  config.Validate();
  GreenMask mask(vocab_size);
  PrwMarks(config, vocab_size, [&](TokenId id) { mask.Set(id); });
  return mask;
}

std::vector<double> SirBias(const SchemeConfig& config, std::span<const TokenId> context,
                            int vocab_size) {
  CheckKind(config, SchemeKind::kSirLike);
  CheckVocab(vocab_size);
  config.Validate();
  std::vector<double> e(kSirDims), r(kSirDims);
  SirEmbeddingDirect(config, context, e);
  std::vector<double> bias(vocab_size);
  for (int t = 0; t < vocab_size; ++t) {
    SirBasisVector(t, r);
    bias[t] = Dot(e, r) >= 0.0 ? config.delta : -config.delta;
  }
  return bias;
}

std::vector<double> BiasLogits(std::span<const double> base, const SchemeConfig& config,
                               std::span<const TokenId> context) {
  for (double v : base) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNumericalError, "non-finite base logit");
  }
  const int n = static_cast<int>(base.size());
  std::vector<double> out(base.begin(), base.end());
  switch (config.kind) {
    case SchemeKind::kKgwLike:
    case SchemeKind::kPrwLike: {
      const GreenMask mask = config.kind == SchemeKind::kKgwLike
                                 ? GreenMaskKgw(config, context, n)
                                 : GreenMaskPrw(config, n);
      for (int t = 0; t < n; ++t) {
        if (mask[t]) out[t] += config.delta;
      }
      break;
    }
    case SchemeKind::kSirLike: {
      const auto bias = SirBias(config, context, n);
      for (int t = 0; t < n; ++t) out[t] += bias[t];
      break;
    }
  }
  return out;
}

Watermark::Watermark(const SchemeConfig& config, int vocab_size)
    : config_(config), id_(SchemeId(config)), vocab_size_(vocab_size) {
  CheckVocab(vocab_size);
  config_.Validate();
  words_per_row_ = (vocab_size + 63) / 64;
  auto marker = [this](int64_t row) {
    return [this, row](TokenId id) {
      rows_[row * words_per_row_ + id / 64] |= uint64_t{1} << (id % 64);
    };
  };
  switch (config_.kind) {
    case SchemeKind::kKgwLike: {
      rows_.assign(static_cast<size_t>(vocab_size + 1) * words_per_row_, 0);
      std::vector<uint64_t> scratch;
      std::vector<TokenId> order;
      for (int prev = 0; prev <= vocab_size; ++prev) {
        const uint64_t seed_id = prev == vocab_size ? kContextSentinel : prev;
        KgwMarks(config_, seed_id, vocab_size, scratch, order, marker(prev));
      }
      break;
    }
    case SchemeKind::kPrwLike:
      rows_.assign(words_per_row_, 0);
      PrwMarks(config_, vocab_size, marker(0));
      break;
    case SchemeKind::kSirLike:
      sir_basis_.resize(static_cast<size_t>(vocab_size) * kSirDims);
      sir_features_.resize(static_cast<size_t>(vocab_size) * kSirDims);
      sir_sentinel_.resize(kSirDims);
      for (int t = 0; t < vocab_size; ++t) {
        std::span<double> r(sir_basis_.data() + static_cast<size_t>(t) * kSirDims, kSirDims);
        SirBasisVector(t, r);
        SirFeature(config_.key, static_cast<uint64_t>(t),
                   {sir_features_.data() + static_cast<size_t>(t) * kSirDims, kSirDims});
      }
      SirFeature(config_.key, kContextSentinel, sir_sentinel_);
      break;
  }
}

int64_t Watermark::MaskRow(std::span<const TokenId> context) const {
  if (config_.kind == SchemeKind::kPrwLike) return 0;
  if (context.empty()) return vocab_size_;
  const TokenId prev = context.back();
  return prev >= 0 && prev < vocab_size_ ? prev : -1;
}

std::span<const uint64_t> Watermark::Row(int64_t row) const {
  return {rows_.data() + row * words_per_row_, static_cast<size_t>(words_per_row_)};
}

void Watermark::SirEmbedding(std::span<const TokenId> context, std::span<double> e) const {
  if (context.empty()) {
    std::copy(sir_sentinel_.begin(), sir_sentinel_.end(), e.begin());
  } else {
    std::fill(e.begin(), e.end(), 0.0);
    std::vector<double> scratch;
    const size_t n = std::min<size_t>(context.size(), config_.chunk_length);
    for (TokenId t : context.last(n)) {
      const double* g;
      if (t >= 0 && t < vocab_size_) {
        g = sir_features_.data() + static_cast<size_t>(t) * kSirDims;
      } else {
        scratch.resize(kSirDims);
        SirFeature(config_.key, static_cast<uint32_t>(t), scratch);
        g = scratch.data();
      }
      for (int j = 0; j < kSirDims; ++j) e[j] += g[j];
    }
  }
  Normalize(e);
}

double Watermark::SirProjection(std::span<const double> e, TokenId token) const {
  return Dot(e, {sir_basis_.data() + static_cast<size_t>(token) * kSirDims, kSirDims});
}

GreenMask Watermark::Mask(std::span<const TokenId> context) const {
  GreenMask mask(vocab_size_);
  if (config_.kind == SchemeKind::kSirLike) {
    double e[kSirDims];
    SirEmbedding(context, e);
    for (int t = 0; t < vocab_size_; ++t) mask.Set(t, SirProjection(e, t) >= 0.0);
    return mask;
  }
  const int64_t row = MaskRow(context);
  if (row < 0) return GreenMaskKgw(config_, context, vocab_size_);
  const auto bits = Row(row);
  for (int t = 0; t < vocab_size_; ++t) mask.Set(t, (bits[t / 64] >> (t % 64)) & 1);
  return mask;
}

bool Watermark::IsGreen(std::span<const TokenId> context, TokenId token) const {
  if (token < 0 || token >= vocab_size_) return false;
  if (config_.kind == SchemeKind::kSirLike) {
    double e[kSirDims];
    SirEmbedding(context, e);
    return SirProjection(e, token) >= 0.0;
  }
  const int64_t row = MaskRow(context);
  if (row < 0) return GreenMaskKgw(config_, context, vocab_size_)[token];
  return (Row(row)[token / 64] >> (token % 64)) & 1;
}

void Watermark::ApplyBias(std::span<const TokenId> context, std::span<double> logits) const {
  const double delta = config_.delta;
  if (config_.kind == SchemeKind::kSirLike) {
    double e[kSirDims];
    SirEmbedding(context, e);
    for (int t = 0; t < vocab_size_; ++t) {
      logits[t] += SirProjection(e, t) >= 0.0 ? delta : -delta;
    }
    return;
  }
  const int64_t row = MaskRow(context);
  if (row < 0) {
    const GreenMask mask = GreenMaskKgw(config_, context, vocab_size_);
    for (int t = 0; t < vocab_size_; ++t) {
      if (mask[t]) logits[t] += delta;
    }
    return;
  }
  const auto bits = Row(row);
  for (int w = 0; w < words_per_row_; ++w) {
    uint64_t word = bits[w];
    while (word != 0) {
      const int b = std::countr_zero(word);
      logits[w * 64 + b] += delta;
      word &= word - 1;
    }
  }
}

}  // namespace wmcollide
