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

#ifndef WMCOLLIDE_TOKEN_MODEL_H_
#define WMCOLLIDE_TOKEN_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wmcollide/sampling.h"
#include "wmcollide/vocabulary.h"

namespace wmcollide {

// Order-k n-gram model with additive smoothing and longest-seen-suffix
// back-off:
//
//   P(t | ctx) = (c(s, t) + alpha) / (c(s) + alpha * |V|)
//
// where s is the longest suffix of ctx (at most `order` tokens) that occurred
// as a context in training. The empty suffix (unigram) always exists, so every
// token has nonzero probability. Immutable after construction.
class TokenModel {
 public:
  struct ContextStats {
    int64_t total = 0;
    std::vector<TokenId> next;        // ascending ids
    std::vector<int64_t> cumulative;  // running count sums, aligned with next
    int64_t Count(TokenId t) const;
  };

  // Counts every window of the stream <bos> corpus... <eos>. Throws
  // kBadConfig for order < 1 or alpha <= 0, kCorpusEmpty for no tokens.
  TokenModel(Vocabulary vocab, std::span<const TokenId> stream, int order,
             double alpha);

  int order() const { return order_; }
  double alpha() const { return alpha_; }
  int vocab_size() const { return vocab_.size(); }
  const Vocabulary& vocab() const { return vocab_; }

  // Length of the suffix of `context` the model actually conditions on.
  int ResolvedOrder(std::span<const TokenId> context) const;

  // Statistics of the resolved context.
  const ContextStats& Resolve(std::span<const TokenId> context) const;

  // nullptr when the exact context was never seen. Ids are used verbatim.
  const ContextStats* Find(std::span<const TokenId> context) const;

  std::vector<double> Probabilities(std::span<const TokenId> context) const;
  double Probability(std::span<const TokenId> context, TokenId token) const;

  // log P(t | context) for every t; finite by construction.
  std::vector<double> Logits(std::span<const TokenId> context) const;
  void LogitsInto(std::span<const TokenId> context, std::span<double> out) const;

  // Exact draw from P(. | context) with a single uniform. Equivalent in
  // distribution to SampleToken(Logits(context), 1.0, rng) but O(log n).
  TokenId Sample(std::span<const TokenId> context, Rng& rng) const;

  // Context ids outside [0, |V|) become <unk>.
  TokenId Canonical(TokenId id) const {
    return id >= 0 && id < vocab_.size() ? id : kUnkId;
  }

  size_t NumContexts(int length) const { return tables_.at(length).size(); }

  // Versioned text format; see docs/formats.md. Round-trips exactly.
  void Save(std::ostream& out) const;
  void Save(const std::filesystem::path& path) const;
  static TokenModel Load(std::istream& in);
  static TokenModel Load(const std::filesystem::path& path);

  friend bool operator==(const TokenModel& a, const TokenModel& b);

 private:
  struct KeyHash {
    using is_transparent = void;
    size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };
  using Table =
      std::unordered_map<std::string, ContextStats, KeyHash, std::equal_to<>>;

  TokenModel(Vocabulary vocab, int order, double alpha, std::vector<Table> tables);

  static std::string_view KeyOf(std::span<const TokenId> ids);
  void CheckConfig() const;

  Vocabulary vocab_;
  int order_;
  double alpha_;
  std::vector<Table> tables_;  // tables_[j] holds contexts of length j
};

// Reads the corpus, encodes it with `vocab` and trains.
TokenModel TrainLm(const std::filesystem::path& corpus, const Vocabulary& vocab,
                   int order, double alpha);
TokenModel TrainLmFromText(std::string_view text, const Vocabulary& vocab,
                           int order, double alpha);

}  // namespace wmcollide

#endif  // WMCOLLIDE_TOKEN_MODEL_H_
