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

#include "wmcollide/token_model.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

#include "wmcollide/error.h"

namespace wmcollide {
namespace {

constexpr int kMaxOrder = 16;
constexpr std::string_view kMagic = "wmcollide-token-model";
constexpr int kFormatVersion = 1;

}  // namespace

int64_t TokenModel::ContextStats::Count(TokenId t) const {
  auto it = std::lower_bound(next.begin(), next.end(), t);
  if (it == next.end() || *it != t) return 0;
  const size_t i = static_cast<size_t>(it - next.begin());
  return cumulative[i] - (i == 0 ? 0 : cumulative[i - 1]);
}

std::string_view TokenModel::KeyOf(std::span<const TokenId> ids) {
  return {reinterpret_cast<const char*>(ids.data()), ids.size_bytes()};
}

void TokenModel::CheckConfig() const {
  if (order_ < 1 || order_ > kMaxOrder) {
    throw Error(ErrorCode::kBadConfig,
                "order must be in [1, " + std::to_string(kMaxOrder) + "]");
  }
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) {
    throw Error(ErrorCode::kBadConfig, "alpha must be finite and > 0");
  }
}

TokenModel::TokenModel(Vocabulary vocab, int order, double alpha,
                       std::vector<Table> tables)
    : vocab_(std::move(vocab)), order_(order), alpha_(alpha),
      tables_(std::move(tables)) {
  CheckConfig();
}

TokenModel::TokenModel(Vocabulary vocab, std::span<const TokenId> stream,
                       int order, double alpha)
    : vocab_(std::move(vocab)), order_(order), alpha_(alpha) {
  CheckConfig();
  if (stream.empty()) throw Error(ErrorCode::kCorpusEmpty, "empty token stream");

  std::vector<TokenId> ids;
  ids.reserve(stream.size() + 2);
  ids.push_back(kBosId);
  for (TokenId t : stream) ids.push_back(Canonical(t));
  ids.push_back(kEosId);

  // Sorted maps during counting keep successor lists ordered for free.
  std::vector<std::unordered_map<std::string, std::map<TokenId, int64_t>,
                                 KeyHash, std::equal_to<>>>
      counts(order_ + 1);
  for (size_t i = 1; i < ids.size(); ++i) {
    const size_t max_len = std::min<size_t>(order_, i);
    for (size_t len = 0; len <= max_len; ++len) {
      std::span<const TokenId> ctx(ids.data() + i - len, len);
      auto key = KeyOf(ctx);
      auto it = counts[len].find(key);
      if (it == counts[len].end()) {
        it = counts[len].emplace(std::string(key), std::map<TokenId, int64_t>{}).first;
      }
      ++it->second[ids[i]];
    }
  }

  tables_.resize(order_ + 1);
  for (int len = 0; len <= order_; ++len) {
    tables_[len].reserve(counts[len].size());
    for (auto& [key, successors] : counts[len]) {
      ContextStats stats;
      stats.next.reserve(successors.size());
      stats.cumulative.reserve(successors.size());
      for (const auto& [t, c] : successors) {
        stats.total += c;
        stats.next.push_back(t);
        stats.cumulative.push_back(stats.total);
      }
      tables_[len].emplace(key, std::move(stats));
    }
  }
}

const TokenModel::ContextStats* TokenModel::Find(
    std::span<const TokenId> context) const {
  if (context.size() > static_cast<size_t>(order_)) return nullptr;
  const auto& table = tables_[context.size()];
  auto it = table.find(KeyOf(context));
  return it == table.end() ? nullptr : &it->second;
}

namespace {

// Copies the trailing `order` ids of `context` with out-of-vocabulary ids
// replaced by <unk>.
struct CanonicalContext {
  std::array<TokenId, kMaxOrder> ids{};
  size_t size = 0;
  std::span<const TokenId> Suffix(size_t len) const {
    return {ids.data() + size - len, len};
  }
};

}  // namespace

int TokenModel::ResolvedOrder(std::span<const TokenId> context) const {
  CanonicalContext ctx;
  ctx.size = std::min<size_t>(context.size(), order_);
  const size_t offset = context.size() - ctx.size;
  for (size_t i = 0; i < ctx.size; ++i) ctx.ids[i] = Canonical(context[offset + i]);
  for (size_t len = ctx.size; len > 0; --len) {
    if (Find(ctx.Suffix(len)) != nullptr) return static_cast<int>(len);
  }
  return 0;
}

const TokenModel::ContextStats& TokenModel::Resolve(
    std::span<const TokenId> context) const {
  CanonicalContext ctx;
  ctx.size = std::min<size_t>(context.size(), order_);
  const size_t offset = context.size() - ctx.size;
  for (size_t i = 0; i < ctx.size; ++i) ctx.ids[i] = Canonical(context[offset + i]);
  for (size_t len = ctx.size; len > 0; --len) {
    if (const ContextStats* s = Find(ctx.Suffix(len))) return *s;
  }
  return tables_[0].begin()->second;
}

std::vector<double> TokenModel::Probabilities(std::span<const TokenId> context) const {
  const ContextStats& s = Resolve(context);
  const double denom = static_cast<double>(s.total) + alpha_ * vocab_size();
  std::vector<double> p(vocab_size(), alpha_ / denom);
  for (size_t i = 0; i < s.next.size(); ++i) {
    p[s.next[i]] = (static_cast<double>(s.Count(s.next[i])) + alpha_) / denom;
  }
  return p;
}

double TokenModel::Probability(std::span<const TokenId> context, TokenId token) const {
  const ContextStats& s = Resolve(context);
  return (static_cast<double>(s.Count(Canonical(token))) + alpha_) /
         (static_cast<double>(s.total) + alpha_ * vocab_size());
}

void TokenModel::LogitsInto(std::span<const TokenId> context,
                            std::span<double> out) const {
  const ContextStats& s = Resolve(context);
  const double log_denom =
      std::log(static_cast<double>(s.total) + alpha_ * vocab_size());
  std::fill(out.begin(), out.end(), std::log(alpha_) - log_denom);
  int64_t prev = 0;
  for (size_t i = 0; i < s.next.size(); ++i) {
    const int64_t c = s.cumulative[i] - prev;
    prev = s.cumulative[i];
    out[s.next[i]] = std::log(static_cast<double>(c) + alpha_) - log_denom;
  }
}

std::vector<double> TokenModel::Logits(std::span<const TokenId> context) const {
  std::vector<double> out(vocab_size());
  LogitsInto(context, out);
  return out;
}

TokenId TokenModel::Sample(std::span<const TokenId> context, Rng& rng) const {
  const ContextStats& s = Resolve(context);
  const double mass = static_cast<double>(s.total) + alpha_ * vocab_size();
  const double u = NextUnit(rng) * mass;
  // The mixture splits into observed counts plus a uniform alpha floor.
  if (u < static_cast<double>(s.total)) {
    const auto target = static_cast<int64_t>(u);
    auto it = std::upper_bound(s.cumulative.begin(), s.cumulative.end(), target);
    return s.next[static_cast<size_t>(it - s.cumulative.begin())];
  }
  const auto t = static_cast<TokenId>((u - static_cast<double>(s.total)) / alpha_);
  return std::min(t, static_cast<TokenId>(vocab_size() - 1));
}

bool operator==(const TokenModel& a, const TokenModel& b) {
  if (a.order_ != b.order_ || a.alpha_ != b.alpha_ || !(a.vocab_ == b.vocab_) ||
      a.tables_.size() != b.tables_.size()) {
    return false;
  }
  for (size_t len = 0; len < a.tables_.size(); ++len) {
    const auto& ta = a.tables_[len];
    const auto& tb = b.tables_[len];
    if (ta.size() != tb.size()) return false;
    for (const auto& [key, sa] : ta) {
      auto it = tb.find(key);
      if (it == tb.end()) return false;
      const auto& sb = it->second;
      if (sa.total != sb.total || sa.next != sb.next || sa.cumulative != sb.cumulative) {
        return false;
      }
    }
  }
  return true;
}

// Format (one record per line, whitespace-separated):
//   wmcollide-token-model 1
//   order <k>
//   alpha <hex float>
//   vocab <n>            followed by n-3 token lines (reserved ids implicit)
//   contexts <len> <m>   followed by m lines: <ctx ids...> <s> (<id> <count>)*s
// Context blocks are emitted for len = 0..k with contexts in ascending
// lexicographic id order, so equal models serialize to equal bytes.
void TokenModel::Save(std::ostream& out) const {
  out << kMagic << ' ' << kFormatVersion << '\n';
  out << "order " << order_ << '\n';
  out << "alpha " << std::hexfloat << alpha_ << std::defaultfloat << '\n';
  out << "vocab " << vocab_.size() << '\n';
  for (int i = kNumReservedTokens; i < vocab_.size(); ++i) out << vocab_.token(i) << '\n';
  for (int len = 0; len <= order_; ++len) {
    std::vector<std::pair<std::vector<TokenId>, const ContextStats*>> rows;
    rows.reserve(tables_[len].size());
    for (const auto& [key, stats] : tables_[len]) {
      std::vector<TokenId> ids(len);
      std::copy_n(key.data(), key.size(), reinterpret_cast<char*>(ids.data()));
      rows.emplace_back(std::move(ids), &stats);
    }
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    out << "contexts " << len << ' ' << rows.size() << '\n';
    for (const auto& [ids, stats] : rows) {
      for (TokenId id : ids) out << id << ' ';
      out << stats->next.size();
      for (TokenId t : stats->next) out << ' ' << t << ' ' << stats->Count(t);
      out << '\n';
    }
  }
  if (!out) throw Error(ErrorCode::kIoError, "failed writing token model");
}

void TokenModel::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  Save(out);
}

namespace {

void Expect(std::istream& in, std::string_view word) {
  std::string got;
  if (!(in >> got) || got != word) {
    throw Error(ErrorCode::kFormatError,
                "expected '" + std::string(word) + "', got '" + got + "'");
  }
}

template <typename T>
T ReadValue(std::istream& in, std::string_view what) {
  T v{};
  if (!(in >> v)) {
    throw Error(ErrorCode::kFormatError, "bad or missing " + std::string(what));
  }
  return v;
}

}  // namespace

TokenModel TokenModel::Load(std::istream& in) {
  Expect(in, kMagic);
  const int version = ReadValue<int>(in, "format version");
  if (version != kFormatVersion) {
    throw Error(ErrorCode::kFormatError,
                "unsupported model version " + std::to_string(version));
  }
  Expect(in, "order");
  const int order = ReadValue<int>(in, "order");
  Expect(in, "alpha");
  const std::string alpha_text = ReadValue<std::string>(in, "alpha");
  const double alpha = std::strtod(alpha_text.c_str(), nullptr);
  Expect(in, "vocab");
  const int n = ReadValue<int>(in, "vocab size");
  if (n < kNumReservedTokens) throw Error(ErrorCode::kFormatError, "vocab too small");
  std::vector<std::string> words;
  words.reserve(n - kNumReservedTokens);
  for (int i = kNumReservedTokens; i < n; ++i) {
    words.push_back(ReadValue<std::string>(in, "token"));
  }
  Vocabulary vocab(std::move(words));
  if (order < 1 || order > kMaxOrder) throw Error(ErrorCode::kFormatError, "bad order");

  std::vector<Table> tables(order + 1);
  for (int len = 0; len <= order; ++len) {
    Expect(in, "contexts");
    if (ReadValue<int>(in, "context length") != len) {
      throw Error(ErrorCode::kFormatError, "context blocks out of order");
    }
    const auto m = ReadValue<size_t>(in, "context count");
    tables[len].reserve(m);
    std::vector<TokenId> ids(len);
    for (size_t r = 0; r < m; ++r) {
      for (auto& id : ids) id = ReadValue<TokenId>(in, "context id");
      const auto s = ReadValue<size_t>(in, "successor count");
      ContextStats stats;
      stats.next.reserve(s);
      stats.cumulative.reserve(s);
      for (size_t k = 0; k < s; ++k) {
        const auto t = ReadValue<TokenId>(in, "successor id");
        const auto c = ReadValue<int64_t>(in, "successor count");
        if (t < 0 || t >= n || c <= 0 || (!stats.next.empty() && t <= stats.next.back())) {
          throw Error(ErrorCode::kFormatError, "bad successor entry");
        }
        stats.total += c;
        stats.next.push_back(t);
        stats.cumulative.push_back(stats.total);
      }
      tables[len].emplace(std::string(KeyOf(ids)), std::move(stats));
    }
  }
  if (tables[0].empty()) throw Error(ErrorCode::kFormatError, "missing unigram table");
  return TokenModel(std::move(vocab), order, alpha, std::move(tables));
}

TokenModel TokenModel::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return Load(in);
}

TokenModel TrainLmFromText(std::string_view text, const Vocabulary& vocab,
                           int order, double alpha) {
  const auto ids = vocab.EncodeText(text);
  return TokenModel(vocab, ids, order, alpha);
}

TokenModel TrainLm(const std::filesystem::path& corpus, const Vocabulary& vocab,
                   int order, double alpha) {
  return TrainLmFromText(ReadTextFile(corpus), vocab, order, alpha);
}

}  // namespace wmcollide
