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

#ifndef WMCOLLIDE_VOCABULARY_H_
#define WMCOLLIDE_VOCABULARY_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wmcollide {

using TokenId = int32_t;

inline constexpr TokenId kBosId = 0;
inline constexpr TokenId kEosId = 1;
inline constexpr TokenId kUnkId = 2;
inline constexpr int kNumReservedTokens = 3;

inline constexpr std::string_view kBosToken = "<bos>";
inline constexpr std::string_view kEosToken = "<eos>";
inline constexpr std::string_view kUnkToken = "<unk>";

// Lowercases ASCII letters and splits on whitespace; every ASCII punctuation
// character becomes its own token. Bytes >= 0x80 are kept inside words, so
// UTF-8 sequences are never split.
std::vector<std::string> Tokenize(std::string_view text);

inline bool IsReserved(TokenId id) { return id >= 0 && id < kNumReservedTokens; }

// Dense bijection between token strings and ids. Ids 0..2 are always
// <bos>, <eos>, <unk>.
class Vocabulary {
 public:
  // Reserved tokens followed by words in order. Duplicates or reserved
  // strings among them are rejected with kBadConfig.
  explicit Vocabulary(std::vector<std::string> words = {});

  int size() const { return static_cast<int>(tokens_.size()); }
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // Unknown strings map to kUnkId.
  TokenId Lookup(std::string_view token) const;
  bool Contains(std::string_view token) const;

  std::vector<TokenId> Encode(std::span<const std::string> tokens) const;
  std::vector<TokenId> EncodeText(std::string_view text) const;
  std::string Decode(std::span<const TokenId> ids) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  struct StringHash {
    using is_transparent = void;
    size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId, StringHash, std::equal_to<>> index_;
};

// Reads a UTF-8 text file fully. Throws kIoError.
std::string ReadTextFile(const std::filesystem::path& path);

// Builds the vocabulary from the max_vocab most frequent tokens of the file
// (ties broken lexicographically) plus the three reserved tokens.
// Throws kIoError for unreadable files and kCorpusEmpty when the file has no
// tokens.
Vocabulary IngestCorpus(const std::filesystem::path& path, int max_vocab);
Vocabulary IngestText(std::string_view text, int max_vocab);

}  // namespace wmcollide

#endif  // WMCOLLIDE_VOCABULARY_H_
