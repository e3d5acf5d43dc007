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

#include "wmcollide/vocabulary.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <utility>

#include "wmcollide/error.h"

namespace wmcollide {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kCorpusEmpty: return "CorpusEmpty";
    case ErrorCode::kCorpusTooSmall: return "CorpusTooSmall";
    case ErrorCode::kBadConfig: return "BadConfig";
    case ErrorCode::kNumericalError: return "NumericalError";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kCalibrationError: return "CalibrationError";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kFilterExhausted: return "FilterExhausted";
  }
  return "Unknown";
}

namespace {

bool IsSpace(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool IsAsciiPunct(unsigned char c) {
  return c < 0x80 && std::ispunct(c);
}

}  // namespace

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) out.push_back(std::exchange(word, {}));
  };
  for (unsigned char c : text) {
    if (IsSpace(c)) {
      flush();
    } else if (IsAsciiPunct(c)) {
      flush();
      out.emplace_back(1, static_cast<char>(c));
    } else {
      word.push_back(c < 0x80 ? static_cast<char>(std::tolower(c))
                              : static_cast<char>(c));
    }
  }
  flush();
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> words) {
  tokens_.reserve(words.size() + kNumReservedTokens);
  tokens_.emplace_back(kBosToken);
  tokens_.emplace_back(kEosToken);
  tokens_.emplace_back(kUnkToken);
  for (auto& w : words) tokens_.push_back(std::move(w));
  index_.reserve(tokens_.size());
  for (size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<TokenId>(i)).second) {
      throw Error(ErrorCode::kBadConfig, "duplicate token '" + tokens_[i] + "'");
    }
  }
}

TokenId Vocabulary::Lookup(std::string_view token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnkId : it->second;
}

bool Vocabulary::Contains(std::string_view token) const {
  return index_.find(token) != index_.end();
}

std::vector<TokenId> Vocabulary::Encode(std::span<const std::string> tokens) const {
  std::vector<TokenId> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(Lookup(t));
  return ids;
}

std::vector<TokenId> Vocabulary::EncodeText(std::string_view text) const {
  const auto tokens = Tokenize(text);
  return Encode(tokens);
}

std::string Vocabulary::Decode(std::span<const TokenId> ids) const {
  std::string out;
  for (TokenId id : ids) {
    if (!out.empty()) out.push_back(' ');
    out += (id >= 0 && id < size()) ? tokens_[id] : std::string(kUnkToken);
  }
  return out;
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIoError, "read failed: " + path.string());
  return std::move(ss).str();
}

Vocabulary IngestText(std::string_view text, int max_vocab) {
  if (max_vocab < 1) throw Error(ErrorCode::kBadConfig, "max_vocab must be >= 1");
  std::unordered_map<std::string, int64_t> freq;
  for (auto& t : Tokenize(text)) ++freq[std::move(t)];
  for (auto reserved : {kBosToken, kEosToken, kUnkToken}) {
    freq.erase(std::string(reserved));
  }
  if (freq.empty()) throw Error(ErrorCode::kCorpusEmpty, "corpus has no tokens");

  std::vector<std::pair<std::string, int64_t>> ranked(freq.begin(), freq.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (ranked.size() > static_cast<size_t>(max_vocab)) ranked.resize(max_vocab);

  std::vector<std::string> words;
  words.reserve(ranked.size());
  for (auto& [w, _] : ranked) words.push_back(std::move(w));
  return Vocabulary(std::move(words));
}

Vocabulary IngestCorpus(const std::filesystem::path& path, int max_vocab) {
  return IngestText(ReadTextFile(path), max_vocab);
}

}  // namespace wmcollide
