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

#include "wmcollide/synthetic_corpus.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "wmcollide/error.h"
#include "wmcollide/hash.h"

namespace wmcollide {
namespace {

constexpr const char* kSyllables[] = {
    "ka", "lo",  "mi",  "ne",  "ru",  "ta", "po", "si", "de", "va",
    "gu", "fe",  "zo",  "be",  "ni",  "sha", "tor", "pel", "dan", "ric",
    "mo", "lin", "ar",  "est", "ul",  "ver", "qua", "ost", "im", "eb"};
constexpr int kNumSyllables = sizeof(kSyllables) / sizeof(kSyllables[0]);

class Draw {
 public:
  explicit Draw(uint64_t seed) : stream_(Mix64(seed)) {}
  double Unit() { return UnitInterval(stream_.Next()); }
  int Below(int n) { return static_cast<int>(stream_.Next() % static_cast<uint64_t>(n)); }
  int Categorical(const std::vector<double>& cdf) {
    const double u = Unit() * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return static_cast<int>(std::min<size_t>(it - cdf.begin(), cdf.size() - 1));
  }

 private:
  SplitMix64 stream_;
};

std::vector<double> ToCdf(std::vector<double> w) {
  for (size_t i = 1; i < w.size(); ++i) w[i] += w[i - 1];
  return w;
}

}  // namespace

std::string SynthesizeCorpus(const SyntheticCorpusOptions& o) {
  if (o.num_words < 1 || o.num_classes < 2 || o.num_tokens < 1 ||
      o.successors_per_state < 1 || o.successors_per_state > o.num_classes ||
      o.min_sentence < 1 || o.max_sentence < o.min_sentence) {
    throw Error(ErrorCode::kBadConfig, "invalid synthetic corpus options");
  }
  Draw draw(o.seed);

  std::vector<std::string> words;
  std::unordered_set<std::string> seen;
  while (static_cast<int>(words.size()) < o.num_words) {
    const int syllables = 1 + draw.Below(3);
    std::string w;
    for (int s = 0; s < syllables; ++s) w += kSyllables[draw.Below(kNumSyllables)];
    if (seen.insert(w).second) words.push_back(std::move(w));
  }

  std::vector<std::vector<int>> members(o.num_classes);
  for (int i = 0; i < o.num_words; ++i) members[draw.Below(o.num_classes)].push_back(i);
  std::vector<std::vector<double>> emission(o.num_classes);
  for (int c = 0; c < o.num_classes; ++c) {
    if (members[c].empty()) members[c].push_back(draw.Below(o.num_words));
    std::vector<double> w(members[c].size());
    for (size_t r = 0; r < w.size(); ++r) {
      w[r] = 1.0 / std::pow(static_cast<double>(r + 1), o.zipf_exponent);
    }
    // Shuffle ranks so frequent words are spread across the id space.
    for (size_t i = w.size(); i > 1; --i) std::swap(w[i - 1], w[draw.Below(static_cast<int>(i))]);
    emission[c] = ToCdf(std::move(w));
  }

  struct Transition {
    std::vector<int> next;
    std::vector<double> cdf;
  };
  std::unordered_map<int64_t, Transition> chain;
  auto transition = [&](int a, int b) -> const Transition& {
    const int64_t key = static_cast<int64_t>(a) * o.num_classes + b;
    auto it = chain.find(key);
    if (it != chain.end()) return it->second;
    Transition t;
    std::vector<double> w;
    while (static_cast<int>(t.next.size()) < o.successors_per_state) {
      const int c = draw.Below(o.num_classes);
      if (std::find(t.next.begin(), t.next.end(), c) != t.next.end()) continue;
      t.next.push_back(c);
      // Exponential weights give Dirichlet(1)-like skew after normalizing.
      w.push_back(-std::log(1.0 - draw.Unit()));
    }
    t.cdf = ToCdf(std::move(w));
    return chain.emplace(key, std::move(t)).first->second;
  };

  std::string out;
  int64_t produced = 0;
  while (produced < o.num_tokens) {
    const int length = o.min_sentence + draw.Below(o.max_sentence - o.min_sentence + 1);
    int a = 0, b = 1;
    std::string sentence;
    for (int i = 0; i < length; ++i) {
      const Transition& t = transition(a, b);
      const int c = t.next[draw.Categorical(t.cdf)];
      const int word = members[c][draw.Categorical(emission[c])];
      if (!sentence.empty()) sentence.push_back(' ');
      sentence += words[word];
      a = b;
      b = c;
    }
    out += sentence;
    out += " .\n";
    produced += length + 1;
  }
  return out;
}

}  // namespace wmcollide
