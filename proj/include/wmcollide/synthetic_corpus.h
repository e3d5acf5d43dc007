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

#ifndef WMCOLLIDE_SYNTHETIC_CORPUS_H_
#define WMCOLLIDE_SYNTHETIC_CORPUS_H_

#include <cstdint>
#include <string>

namespace wmcollide {

// Parameters of a deterministic English-like text source: pseudo-words from a
// syllable inventory, grouped into word classes; sentences follow a sparse
// class-trigram chain and words within a class are Zipf-distributed.
struct SyntheticCorpusOptions {
  uint64_t seed = 2024;
  int64_t num_tokens = 600'000;
  int num_words = 6000;
  int num_classes = 48;
  int successors_per_state = 4;
  double zipf_exponent = 1.1;
  int min_sentence = 8;
  int max_sentence = 24;
};

// Same options, same bytes, on every platform. Output is newline-separated
// sentences ending in " .".
std::string SynthesizeCorpus(const SyntheticCorpusOptions& options);

}  // namespace wmcollide

#endif  // WMCOLLIDE_SYNTHETIC_CORPUS_H_
