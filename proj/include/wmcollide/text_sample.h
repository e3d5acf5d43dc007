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

#ifndef WMCOLLIDE_TEXT_SAMPLE_H_
#define WMCOLLIDE_TEXT_SAMPLE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wmcollide/vocabulary.h"

namespace wmcollide {

enum class TextRole {
  kRaw,               // corpus text used as the generation prompt
  kWatermarked,       // T_W
  kUnwatermarkedGen,  // T_W'
  kParaphrasedDual,   // T_P: watermarked paraphrase of T_W
  kParaphrasedSingle, // T_P': unwatermarked paraphrase of T_W
};

std::string_view RoleName(TextRole role);  // "raw", "tw", "tw_prime", "tp", "tp_prime"
TextRole ParseRole(std::string_view name);

struct TextSample {
  std::vector<TokenId> tokens;
  TextRole role = TextRole::kRaw;
  std::optional<std::string> watermarker_id;  // SchemeId of W
  std::optional<std::string> paraphraser_id;  // SchemeId of P
  uint64_t seed = 0;

  // Throws kBadConfig when provenance contradicts the role: ParaphrasedDual
  // needs both ids, Watermarked needs the watermarker id and no paraphraser id.
  void Validate() const;

  friend bool operator==(const TextSample&, const TextSample&) = default;
};

}  // namespace wmcollide

#endif  // WMCOLLIDE_TEXT_SAMPLE_H_
