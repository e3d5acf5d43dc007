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

#include "wmcollide/text_sample.h"

#include "wmcollide/error.h"

namespace wmcollide {

std::string_view RoleName(TextRole role) {
  switch (role) {
    case TextRole::kRaw: return "raw";
    case TextRole::kWatermarked: return "tw";
    case TextRole::kUnwatermarkedGen: return "tw_prime";
    case TextRole::kParaphrasedDual: return "tp";
    case TextRole::kParaphrasedSingle: return "tp_prime";
  }
  return "?";
}

TextRole ParseRole(std::string_view name) {
  for (auto r : {TextRole::kRaw, TextRole::kWatermarked, TextRole::kUnwatermarkedGen,
                 TextRole::kParaphrasedDual, TextRole::kParaphrasedSingle}) {
    if (RoleName(r) == name) return r;
  }
  throw Error(ErrorCode::kFormatError, "unknown role '" + std::string(name) + "'");
}

void TextSample::Validate() const {
  switch (role) {
    case TextRole::kParaphrasedDual:
      if (!watermarker_id || !paraphraser_id) {
        throw Error(ErrorCode::kBadConfig, "dual-watermark sample needs both scheme ids");
      }
      break;
    case TextRole::kWatermarked:
      if (!watermarker_id || paraphraser_id) {
        throw Error(ErrorCode::kBadConfig,
                    "watermarked sample needs a watermarker id and no paraphraser id");
      }
      break;
    case TextRole::kUnwatermarkedGen:
    case TextRole::kRaw:
      if (paraphraser_id) {
        throw Error(ErrorCode::kBadConfig, "unparaphrased sample has a paraphraser id");
      }
      break;
    case TextRole::kParaphrasedSingle:
      break;
  }
}

}  // namespace wmcollide
