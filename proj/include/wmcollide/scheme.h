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

#ifndef WMCOLLIDE_SCHEME_H_
#define WMCOLLIDE_SCHEME_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace wmcollide {

enum class SchemeKind {
  kKgwLike,  // green list re-seeded from the previous token every step
  kPrwLike,  // one fixed green/red split of the vocabulary
  kSirLike,  // +/- delta bias from a hashed embedding of the recent context
};

enum class Seeding { kPrevToken, kSelfHash };

enum class Strength { kWeak, kStrong };

inline constexpr uint64_t kWatermarkerKey = 2024;
inline constexpr uint64_t kParaphraserKey = 2023;
inline constexpr double kWeakDelta = 2.0;
inline constexpr double kStrongDelta = 5.0;

// One watermark identity. Fields that a kind does not use are ignored by it:
// PrwLike ignores seeding and chunk_length, KgwLike ignores chunk_length,
// SirLike ignores seeding.
struct SchemeConfig {
  SchemeKind kind = SchemeKind::kKgwLike;
  uint64_t key = kWatermarkerKey;
  double gamma = 0.25;
  double delta = kWeakDelta;
  Seeding seeding = Seeding::kSelfHash;
  int chunk_length = 10;
  Strength strength = Strength::kWeak;

  // Default hyperparameters for a kind at a strength: gamma 0.25 (0.5 for
  // SirLike), delta 2 / 5, self-hash seeding, chunk length 10.
  static SchemeConfig Preset(SchemeKind kind, Strength strength, uint64_t key);

  // Throws kBadConfig when a field is outside its domain.
  void Validate() const;

  friend bool operator==(const SchemeConfig&, const SchemeConfig&) = default;
};

std::string_view KindName(SchemeKind kind);        // "kgw", "prw", "sir"
std::string_view StrengthName(Strength strength);  // "weak", "strong"
std::string_view SeedingName(Seeding seeding);     // "prev", "selfhash"
SchemeKind ParseKind(std::string_view name);
Strength ParseStrength(std::string_view name);
Seeding ParseSeeding(std::string_view name);

// Canonical, reversible identifier carrying every field the kind uses, e.g.
//   kgw/weak/key=2024/gamma=0.25/delta=2/seeding=selfhash
//   sir/strong/key=2023/gamma=0.5/delta=5/chunk=10
// ParseSchemeId(SchemeId(c)) reproduces c up to ignored fields.
std::string SchemeId(const SchemeConfig& config);
SchemeConfig ParseSchemeId(std::string_view id);

// "kgw_weak" style label used in report tables.
std::string SchemeLabel(const SchemeConfig& config);

// Shortest decimal text that parses back to the same double.
std::string FormatDouble(double v);

}  // namespace wmcollide

#endif  // WMCOLLIDE_SCHEME_H_
