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

#include "wmcollide/scheme.h"

#include <charconv>
#include <cmath>
#include <string>
#include <vector>

#include "wmcollide/error.h"

namespace wmcollide {

SchemeConfig SchemeConfig::Preset(SchemeKind kind, Strength strength, uint64_t key) {
  SchemeConfig c;
  c.kind = kind;
  c.key = key;
  c.strength = strength;
  c.delta = strength == Strength::kStrong ? kStrongDelta : kWeakDelta;
  c.gamma = kind == SchemeKind::kSirLike ? 0.5 : 0.25;
  return c;
}

void SchemeConfig::Validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw Error(ErrorCode::kBadConfig, "gamma must be in (0, 1)");
  }
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw Error(ErrorCode::kBadConfig, "delta must be finite and >= 0");
  }
  if (kind == SchemeKind::kSirLike && chunk_length < 1) {
    throw Error(ErrorCode::kBadConfig, "chunk_length must be >= 1");
  }
}

std::string_view KindName(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::kKgwLike: return "kgw";
    case SchemeKind::kPrwLike: return "prw";
    case SchemeKind::kSirLike: return "sir";
  }
  return "?";
}

std::string_view StrengthName(Strength strength) {
  return strength == Strength::kStrong ? "strong" : "weak";
}

std::string_view SeedingName(Seeding seeding) {
  return seeding == Seeding::kSelfHash ? "selfhash" : "prev";
}

SchemeKind ParseKind(std::string_view name) {
  if (name == "kgw") return SchemeKind::kKgwLike;
  if (name == "prw") return SchemeKind::kPrwLike;
  if (name == "sir") return SchemeKind::kSirLike;
  throw Error(ErrorCode::kBadConfig, "unknown scheme kind '" + std::string(name) + "'");
}

Strength ParseStrength(std::string_view name) {
  if (name == "weak") return Strength::kWeak;
  if (name == "strong") return Strength::kStrong;
  throw Error(ErrorCode::kBadConfig, "unknown strength '" + std::string(name) + "'");
}

Seeding ParseSeeding(std::string_view name) {
  if (name == "selfhash") return Seeding::kSelfHash;
  if (name == "prev") return Seeding::kPrevToken;
  throw Error(ErrorCode::kBadConfig, "unknown seeding '" + std::string(name) + "'");
}

std::string FormatDouble(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string SchemeId(const SchemeConfig& c) {
  std::string id;
  id += KindName(c.kind);
  id += '/';
  id += StrengthName(c.strength);
  id += "/key=" + std::to_string(c.key);
  id += "/gamma=" + FormatDouble(c.gamma);
  id += "/delta=" + FormatDouble(c.delta);
  if (c.kind == SchemeKind::kKgwLike) {
    id += "/seeding=";
    id += SeedingName(c.seeding);
  }
  if (c.kind == SchemeKind::kSirLike) id += "/chunk=" + std::to_string(c.chunk_length);
  return id;
}

namespace {

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  size_t start = 0;
  while (true) {
    const size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <typename T>
T ParseNumber(std::string_view text, std::string_view field) {
  T v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kFormatError,
                "bad value for " + std::string(field) + ": '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

SchemeConfig ParseSchemeId(std::string_view id) {
  const auto parts = Split(id, '/');
  if (parts.size() < 2) {
    throw Error(ErrorCode::kFormatError, "bad scheme id '" + std::string(id) + "'");
  }
  SchemeConfig c = SchemeConfig::Preset(ParseKind(parts[0]), ParseStrength(parts[1]),
                                        kWatermarkerKey);
  for (size_t i = 2; i < parts.size(); ++i) {
    const size_t eq = parts[i].find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kFormatError, "bad scheme id field '" + std::string(parts[i]) + "'");
    }
    const auto name = parts[i].substr(0, eq);
    const auto value = parts[i].substr(eq + 1);
    if (name == "key") {
      c.key = ParseNumber<uint64_t>(value, name);
    } else if (name == "gamma") {
      c.gamma = ParseNumber<double>(value, name);
    } else if (name == "delta") {
      c.delta = ParseNumber<double>(value, name);
    } else if (name == "seeding") {
      c.seeding = ParseSeeding(value);
    } else if (name == "chunk") {
      c.chunk_length = ParseNumber<int>(value, name);
    } else {
      throw Error(ErrorCode::kFormatError, "unknown scheme id field '" + std::string(name) + "'");
    }
  }
  c.Validate();
  return c;
}

std::string SchemeLabel(const SchemeConfig& c) {
  return std::string(KindName(c.kind)) + "_" + std::string(StrengthName(c.strength));
}

}  // namespace wmcollide
