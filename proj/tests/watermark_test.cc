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
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "oracle.h"
#include "wmcollide/error.h"
#include "wmcollide/scheme.h"
#include "wmcollide/watermark.h"

namespace wmcollide {
namespace {

SchemeConfig Kgw(Seeding seeding, uint64_t key = kWatermarkerKey) {
  SchemeConfig c = SchemeConfig::Preset(SchemeKind::kKgwLike, Strength::kWeak, key);
  c.seeding = seeding;
  return c;
}

SchemeConfig Of(SchemeKind kind, Strength s = Strength::kWeak, uint64_t key = kWatermarkerKey) {
  return SchemeConfig::Preset(kind, s, key);
}

std::vector<bool> Bits(const GreenMask& m) {
  std::vector<bool> out(m.size());
  for (int i = 0; i < m.size(); ++i) out[i] = m[i];
  return out;
}

std::vector<TokenId> RandomContext(std::mt19937_64& rng, int v, int len) {
  std::uniform_int_distribution<TokenId> pick(0, v - 1);
  std::vector<TokenId> ctx(len);
  for (auto& t : ctx) t = pick(rng);
  return ctx;
}

TEST(GreenListSizeTest, RoundsGammaV) {
  EXPECT_EQ(GreenListSize(0.25, 5000), 1250);
  EXPECT_EQ(GreenListSize(0.5, 4), 2);
  EXPECT_EQ(GreenListSize(0.25, 16), 4);
  EXPECT_EQ(GreenListSize(0.3, 7), 2);
}

TEST(KgwTest, MatchesOracleBothSeedings) {
  std::mt19937_64 rng(1);
  for (Seeding s : {Seeding::kSelfHash, Seeding::kPrevToken}) {
    for (int v : {4, 16, 37, 300}) {
      const auto c = Kgw(s);
      const Watermark wm(c, v);
      for (int trial = 0; trial < 20; ++trial) {
        const auto ctx = RandomContext(rng, v, trial % 3);
        const auto expect = oracle::KgwGreen(c, ctx, v);
        EXPECT_EQ(Bits(GreenMaskKgw(c, ctx, v)), expect) << SeedingName(s) << " v=" << v;
        EXPECT_EQ(Bits(wm.Mask(ctx)), expect) << SeedingName(s) << " v=" << v;
      }
    }
  }
}

TEST(KgwTest, CardinalityIsExact) {
  std::mt19937_64 rng(2);
  for (Seeding s : {Seeding::kSelfHash, Seeding::kPrevToken}) {
    const Watermark wm(Kgw(s), 5000);
    for (int i = 0; i < 50; ++i) {
      EXPECT_EQ(wm.Mask(RandomContext(rng, 5000, 1)).Count(), 1250);
    }
  }
  SchemeConfig half = Kgw(Seeding::kSelfHash);
  half.gamma = 0.5;
  EXPECT_EQ(GreenMaskKgw(half, {}, 4).Count(), 2);
}

TEST(KgwTest, OnlyLastTokenMatters) {
  const Watermark wm(Kgw(Seeding::kSelfHash), 200);
  const std::vector<TokenId> a{5, 9, 17}, b{100, 3, 17};
  EXPECT_EQ(wm.Mask(a), wm.Mask(b));
  EXPECT_NE(wm.Mask(a), wm.Mask(std::vector<TokenId>{5, 9, 18}));
}

TEST(KgwTest, IndependentKeysOverlapAtGamma) {
  // Two unrelated keys share about gamma of each green list.
  const int v = 5000;
  const Watermark a(Kgw(Seeding::kSelfHash, kWatermarkerKey), v);
  const Watermark b(Kgw(Seeding::kSelfHash, kParaphraserKey), v);
  double total = 0.0;
  for (TokenId prev = 0; prev < 1000; ++prev) {
    const std::vector<TokenId> ctx{prev};
    const auto ma = a.Mask(ctx), mb = b.Mask(ctx);
    int both = 0;
    for (int t = 0; t < v; ++t) both += ma[t] && mb[t];
    total += static_cast<double>(both) / ma.Count();
  }
  EXPECT_NEAR(total / 1000, 0.25, 0.03);
}

TEST(KgwTest, KeySensitivity) {
  const auto a = GreenMaskKgw(Kgw(Seeding::kSelfHash, 1), std::vector<TokenId>{3}, 1000);
  const auto b = GreenMaskKgw(Kgw(Seeding::kSelfHash, 2), std::vector<TokenId>{3}, 1000);
  EXPECT_NE(a, b);
}

TEST(KgwTest, DeterministicAcrossInstances) {
  const auto c = Kgw(Seeding::kPrevToken);
  const Watermark a(c, 777), b(c, 777);
  for (TokenId p = 0; p < 50; ++p) {
    EXPECT_EQ(a.Mask(std::vector<TokenId>{p}), b.Mask(std::vector<TokenId>{p}));
  }
}

TEST(PrwTest, MatchesOracleAndIgnoresContext) {
  const auto c = Of(SchemeKind::kPrwLike);
  for (int v : {4, 16, 1000}) {
    const auto expect = oracle::PrwGreen(c, v);
    EXPECT_EQ(Bits(GreenMaskPrw(c, v)), expect);
    const Watermark wm(c, v);
    std::mt19937_64 rng(v);
    for (int i = 0; i < 10; ++i) {
      EXPECT_EQ(Bits(wm.Mask(RandomContext(rng, v, i))), expect);
    }
  }
  EXPECT_EQ(GreenMaskPrw(c, 5000).Count(), 1250);
}

TEST(SirTest, MatchesOracle) {
  std::mt19937_64 rng(3);
  for (int chunk : {1, 3, 10}) {
    SchemeConfig c = Of(SchemeKind::kSirLike, Strength::kStrong);
    c.chunk_length = chunk;
    const int v = 64;
    const Watermark wm(c, v);
    for (int i = 0; i < 15; ++i) {
      const auto ctx = RandomContext(rng, v, i);
      const auto expect = oracle::SirPositive(c, ctx, v);
      const auto bias = SirBias(c, ctx, v);
      const auto mask = wm.Mask(ctx);
      for (int t = 0; t < v; ++t) {
        EXPECT_EQ(bias[t], expect[t] ? c.delta : -c.delta);
        EXPECT_EQ(mask[t], expect[t]);
      }
    }
  }
}

TEST(SirTest, BiasIsBalanced) {
  std::mt19937_64 rng(4);
  const int v = 5000;
  const auto c = Of(SchemeKind::kSirLike);
  for (int i = 0; i < 100; ++i) {
    const auto bias = SirBias(c, RandomContext(rng, v, 1 + i % 12), v);
    double mean = 0.0;
    for (double b : bias) mean += b / c.delta;
    EXPECT_LE(std::abs(mean / v), 3.0 / std::sqrt(v));
  }
}

TEST(SirTest, DependsOnlyOnRecentWindow) {
  SchemeConfig c = Of(SchemeKind::kSirLike);
  c.chunk_length = 4;
  const Watermark wm(c, 500);
  const std::vector<TokenId> a{1, 2, 3, 10, 11, 12, 13};
  const std::vector<TokenId> b{400, 300, 10, 11, 12, 13};
  EXPECT_EQ(wm.Mask(a), wm.Mask(b));
  // Same multiset of recent tokens, same embedding.
  const std::vector<TokenId> perm{13, 12, 11, 10};
  EXPECT_EQ(wm.Mask(a), wm.Mask(perm));
  EXPECT_NE(wm.Mask(a), wm.Mask(std::vector<TokenId>{10, 11, 12, 14}));
}

TEST(BiasTest, ZeroDeltaIsIdentity) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  for (SchemeKind kind : {SchemeKind::kKgwLike, SchemeKind::kPrwLike, SchemeKind::kSirLike}) {
    SchemeConfig c = Of(kind);
    c.delta = 0.0;
    std::vector<double> base(300);
    for (double& x : base) x = n01(rng);
    const std::vector<TokenId> ctx{7, 8};
    EXPECT_EQ(BiasLogits(base, c, ctx), base);
    auto copy = base;
    Watermark(c, 300).ApplyBias(ctx, copy);
    EXPECT_EQ(copy, base);
  }
}

TEST(BiasTest, KgwAddsDeltaOnGreenOnly) {
  const auto c = Of(SchemeKind::kKgwLike, Strength::kStrong);
  const std::vector<double> base(400, 0.0);
  const std::vector<TokenId> ctx{42};
  const auto out = BiasLogits(base, c, ctx);
  const auto green = oracle::KgwGreen(c, ctx, 400);
  for (int t = 0; t < 400; ++t) EXPECT_EQ(out[t], green[t] ? 5.0 : 0.0);
  std::vector<double> table(400, 0.0);
  Watermark(c, 400).ApplyBias(ctx, table);
  EXPECT_EQ(table, out);
}

double GreenMass(std::span<const double> logits, const GreenMask& mask) {
  double mx = -INFINITY;
  for (double l : logits) mx = std::max(mx, l);
  double z = 0.0, g = 0.0;
  for (int t = 0; t < mask.size(); ++t) {
    const double p = std::exp(logits[t] - mx);
    z += p;
    if (mask[t]) g += p;
  }
  return g / z;
}

TEST(BiasTest, GreenMassGrowsWithDelta) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n01(0.0, 2.0);
  const int v = 200;
  for (SchemeKind kind : {SchemeKind::kKgwLike, SchemeKind::kPrwLike, SchemeKind::kSirLike}) {
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> base(v);
      for (double& x : base) x = n01(rng);
      const auto ctx = RandomContext(rng, v, 2);
      SchemeConfig c = Of(kind);
      const GreenMask mask = Watermark(c, v).Mask(ctx);
      double last = GreenMass(base, mask);
      for (double delta : {0.5, 1.0, 2.0, 5.0}) {
        c.delta = delta;
        const double mass = GreenMass(BiasLogits(base, c, ctx), mask);
        EXPECT_GE(mass, last);
        last = mass;
      }
    }
  }
}

TEST(BiasTest, RejectsNonFinite) {
  std::vector<double> base(10, 0.0);
  base[3] = NAN;
  EXPECT_THROW(BiasLogits(base, Of(SchemeKind::kPrwLike), {}), Error);
}

TEST(SchemeTest, PresetsAndValidation) {
  const auto w = Of(SchemeKind::kKgwLike, Strength::kWeak);
  EXPECT_EQ(w.gamma, 0.25);
  EXPECT_EQ(w.delta, 2.0);
  const auto s = Of(SchemeKind::kSirLike, Strength::kStrong);
  EXPECT_EQ(s.gamma, 0.5);
  EXPECT_EQ(s.delta, 5.0);
  SchemeConfig bad = w;
  bad.gamma = 1.0;
  EXPECT_THROW(bad.Validate(), Error);
  bad = w;
  bad.delta = -1;
  EXPECT_THROW(bad.Validate(), Error);
  EXPECT_THROW(GreenMaskKgw(w, {}, 3), Error);
  EXPECT_THROW(GreenMaskPrw(w, 100), Error);
}

TEST(SchemeTest, IdRoundTrip) {
  std::set<std::string> ids;
  for (SchemeKind k : {SchemeKind::kKgwLike, SchemeKind::kPrwLike, SchemeKind::kSirLike}) {
    for (Strength s : {Strength::kWeak, Strength::kStrong}) {
      for (uint64_t key : {kWatermarkerKey, kParaphraserKey}) {
        SchemeConfig c = Of(k, s, key);
        c.gamma = k == SchemeKind::kSirLike ? 0.5 : 0.3;
        const auto id = SchemeId(c);
        ids.insert(id);
        const auto back = ParseSchemeId(id);
        EXPECT_EQ(SchemeId(back), id);
        EXPECT_EQ(back.kind, c.kind);
        EXPECT_EQ(back.key, c.key);
        EXPECT_EQ(back.gamma, c.gamma);
        EXPECT_EQ(back.delta, c.delta);
        EXPECT_EQ(back.strength, c.strength);
      }
    }
  }
  EXPECT_EQ(ids.size(), 12u);
  EXPECT_EQ(SchemeId(Of(SchemeKind::kKgwLike)),
            "kgw/weak/key=2024/gamma=0.25/delta=2/seeding=selfhash");
  EXPECT_EQ(SchemeLabel(Of(SchemeKind::kSirLike, Strength::kStrong)), "sir_strong");
  EXPECT_THROW(ParseSchemeId("kgw/weak/key=abc"), Error);
  EXPECT_THROW(ParseSchemeId("nope"), Error);
}

TEST(SchemeTest, FormatDoubleRoundTrips) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    EXPECT_EQ(std::stod(FormatDouble(x)), x);
  }
  EXPECT_EQ(FormatDouble(0.25), "0.25");
}

}  // namespace
}  // namespace wmcollide
