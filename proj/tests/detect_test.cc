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
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "oracle.h"
#include "test_model.h"
#include "wmcollide/detect.h"
#include "wmcollide/error.h"
#include "wmcollide/pipeline.h"

namespace wmcollide {
namespace {

SchemeConfig Preset(SchemeKind k, Strength s = Strength::kWeak) {
  return SchemeConfig::Preset(k, s, kWatermarkerKey);
}

std::vector<SchemeConfig> AllSchemes() {
  std::vector<SchemeConfig> out;
  for (SchemeKind k : {SchemeKind::kKgwLike, SchemeKind::kPrwLike, SchemeKind::kSirLike}) {
    out.push_back(Preset(k));
  }
  SchemeConfig prev = Preset(SchemeKind::kKgwLike);
  prev.seeding = Seeding::kPrevToken;
  out.push_back(prev);
  return out;
}

TEST(ScoreTest, MatchesBruteForceRecount) {
  const int v = 16;
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<TokenId> tok(0, v - 1);
  std::uniform_int_distribution<int> len(2, 20);
  for (const auto& c : AllSchemes()) {
    const Watermark wm(c, v);
    for (int i = 0; i < 100; ++i) {
      std::vector<TokenId> text(len(rng));
      for (auto& t : text) t = tok(rng);
      const auto expect = oracle::Recount(c, text, v);
      const auto got = Score(text, wm);
      ASSERT_EQ(got.green_count, expect.green) << SchemeId(c);
      ASSERT_EQ(got.token_count, expect.total);
      ASSERT_NEAR(got.statistic, expect.z, 1e-9);
    }
  }
}

TEST(ZScoreTest, KnownValues) {
  EXPECT_NEAR(ZScore(0, 16, 0.25), -2.3094, 1e-4);
  EXPECT_NEAR(ZScore(100, 100, 0.25), 17.3205, 1e-4);
  EXPECT_NEAR(ZScore(100, 100, 0.5), 10.0, 1e-12);
  EXPECT_NEAR(ZScore(400, 400, 0.25), 20.0 * std::sqrt(3.0), 1e-9);
  EXPECT_NEAR(ZScore(25, 100, 0.25), 0.0, 1e-12);
  EXPECT_NEAR(ZScore(250, 1000, 0.25), 0.0, 1e-12);
}

TEST(ScoreTest, RejectsShortText) {
  const Watermark wm(Preset(SchemeKind::kPrwLike), 16);
  EXPECT_THROW(Score(std::vector<TokenId>{3}, wm), Error);
  EXPECT_THROW(Score(std::vector<TokenId>{}, wm), Error);
}

TEST(ScoreTest, MonotoneInGreenCount) {
  // Flipping a red token to green never lowers z.
  const int v = 100;
  const auto c = Preset(SchemeKind::kPrwLike);
  const Watermark wm(c, v);
  const auto green = oracle::PrwGreen(c, v);
  TokenId g = 0, r = 0;
  while (!green[g]) ++g;
  while (green[r]) ++r;
  std::vector<TokenId> text(30, r);
  double last = Score(text, wm).statistic;
  for (auto& t : text) {
    t = g;
    const double z = Score(text, wm).statistic;
    EXPECT_GT(z, last);
    last = z;
  }
}

TEST(ScoreTest, AgreesWithGenerationMasks) {
  const TokenModel& lm = testing::SmallModel();
  for (const auto& c : AllSchemes()) {
    const Watermark wm(c, lm.vocab_size());
    GenerationJob job{.lm = &lm, .scheme = &wm, .prompt = {kBosId, 5, 6},
                      .max_new_tokens = 40, .seed = 3, .record_masks = true};
    const auto gen = Generate(job);
    const auto& toks = gen.text.tokens;
    ASSERT_EQ(gen.masks.size(), toks.size());
    int green = 0;
    for (size_t i = 0; i < toks.size(); ++i) {
      EXPECT_EQ(gen.masks[i], wm.Mask(std::span(toks).first(i)));
      EXPECT_EQ(gen.green_flags[i], gen.masks[i][toks[i]] ? 1 : 0);
      green += gen.green_flags[i];
    }
    EXPECT_EQ(Score(gen.text, wm).green_count, green);
  }
}

TEST(CalibrateTest, OrderStatistic) {
  std::vector<double> s(100);
  std::iota(s.begin(), s.end(), 1.0);
  std::shuffle(s.begin(), s.end(), std::mt19937_64(1));
  const auto t = Calibrate(s, 0.10);
  EXPECT_EQ(t.value, 90.0);
  EXPECT_EQ(t.n_calibration, 100);
  EXPECT_DOUBLE_EQ(TprAtFpr(s, t), 0.10);
  EXPECT_EQ(Calibrate(s, 0.01).value, 99.0);
}

TEST(CalibrateTest, AllEqualScoresGiveZeroFpr) {
  const std::vector<double> s(200, 1.5);
  const auto t = Calibrate(s, 0.05);
  EXPECT_EQ(TprAtFpr(s, t), 0.0);
}

TEST(CalibrateTest, TooFewOrBadTarget) {
  const std::vector<double> s(99, 0.0);
  EXPECT_THROW(Calibrate(s, 0.1), Error);
  const std::vector<double> ok(100, 0.0);
  EXPECT_THROW(Calibrate(ok, 0.0), Error);
  EXPECT_THROW(Calibrate(ok, 1.0), Error);
  const std::vector<double> tb(50, 0.0);
  EXPECT_THROW(Calibrate(ok, tb, 0.1), Error);
  EXPECT_THROW(TprAtFpr(std::vector<double>{}, Calibrate(ok, 0.1)), Error);
}

TEST(CalibrateTest, ThresholdMonotoneInTarget) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n01;
  std::vector<double> s(1000);
  for (double& x : s) x = n01(rng);
  double last = INFINITY;
  for (double f : {0.001, 0.01, 0.05, 0.1, 0.3, 0.5}) {
    const double v = Calibrate(s, f).value;
    EXPECT_LE(v, last);
    last = v;
  }
}

TEST(CalibrateTest, HeldOutFprWithinBinomialBand) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u;
  auto draw = [&](int n, std::vector<double>& s, std::vector<double>& tb) {
    s.resize(n);
    tb.resize(n);
    // Rounded scores so ties matter.
    for (int i = 0; i < n; ++i) {
      s[i] = std::round(n01(rng) * 2.0) / 2.0;
      tb[i] = u(rng);
    }
  };
  std::vector<double> cal, cal_tb, held, held_tb;
  draw(2000, cal, cal_tb);
  draw(2000, held, held_tb);
  for (double f : {0.01, 0.05, 0.1}) {
    const auto t = Calibrate(cal, cal_tb, f);
    EXPECT_NEAR(TprAtFpr(cal, cal_tb, t), f, 1e-12);
    const double sigma = std::sqrt(f * (1 - f) / 2000);
    EXPECT_NEAR(TprAtFpr(held, held_tb, t), f, 3 * sigma) << f;
  }
}

TEST(CalibrateTest, SeparatedDistributions) {
  std::vector<double> neg(500), pos(500);
  for (int i = 0; i < 500; ++i) {
    neg[i] = -static_cast<double>(i);
    pos[i] = 1000.0 + i;
  }
  const auto t = Calibrate(neg, 0.01);
  EXPECT_EQ(TprAtFpr(pos, t), 1.0);
  const auto flipped = Calibrate(pos, 0.01);
  EXPECT_EQ(TprAtFpr(neg, flipped), 0.0);
}

TEST(TieBreakTest, PureFunctionOfTokens) {
  const std::vector<TokenId> a{1, 2, 3}, b{1, 2, 4};
  EXPECT_EQ(TieBreak(a), TieBreak(a));
  EXPECT_NE(TieBreak(a), TieBreak(b));
  EXPECT_GE(TieBreak(a), 0.0);
  EXPECT_LT(TieBreak(a), 1.0);
}

std::vector<TextSample> Nulls(int n, int len) {
  const TokenModel& lm = testing::SmallModel();
  std::vector<TextSample> out;
  for (int i = 0; i < n; ++i) {
    GenerationJob job{.lm = &lm, .prompt = {kBosId}, .max_new_tokens = len,
                      .seed = static_cast<uint64_t>(i)};
    out.push_back(Generate(job).text);
  }
  return out;
}

TEST(ZFilterTest, Behaviour) {
  const auto nulls = Nulls(400, 30);
  const Watermark wm(Preset(SchemeKind::kKgwLike), testing::SmallModel().vocab_size());
  EXPECT_EQ(ZFilter(nulls, wm, -INFINITY).size(), nulls.size());
  const auto kept = ZFilter(nulls, wm, 4.0);
  EXPECT_LE(kept.size(), 2u);  // <= 0.5%
  const auto half = ZFilter(nulls, wm, 0.5);
  EXPECT_EQ(ZFilter(half, wm, 0.5), half);
  for (const auto& s : half) EXPECT_GE(Score(s, wm).statistic, 0.5);
  std::vector<TextSample> short_one{TextSample{.tokens = {4}}};
  EXPECT_TRUE(ZFilter(short_one, wm, -INFINITY).empty());
}

TEST(ScoresCsvTest, Format) {
  const Watermark wm(Preset(SchemeKind::kPrwLike), 16);
  const std::vector<DetectionResult> r{Score(std::vector<TokenId>{4, 5, 6, 7}, wm)};
  const std::vector<std::string> ids{"a"};
  std::ostringstream out;
  WriteScoresCsv(out, ids, r);
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "sample_id,scheme_id,statistic,green_count,token_count");
  EXPECT_EQ(row, "a," + wm.id() + "," + FormatDouble(r[0].statistic) + "," +
                     std::to_string(r[0].green_count) + ",4");
}

}  // namespace
}  // namespace wmcollide
