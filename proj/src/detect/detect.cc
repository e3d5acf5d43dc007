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

#include "wmcollide/detect.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

#include "wmcollide/error.h"
#include "wmcollide/hash.h"

namespace wmcollide {
namespace {

constexpr uint64_t kTieBreakSeed = 0x7469656272656B00ULL;

}  // namespace

double ZScore(int green_count, int token_count, double gamma) {
  const double n = token_count;
  return (green_count - gamma * n) / std::sqrt(n * gamma * (1.0 - gamma));
}

double TieBreak(std::span<const TokenId> tokens) {
  uint64_t h = Mix64(kTieBreakSeed ^ tokens.size());
  for (TokenId t : tokens) h = Mix64(h ^ static_cast<uint32_t>(t));
  return UnitInterval(h);
}

DetectionResult Score(std::span<const TokenId> tokens, const Watermark& watermark) {
  if (tokens.size() < 2) {
    throw Error(ErrorCode::kTooShort, "need at least 2 tokens to score");
  }
  DetectionResult r;
  r.scheme_id = watermark.id();
  r.token_count = static_cast<int>(tokens.size());
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (watermark.IsGreen(tokens.first(i), tokens[i])) ++r.green_count;
  }
  r.statistic = ZScore(r.green_count, r.token_count, watermark.gamma());
  r.tiebreak = TieBreak(tokens);
  return r;
}

DetectionResult Score(const TextSample& text, const Watermark& watermark) {
  return Score(text.tokens, watermark);
}

DetectionResult Score(const TextSample& text, const SchemeConfig& config, int vocab_size) {
  return Score(text.tokens, Watermark(config, vocab_size));
}

std::vector<double> Statistics(std::span<const TextSample> texts, const Watermark& watermark) {
  std::vector<double> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(Score(t, watermark).statistic);
  return out;
}

CalibratedThreshold Calibrate(std::span<const double> null_scores,
                              std::span<const double> tiebreaks, double target_fpr) {
  if (null_scores.size() < static_cast<size_t>(kMinCalibrationScores)) {
    throw Error(ErrorCode::kCalibrationError,
                "need at least " + std::to_string(kMinCalibrationScores) +
                    " null scores, got " + std::to_string(null_scores.size()));
  }
  if (!(target_fpr > 0.0 && target_fpr < 1.0)) {
    throw Error(ErrorCode::kCalibrationError, "target FPR must be in (0, 1)");
  }
  if (!tiebreaks.empty() && tiebreaks.size() != null_scores.size()) {
    throw Error(ErrorCode::kCalibrationError, "scores and tiebreaks differ in length");
  }
  std::vector<double> sorted(null_scores.begin(), null_scores.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  // The epsilon absorbs products like 0.1 * 100 landing a hair under 10.
  const auto allowed = static_cast<size_t>(
      std::floor(target_fpr * static_cast<double>(sorted.size()) + 1e-9));
  CalibratedThreshold t;
  t.value = sorted[std::min(allowed, sorted.size() - 1)];
  t.target_fpr = target_fpr;
  t.n_calibration = static_cast<int>(sorted.size());
  if (tiebreaks.empty()) return t;

  // Among the tied scores, admit the (allowed - above) with the smallest
  // tiebreaks; tie_fraction sits halfway between the last admitted and the
  // first rejected tiebreak.
  size_t above = 0;
  std::vector<double> tied;
  for (size_t i = 0; i < null_scores.size(); ++i) {
    if (null_scores[i] > t.value) {
      ++above;
    } else if (null_scores[i] == t.value) {
      tied.push_back(tiebreaks[i]);
    }
  }
  const size_t admit = allowed - above;
  std::sort(tied.begin(), tied.end());
  if (admit == 0) {
    t.tie_fraction = 0.0;
  } else if (admit >= tied.size()) {
    t.tie_fraction = 1.0;
  } else {
    t.tie_fraction = 0.5 * (tied[admit - 1] + tied[admit]);
  }
  return t;
}

CalibratedThreshold Calibrate(std::span<const double> null_scores, double target_fpr) {
  return Calibrate(null_scores, {}, target_fpr);
}

CalibratedThreshold Calibrate(std::span<const DetectionResult> nulls, double target_fpr) {
  std::vector<double> scores, tiebreaks;
  scores.reserve(nulls.size());
  tiebreaks.reserve(nulls.size());
  for (const auto& r : nulls) {
    scores.push_back(r.statistic);
    tiebreaks.push_back(r.tiebreak);
  }
  return Calibrate(scores, tiebreaks, target_fpr);
}

double TprAtFpr(std::span<const double> positive_scores, std::span<const double> tiebreaks,
                const CalibratedThreshold& threshold) {
  if (positive_scores.empty()) throw Error(ErrorCode::kBadConfig, "no positive scores");
  if (!tiebreaks.empty() && tiebreaks.size() != positive_scores.size()) {
    throw Error(ErrorCode::kBadConfig, "scores and tiebreaks differ in length");
  }
  size_t hits = 0;
  for (size_t i = 0; i < positive_scores.size(); ++i) {
    const double tb = tiebreaks.empty() ? 1.0 : tiebreaks[i];
    hits += threshold.Exceeds(positive_scores[i], tb) ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(positive_scores.size());
}

double TprAtFpr(std::span<const double> positive_scores, const CalibratedThreshold& threshold) {
  return TprAtFpr(positive_scores, {}, threshold);
}

double TprAtFpr(std::span<const DetectionResult> positives, const CalibratedThreshold& threshold) {
  std::vector<double> scores, tiebreaks;
  scores.reserve(positives.size());
  tiebreaks.reserve(positives.size());
  for (const auto& r : positives) {
    scores.push_back(r.statistic);
    tiebreaks.push_back(r.tiebreak);
  }
  return TprAtFpr(scores, tiebreaks, threshold);
}

std::vector<TextSample> ZFilter(std::span<const TextSample> samples,
                                const Watermark& watermark, double z_min) {
  std::vector<TextSample> kept;
  for (const auto& s : samples) {
    // Texts too short to score cannot show a watermark.
    if (s.tokens.size() < 2) continue;
    if (Score(s, watermark).statistic >= z_min) kept.push_back(s);
  }
  return kept;
}

void WriteScoresCsv(std::ostream& out, std::span<const std::string> sample_ids,
                    std::span<const DetectionResult> results) {
  out << "sample_id,scheme_id,statistic,green_count,token_count\n";
  for (size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    out << sample_ids[i] << ',' << r.scheme_id << ',' << FormatDouble(r.statistic) << ','
        << r.green_count << ',' << r.token_count << '\n';
  }
}

}  // namespace wmcollide
