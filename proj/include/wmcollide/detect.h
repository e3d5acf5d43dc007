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

#ifndef WMCOLLIDE_DETECT_H_
#define WMCOLLIDE_DETECT_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wmcollide/scheme.h"
#include "wmcollide/text_sample.h"
#include "wmcollide/watermark.h"

namespace wmcollide {

struct DetectionResult {
  // One-proportion z statistic of the green count against gamma. For SirLike
  // "green" means the realized token had positive bias, with gamma = 0.5.
  double statistic = 0.0;
  int green_count = 0;
  int token_count = 0;
  // Uniform in [0, 1), a pure function of the token sequence; breaks ties at
  // a calibrated threshold.
  double tiebreak = 0.0;
  std::string scheme_id;
};

double TieBreak(std::span<const TokenId> tokens);

// (green - gamma n) / sqrt(n gamma (1 - gamma))
double ZScore(int green_count, int token_count, double gamma);

// Every position i is scored against the context tokens[0, i), so the first
// token uses the empty-context sentinel, exactly as during generation.
// Throws kTooShort for fewer than 2 tokens.
DetectionResult Score(std::span<const TokenId> tokens, const Watermark& watermark);
DetectionResult Score(const TextSample& text, const Watermark& watermark);
DetectionResult Score(const TextSample& text, const SchemeConfig& config, int vocab_size);

std::vector<double> Statistics(std::span<const TextSample> texts, const Watermark& watermark);

struct CalibratedThreshold {
  double value = 0.0;
  // A score equal to value is positive iff its tiebreak < tie_fraction.
  double tie_fraction = 0.0;
  double target_fpr = 0.0;
  int n_calibration = 0;

  bool Exceeds(double statistic, double tiebreak) const {
    return statistic > value || (statistic == value && tiebreak < tie_fraction);
  }
};

inline constexpr int kMinCalibrationScores = 100;

// The threshold is the (m+1)-th largest score, m = floor(target_fpr * n),
// so at most m calibration scores lie strictly above it. Without tiebreaks,
// ties at the threshold count as negatives. With tiebreaks, tie_fraction is
// set so that exactly m calibration scores exceed it; for a discrete
// statistic this is the randomized test that hits the target rate.
// Throws kCalibrationError for fewer than kMinCalibrationScores scores, a
// target outside (0, 1), or mismatched spans.
CalibratedThreshold Calibrate(std::span<const double> null_scores, double target_fpr);
CalibratedThreshold Calibrate(std::span<const double> null_scores,
                              std::span<const double> tiebreaks, double target_fpr);
CalibratedThreshold Calibrate(std::span<const DetectionResult> nulls, double target_fpr);

// Fraction of scores that exceed the threshold (strictly above, or tied and
// winning the tiebreak). Throws kBadConfig when empty.
double TprAtFpr(std::span<const double> positive_scores, const CalibratedThreshold& threshold);
double TprAtFpr(std::span<const double> positive_scores, std::span<const double> tiebreaks,
                const CalibratedThreshold& threshold);
double TprAtFpr(std::span<const DetectionResult> positives, const CalibratedThreshold& threshold);

// Keeps samples whose statistic is >= z_min. Texts with fewer than 2 tokens
// cannot be scored and are dropped.
std::vector<TextSample> ZFilter(std::span<const TextSample> samples,
                                const Watermark& watermark, double z_min);

// CSV with header sample_id,scheme_id,statistic,green_count,token_count.
void WriteScoresCsv(std::ostream& out, std::span<const std::string> sample_ids,
                    std::span<const DetectionResult> results);

}  // namespace wmcollide

#endif  // WMCOLLIDE_DETECT_H_
