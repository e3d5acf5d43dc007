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

#ifndef WMCOLLIDE_COLLIDE_H_
#define WMCOLLIDE_COLLIDE_H_

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "wmcollide/config.h"
#include "wmcollide/dataset.h"
#include "wmcollide/scheme.h"

namespace wmcollide {

// One (W, P, fpr) cell: TPRs of the watermarker detector D_W and the
// paraphraser detector D_P on the n texts T_P.
struct CollisionCell {
  SchemeKind w_kind = SchemeKind::kKgwLike;
  Strength w_strength = Strength::kWeak;
  SchemeKind p_kind = SchemeKind::kKgwLike;
  Strength p_strength = Strength::kWeak;
  double fpr_target = 0.0;
  double tpr_dw = 0.0;
  double tpr_dp = 0.0;
  int n_calibration = 0;
  int n_samples = 0;

  friend bool operator==(const CollisionCell&, const CollisionCell&) = default;
};

// D_W on T_W, on T_P' and on T_P from the reference paraphraser.
struct WatermarkerBaseline {
  SchemeKind w_kind = SchemeKind::kKgwLike;
  Strength w_strength = Strength::kWeak;
  double fpr_target = 0.0;
  double tpr_tw = 0.0;
  double tpr_tp_prime = 0.0;
  double tpr_tp = 0.0;
  std::string reference_paraphraser;  // "kgw_weak" label
  int n_calibration = 0;
  int n_samples = 0;

  friend bool operator==(const WatermarkerBaseline&, const WatermarkerBaseline&) = default;
};

// D_P on P's own z-filtered generations, and on P's paraphrases of the
// unwatermarked T_W'.
struct ParaphraserBaseline {
  SchemeKind p_kind = SchemeKind::kKgwLike;
  Strength p_strength = Strength::kWeak;
  double fpr_target = 0.0;
  double tpr_fresh = 0.0;
  double tpr_unwatermarked_source = 0.0;
  int n_calibration = 0;
  int n_samples = 0;

  friend bool operator==(const ParaphraserBaseline&, const ParaphraserBaseline&) = default;
};

// Detector names are "dw/<label>" for watermarker schemes and "dp/<label>"
// for paraphraser schemes.
struct ThresholdRow {
  std::string detector;
  double fpr_target = 0.0;
  double value = 0.0;
  double tie_fraction = 0.0;
  int n_calibration = 0;

  friend bool operator==(const ThresholdRow&, const ThresholdRow&) = default;
};

struct ScoreRow {
  std::string sample_id;
  std::string detector;
  double statistic = 0.0;
  int green_count = 0;
  int token_count = 0;

  friend bool operator==(const ScoreRow&, const ScoreRow&) = default;
};

// Every table is in deterministic order: watermarkers, then paraphrasers,
// then FPR targets, each in config order.
struct CollisionReport {
  std::vector<CollisionCell> cells;
  std::vector<WatermarkerBaseline> baselines;
  std::vector<ParaphraserBaseline> paraphraser_baselines;
  std::vector<ThresholdRow> thresholds;
  std::vector<ScoreRow> scores;

  const CollisionCell* FindCell(SchemeKind wk, Strength ws, SchemeKind pk, Strength ps,
                                double fpr) const;
  const WatermarkerBaseline* FindBaseline(SchemeKind wk, Strength ws, double fpr) const;
  const ParaphraserBaseline* FindParaphraserBaseline(SchemeKind pk, Strength ps,
                                                     double fpr) const;

  friend bool operator==(const CollisionReport&, const CollisionReport&) = default;
};

std::string DetectorName(bool watermarker, const SchemeConfig& scheme);

// Stage names passed to the progress callback: "nulls", "calibrate",
// "dataset", "score", "baselines".
using ProgressFn = std::function<void(std::string_view stage)>;

// Calibrates every detector on config.n_calibration unwatermarked nulls,
// builds the dataset and fills all cells and baselines. Errors carry the
// stage and, for pipeline failures, the (W, P) pair in their message.
// When `dataset` is non-null it receives the generated dataset.
CollisionReport RunCollisionMatrix(const PipelineRunner& runner, Dataset* dataset = nullptr,
                                   const ProgressFn& progress = nullptr);
CollisionReport RunCollisionMatrix(const ExperimentConfig& config);

}  // namespace wmcollide

#endif  // WMCOLLIDE_COLLIDE_H_
