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

#include "wmcollide/collide.h"

#include <cstdio>
#include <unordered_map>
#include <utility>

#include "wmcollide/detect.h"
#include "wmcollide/error.h"
#include "wmcollide/parallel.h"

namespace wmcollide {
namespace {

std::string IndexedId(std::string_view prefix, int i) {
  char index[16];
  std::snprintf(index, sizeof(index), "%05d", i);
  return std::string(prefix) + "/" + index;
}

template <typename F>
void RunStage(std::string_view stage, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    throw e.WithContext("stage " + std::string(stage));
  }
}

struct Detector {
  std::string name;
  const Watermark* mark = nullptr;
  std::vector<CalibratedThreshold> thresholds;  // one per fpr target
};

std::vector<DetectionResult> ScoreAll(const std::vector<const TextSample*>& texts,
                                      const Watermark& mark, int workers) {
  std::vector<DetectionResult> out(texts.size());
  ParallelFor(texts.size(), workers, [&](size_t i) { out[i] = Score(*texts[i], mark); });
  return out;
}

void AppendScores(const std::vector<std::string>& ids, const std::string& detector,
                  const std::vector<DetectionResult>& results, std::vector<ScoreRow>& rows) {
  for (size_t i = 0; i < results.size(); ++i) {
    rows.push_back({ids[i], detector, results[i].statistic, results[i].green_count,
                    results[i].token_count});
  }
}

}  // namespace

std::string DetectorName(bool watermarker, const SchemeConfig& scheme) {
  return (watermarker ? "dw/" : "dp/") + SchemeLabel(scheme);
}

const CollisionCell* CollisionReport::FindCell(SchemeKind wk, Strength ws, SchemeKind pk,
                                               Strength ps, double fpr) const {
  for (const auto& c : cells) {
    if (c.w_kind == wk && c.w_strength == ws && c.p_kind == pk && c.p_strength == ps &&
        c.fpr_target == fpr) {
      return &c;
    }
  }
  return nullptr;
}

const WatermarkerBaseline* CollisionReport::FindBaseline(SchemeKind wk, Strength ws,
                                                         double fpr) const {
  for (const auto& b : baselines) {
    if (b.w_kind == wk && b.w_strength == ws && b.fpr_target == fpr) return &b;
  }
  return nullptr;
}

const ParaphraserBaseline* CollisionReport::FindParaphraserBaseline(SchemeKind pk, Strength ps,
                                                                    double fpr) const {
  for (const auto& b : paraphraser_baselines) {
    if (b.p_kind == pk && b.p_strength == ps && b.fpr_target == fpr) return &b;
  }
  return nullptr;
}

CollisionReport RunCollisionMatrix(const PipelineRunner& runner, Dataset* dataset_out,
                                   const ProgressFn& progress) {
  const ExperimentConfig& config = runner.config();
  const int n = config.n_samples;
  const int m = config.n_calibration;
  const int workers = config.workers;
  const auto& fprs = config.fpr_targets;
  const auto watermarkers = config.Watermarkers();
  const auto paraphrasers = config.Paraphrasers();
  auto announce = [&](std::string_view stage) {
    if (progress) progress(stage);
  };
  CollisionReport report;

  announce("nulls");
  std::vector<TextSample> nulls(m);
  RunStage("nulls", [&] {
    ParallelFor(m, workers, [&](size_t j) { nulls[j] = runner.Null(static_cast<int>(j)); });
  });
  std::vector<const TextSample*> null_ptrs;
  std::vector<std::string> null_ids;
  for (int j = 0; j < m; ++j) {
    null_ptrs.push_back(&nulls[j]);
    null_ids.push_back(IndexedId("null", j));
  }

  announce("calibrate");
  std::vector<Detector> dw, dp;
  for (const auto& s : watermarkers) dw.push_back({DetectorName(true, s), &runner.Scheme(s), {}});
  for (const auto& s : paraphrasers) dp.push_back({DetectorName(false, s), &runner.Scheme(s), {}});
  RunStage("calibrate", [&] {
    for (auto* group : {&dw, &dp}) {
      for (auto& d : *group) {
        const auto results = ScoreAll(null_ptrs, *d.mark, workers);
        for (double fpr : fprs) {
          d.thresholds.push_back(Calibrate(results, fpr));
          const auto& t = d.thresholds.back();
          report.thresholds.push_back({d.name, fpr, t.value, t.tie_fraction, t.n_calibration});
        }
        AppendScores(null_ids, d.name, results, report.scores);
      }
    }
  });

  announce("dataset");
  Dataset dataset;
  RunStage("dataset", [&] { dataset = BuildDataset(runner, watermarkers, paraphrasers); });
  std::unordered_map<std::string, const TextSample*> by_id;
  for (const auto& r : dataset.records) by_id.emplace(r.sample_id, &r.sample);
  auto texts = [&](TextRole role, const SchemeConfig* w, const SchemeConfig* p,
                   std::vector<std::string>& ids) {
    std::vector<const TextSample*> out;
    ids.clear();
    for (int i = 0; i < n; ++i) {
      ids.push_back(SampleId(role, w, p, i));
      out.push_back(by_id.at(ids.back()));
    }
    return out;
  };

  announce("score");
  const SchemeConfig reference = config.ReferenceParaphraser();
  for (size_t wi = 0; wi < watermarkers.size(); ++wi) {
    const SchemeConfig& w = watermarkers[wi];
    const Detector& d_w = dw[wi];
    std::vector<std::string> ids;
    std::vector<DetectionResult> on_tw, on_tp_prime, on_reference;
    RunStage("score " + SchemeLabel(w), [&] {
      on_tw = ScoreAll(texts(TextRole::kWatermarked, &w, nullptr, ids), *d_w.mark, workers);
      AppendScores(ids, d_w.name, on_tw, report.scores);
      on_tp_prime =
          ScoreAll(texts(TextRole::kParaphrasedSingle, &w, nullptr, ids), *d_w.mark, workers);
      AppendScores(ids, d_w.name, on_tp_prime, report.scores);
    });
    for (size_t pi = 0; pi < paraphrasers.size(); ++pi) {
      const SchemeConfig& p = paraphrasers[pi];
      if (!PairIncluded(config, w, p)) continue;
      const Detector& d_p = dp[pi];
      RunStage("score pair " + SchemeLabel(w) + " -> " + SchemeLabel(p), [&] {
        const auto tp = texts(TextRole::kParaphrasedDual, &w, &p, ids);
        const auto by_w = ScoreAll(tp, *d_w.mark, workers);
        const auto by_p = ScoreAll(tp, *d_p.mark, workers);
        AppendScores(ids, d_w.name, by_w, report.scores);
        AppendScores(ids, d_p.name, by_p, report.scores);
        for (size_t f = 0; f < fprs.size(); ++f) {
          report.cells.push_back({w.kind, w.strength, p.kind, p.strength, fprs[f],
                                  TprAtFpr(by_w, d_w.thresholds[f]),
                                  TprAtFpr(by_p, d_p.thresholds[f]),
                                  d_w.thresholds[f].n_calibration, n});
        }
        if (p == reference) on_reference = by_w;
      });
    }
    if (on_reference.empty()) {
      // The reference pair is excluded from the matrix; paraphrase directly.
      RunStage("baselines " + SchemeLabel(w), [&] {
        std::vector<TextSample> tp(n);
        const auto tw = texts(TextRole::kWatermarked, &w, nullptr, ids);
        ParallelFor(n, workers, [&](size_t i) {
          tp[i] = runner.Paraphrase(*tw[i], &reference, kDualSalt);
        });
        std::vector<const TextSample*> ptrs;
        for (const auto& t : tp) ptrs.push_back(&t);
        on_reference = ScoreAll(ptrs, *d_w.mark, workers);
      });
    }
    for (size_t f = 0; f < fprs.size(); ++f) {
      const auto& t = d_w.thresholds[f];
      report.baselines.push_back({w.kind, w.strength, fprs[f], TprAtFpr(on_tw, t),
                                  TprAtFpr(on_tp_prime, t), TprAtFpr(on_reference, t),
                                  SchemeLabel(reference), t.n_calibration, n});
    }
  }

  announce("baselines");
  // T_W' does not depend on the watermarker; take the first one's copy.
  std::vector<std::string> unused;
  const auto unwatermarked =
      texts(TextRole::kUnwatermarkedGen, &watermarkers.front(), nullptr, unused);
  for (size_t pi = 0; pi < paraphrasers.size(); ++pi) {
    const SchemeConfig& p = paraphrasers[pi];
    const Detector& d_p = dp[pi];
    const std::string label = SchemeLabel(p);
    RunStage("paraphraser baselines " + label, [&] {
      std::vector<TextSample> fresh(n), over_plain(n);
      ParallelFor(n, workers, [&](size_t i) {
        fresh[i] = runner.Fresh(p, static_cast<int>(i));
        over_plain[i] = runner.Paraphrase(*unwatermarked[i], &p, kDualSalt);
      });
      std::vector<const TextSample*> fresh_ptrs, plain_ptrs;
      std::vector<std::string> fresh_ids, plain_ids;
      for (int i = 0; i < n; ++i) {
        fresh_ptrs.push_back(&fresh[i]);
        plain_ptrs.push_back(&over_plain[i]);
        fresh_ids.push_back(IndexedId("fresh/" + label, i));
        plain_ids.push_back(IndexedId("tp_unwm/" + label, i));
      }
      const auto on_fresh = ScoreAll(fresh_ptrs, *d_p.mark, workers);
      const auto on_plain = ScoreAll(plain_ptrs, *d_p.mark, workers);
      AppendScores(fresh_ids, d_p.name, on_fresh, report.scores);
      AppendScores(plain_ids, d_p.name, on_plain, report.scores);
      for (size_t f = 0; f < fprs.size(); ++f) {
        const auto& t = d_p.thresholds[f];
        report.paraphraser_baselines.push_back({p.kind, p.strength, fprs[f],
                                                TprAtFpr(on_fresh, t), TprAtFpr(on_plain, t),
                                                t.n_calibration, n});
      }
    });
  }

  if (dataset_out != nullptr) *dataset_out = std::move(dataset);
  return report;
}

CollisionReport RunCollisionMatrix(const ExperimentConfig& config) {
  config.Validate();
  const Models models = BuildModels(config);
  const PipelineRunner runner(config, models);
  return RunCollisionMatrix(runner);
}

}  // namespace wmcollide
