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
// Acceptance run: prints one PASS/FAIL line per criterion and exits 1 if any
// criterion fails. The default configuration is the one shipped in
// ExperimentConfig; --config swaps it for a file.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oracle.h"
#include "wmcollide/collide.h"
#include "wmcollide/config.h"
#include "wmcollide/dataset.h"
#include "wmcollide/detect.h"
#include "wmcollide/parallel.h"
#include "wmcollide/report.h"

namespace wmcollide {
namespace {

namespace fs = std::filesystem;

constexpr double kHeadline = 0.01;
constexpr int kHeldOutNulls = 2000;

struct Outcome {
  bool pass = true;
  std::string detail;

  void Check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string Num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

std::string Label(SchemeKind k, Strength s) {
  return std::string(KindName(k)) + "_" + std::string(StrengthName(s));
}

Outcome C1() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const int v = 16;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<TokenId> tok(0, v - 1);
  std::uniform_int_distribution<int> len(2, 40);
  std::vector<std::vector<TokenId>> texts(100);
  for (auto& t : texts) {
    t.resize(len(rng));
    for (auto& x : t) x = tok(rng);
  }
  int checked = 0;
  for (SchemeKind k : {SchemeKind::kKgwLike, SchemeKind::kPrwLike, SchemeKind::kSirLike}) {
    for (Seeding s : {Seeding::kSelfHash, Seeding::kPrevToken}) {
      if (k != SchemeKind::kKgwLike && s == Seeding::kPrevToken) continue;
      SchemeConfig c = SchemeConfig::Preset(k, Strength::kStrong, kWatermarkerKey);
      c.seeding = s;
      const Watermark wm(c, v);
      for (const auto& t : texts) {
        const auto got = Score(t, wm);
        const auto want = oracle::Recount(c, t, v);
        o.Check(got.green_count == want.green && got.token_count == want.total,
                SchemeId(c) + " green count");
        o.Check(std::abs(got.statistic - want.z) <= 1e-9, SchemeId(c) + " statistic");
        ++checked;
      }
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.Check(secs < 1.0, "took " + Num(secs) + " s");
  if (o.pass) o.detail = std::to_string(checked) + " texts agree, " + Num(secs) + " s";
  return o;
}

Outcome C2(const PipelineRunner& runner) {
  const auto& config = runner.config();
  const int m = config.n_calibration;
  std::vector<TextSample> cal(m), held(kHeldOutNulls);
  const int workers = config.workers;
  ParallelFor(m, workers, [&](size_t j) { cal[j] = runner.Null(static_cast<int>(j)); });
  ParallelFor(kHeldOutNulls, workers,
              [&](size_t j) { held[j] = runner.Null(m + static_cast<int>(j)); });
  std::vector<SchemeConfig> detectors = config.Watermarkers();
  for (const auto& p : config.Paraphrasers()) detectors.push_back(p);
  Outcome o;
  double worst = 0.0;
  for (const auto& d : detectors) {
    const Watermark& wm = runner.Scheme(d);
    std::vector<DetectionResult> cs(m), hs(kHeldOutNulls);
    ParallelFor(m, workers, [&](size_t j) { cs[j] = Score(cal[j], wm); });
    ParallelFor(kHeldOutNulls, workers, [&](size_t j) { hs[j] = Score(held[j], wm); });
    for (double f : config.fpr_targets) {
      const double fpr = TprAtFpr(hs, Calibrate(cs, f));
      worst = std::max(worst, std::abs(fpr - f));
      o.Check(std::abs(fpr - f) <= 0.015,
              SchemeLabel(d) + "@" + Num(f) + " held-out fpr " + Num(fpr));
    }
  }
  if (o.pass) {
    o.detail = std::to_string(detectors.size()) + " detectors, max |fpr - target| " +
               Num(worst) + " on " + std::to_string(kHeldOutNulls) + " held-out nulls";
  }
  return o;
}

Outcome C3(const CollisionReport& r, const ExperimentConfig& c) {
  Outcome o;
  std::string seen;
  for (const auto& w : c.Watermarkers()) {
    if (w.strength != Strength::kStrong) continue;
    const auto* b = r.FindBaseline(w.kind, w.strength, kHeadline);
    o.Check(b->tpr_tw >= 0.95, SchemeLabel(w) + " tpr " + Num(b->tpr_tw));
    seen += SchemeLabel(w) + "=" + Num(b->tpr_tw) + " ";
  }
  if (o.pass) o.detail = seen;
  return o;
}

Outcome C4(const CollisionReport& r, const ExperimentConfig& c) {
  Outcome o;
  for (const auto& w : c.Watermarkers()) {
    const auto* b = r.FindBaseline(w.kind, w.strength, kHeadline);
    const std::string who = SchemeLabel(w) + " tw/tp'/tp " + Num(b->tpr_tw) + "/" +
                            Num(b->tpr_tp_prime) + "/" + Num(b->tpr_tp);
    o.Check(b->tpr_tw - b->tpr_tp_prime >= 0.05 && b->tpr_tp_prime - b->tpr_tp >= 0.05, who);
  }
  if (o.pass) o.detail = "all watermarkers ordered with 5-point gaps";
  return o;
}

Outcome C5(const CollisionReport& r, const ExperimentConfig& c) {
  Outcome o;
  for (double f : c.fpr_targets) {
    for (const auto& w : c.Watermarkers()) {
      double weak = 0, strong = 0, min_dp = 1;
      int nw = 0, ns = 0;
      for (const auto& p : c.Paraphrasers()) {
        const auto* cell = r.FindCell(w.kind, w.strength, p.kind, p.strength, f);
        if (cell == nullptr) continue;
        if (p.strength == Strength::kStrong) {
          strong += cell->tpr_dw;
          ++ns;
          min_dp = std::min(min_dp, cell->tpr_dp);
        } else {
          weak += cell->tpr_dw;
          ++nw;
        }
      }
      weak /= nw;
      strong /= ns;
      const std::string who = SchemeLabel(w) + "@" + Num(f);
      o.Check(weak - strong >= 0.15, who + " dw weak/strong P " + Num(weak) + "/" + Num(strong));
      o.Check(min_dp >= 0.85, who + " min strong dp " + Num(min_dp));
    }
  }
  if (o.pass) o.detail = "every watermarker, every fpr target";
  return o;
}

Outcome C6(const CollisionReport& r, const ExperimentConfig& c) {
  Outcome o;
  int pairs = 0;
  for (double f : c.fpr_targets) {
    for (const auto& w : c.Watermarkers()) {
      for (const auto& p : c.Paraphrasers()) {
        if (w.strength != Strength::kWeak || p.strength != Strength::kWeak) continue;
        const auto* cell = r.FindCell(w.kind, w.strength, p.kind, p.strength, f);
        if (cell == nullptr) continue;
        const auto* bw = r.FindBaseline(w.kind, w.strength, f);
        const auto* bp = r.FindParaphraserBaseline(p.kind, p.strength, f);
        const std::string who = SchemeLabel(w) + "->" + SchemeLabel(p) + "@" + Num(f);
        o.Check(cell->tpr_dw <= bw->tpr_tw - 0.10,
                who + " dw " + Num(cell->tpr_dw) + " vs " + Num(bw->tpr_tw));
        o.Check(cell->tpr_dp <= bp->tpr_fresh - 0.10,
                who + " dp " + Num(cell->tpr_dp) + " vs " + Num(bp->tpr_fresh));
        ++pairs;
      }
    }
  }
  if (o.pass) o.detail = std::to_string(pairs) + " weak/weak cells";
  return o;
}

// Equal-tailed 99% interval of Binomial(n, p), as counts.
std::pair<int, int> BinomialInterval(int n, double p) {
  std::vector<double> cdf(n + 1);
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    acc += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                    k * std::log(p) + (n - k) * std::log1p(-p));
    cdf[k] = acc;
  }
  int lo = 0, hi = n;
  while (lo < n && cdf[lo] < 0.005) ++lo;
  for (int k = 0; k <= n; ++k) {
    if (cdf[k] >= 0.995) {
      hi = k;
      break;
    }
  }
  return {lo, hi};
}

Outcome C7(const CollisionReport& r) {
  Outcome o;
  int checked = 0;
  auto check = [&](double tpr, int n, double f, const std::string& who) {
    const auto [lo, hi] = BinomialInterval(n, f);
    const int k = static_cast<int>(std::lround(tpr * n));
    o.Check(k >= lo && k <= hi, who + "@" + Num(f) + " " + Num(tpr) + " outside [" +
                                    Num(double(lo) / n) + ", " + Num(double(hi) / n) + "]");
    ++checked;
  };
  for (const auto& c : r.cells) {
    const std::string who = Label(c.w_kind, c.w_strength) + "->" + Label(c.p_kind, c.p_strength);
    check(c.tpr_dw, c.n_samples, c.fpr_target, who + " dw");
    check(c.tpr_dp, c.n_samples, c.fpr_target, who + " dp");
  }
  for (const auto& b : r.baselines) {
    const std::string who = Label(b.w_kind, b.w_strength);
    check(b.tpr_tw, b.n_samples, b.fpr_target, who + " tw");
    check(b.tpr_tp_prime, b.n_samples, b.fpr_target, who + " tp'");
    check(b.tpr_tp, b.n_samples, b.fpr_target, who + " tp");
  }
  for (const auto& b : r.paraphraser_baselines) {
    const std::string who = Label(b.p_kind, b.p_strength);
    check(b.tpr_fresh, b.n_samples, b.fpr_target, who + " fresh");
    check(b.tpr_unwatermarked_source, b.n_samples, b.fpr_target, who + " unwatermarked");
  }
  if (o.pass) o.detail = std::to_string(checked) + " rates inside their 99% intervals";
  return o;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome C8(const std::string& cli, const std::string& config, const fs::path& scratch) {
  Outcome o;
  const fs::path a = scratch / "determinism_a", b = scratch / "determinism_b";
  for (const auto& dir : {a, b}) {
    fs::remove_all(dir);
    const std::string cmd =
        cli + " collide -q --config " + config + " --out " + dir.string() + " >/dev/null";
    o.Check(std::system(cmd.c_str()) == 0, "collide failed: " + cmd);
  }
  if (!o.pass) return o;
  int files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    if (entry.path().extension() != ".csv") continue;
    const fs::path other = b / entry.path().filename();
    o.Check(fs::exists(other) && Slurp(entry.path()) == Slurp(other),
            entry.path().filename().string() + " differs");
    ++files;
  }
  o.Check(files >= 5, "only " + std::to_string(files) + " csv files");
  if (o.pass) o.detail = std::to_string(files) + " csv files byte-identical";
  return o;
}

Outcome C9(const CollisionReport& r, const ExperimentConfig& c) {
  Outcome o;
  std::string seen;
  for (const auto& w : c.Watermarkers()) {
    if (w.strength != Strength::kStrong) continue;
    for (const auto& p : c.Paraphrasers()) {
      if (p.strength != Strength::kWeak) continue;
      const auto* cell = r.FindCell(w.kind, w.strength, p.kind, p.strength, kHeadline);
      if (cell == nullptr) continue;
      const auto* bp = r.FindParaphraserBaseline(p.kind, p.strength, kHeadline);
      const std::string who = SchemeLabel(w) + "->" + SchemeLabel(p) + " dp " +
                              Num(cell->tpr_dp) + " vs " + Num(bp->tpr_unwatermarked_source);
      o.Check(cell->tpr_dp <= bp->tpr_unwatermarked_source - 0.10, who);
    }
  }
  if (o.pass) o.detail = "every strong watermarker, every weak paraphraser";
  return o;
}

void Print(int id, const std::string& name, const Outcome& o) {
  std::printf("C%d %s %s: %s\n", id, o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

int Main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria for the collision lab"};
  std::string config_path, cli, small_config, out = "acceptance_out";
  app.add_option("--config", config_path, "Experiment config (default: built-in defaults)");
  app.add_option("--cli", cli, "wmcollide binary, for the determinism check")->required();
  app.add_option("--small-config", small_config, "Config for the determinism check")
      ->required();
  app.add_option("--out", out, "Directory for reports of the runs");
  CLI11_PARSE(app, argc, argv);

  ExperimentConfig config = config_path.empty() ? ExperimentConfig{} : LoadConfig(config_path);
  config.Validate();
  fs::create_directories(out);
  int failures = 0;
  auto report = [&](int id, const std::string& name, const Outcome& o) {
    Print(id, name, o);
    failures += o.pass ? 0 : 1;
  };

  report(1, "detection soundness", C1());

  const Models models = BuildModels(config);
  const PipelineRunner runner(config, models);
  report(2, "calibration", C2(runner));

  std::cerr << "acceptance: running the collision matrix\n";
  const CollisionReport main_report = RunCollisionMatrix(runner);
  EmitReport(main_report, fs::path(out) / "default");
  report(3, "single-watermark efficacy", C3(main_report, config));
  report(4, "paraphrase degradation ordering", C4(main_report, config));
  report(5, "upstream erasure by strong paraphraser", C5(main_report, config));
  report(6, "competition under weak/weak", C6(main_report, config));

  std::cerr << "acceptance: running the null experiment\n";
  ExperimentConfig null_config = config;
  null_config.weak_delta = 0.0;
  null_config.strong_delta = 0.0;
  const PipelineRunner null_runner(null_config, models);
  const CollisionReport null_report = RunCollisionMatrix(null_runner);
  EmitReport(null_report, fs::path(out) / "null");
  report(7, "null experiment", C7(null_report));

  report(8, "determinism", C8(cli, small_config, out));
  report(9, "weak-watermark probe", C9(main_report, config));

  std::printf("%d of 9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace wmcollide

int main(int argc, char** argv) {
  try {
    return wmcollide::Main(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance: %s\n", e.what());
    return 1;
  }
}
