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
#include <atomic>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "wmcollide/collide.h"
#include "wmcollide/config.h"
#include "wmcollide/error.h"
#include "wmcollide/parallel.h"
#include "wmcollide/report.h"

namespace wmcollide {
namespace {

namespace fs = std::filesystem;

TEST(ConfigTest, FormatParseRoundTrip) {
  ExperimentConfig c;
  EXPECT_EQ(ParseConfig(FormatConfig(c)), c);
  c.kinds = {SchemeKind::kSirLike, SchemeKind::kKgwLike};
  c.strengths = {Strength::kStrong};
  c.reference_paraphraser = "sir/strong";
  c.kgw_seeding = Seeding::kPrevToken;
  c.fpr_targets = {0.02, 0.2};
  c.retention_rate = 0.125;
  c.paraphraser_lm = LmConfig{.corpus = "p.txt", .order = 2, .alpha = 0.5};
  c.out_dir = "some dir";
  c.seed = 99;
  EXPECT_EQ(ParseConfig(FormatConfig(c)), c);
}

TEST(ConfigTest, AcceptsCommentsAndBareWords) {
  const auto c = ParseConfig(
      "# comment\n"
      "n_samples = 12  # trailing\n"
      "kinds = [prw, \"sir\"]\n"
      "kgw_seeding = prev\n"
      "reference_paraphraser = prw/strong\n");
  EXPECT_EQ(c.n_samples, 12);
  EXPECT_EQ(c.kinds, (std::vector{SchemeKind::kPrwLike, SchemeKind::kSirLike}));
  EXPECT_EQ(c.kgw_seeding, Seeding::kPrevToken);
  EXPECT_EQ(c.ReferenceParaphraser().kind, SchemeKind::kPrwLike);
  EXPECT_EQ(c.ReferenceParaphraser().key, kParaphraserKey);
}

void ExpectBadConfig(const std::string& text, const std::string& needle) {
  try {
    ParseConfig(text);
    FAIL() << text;
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBadConfig);
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

TEST(ConfigTest, ErrorsNameTheLine) {
  ExpectBadConfig("n_samples = 3\nbogus = 1\n", "line 2");
  ExpectBadConfig("n_samples = x\n", "line 1");
  ExpectBadConfig("\n\nkinds = [kgw, nope]\n", "line 3");
  ExpectBadConfig("fpr_targets = [0.1, 0.05]\n", "fpr");
  ExpectBadConfig("paraphraser_key = 2024\n", "key");
  ExpectBadConfig("retention_rate = 1.5\n", "retention");
  EXPECT_THROW(LoadConfig("/nonexistent/x.cfg"), Error);
}

TEST(ParallelTest, EveryIndexOnce) {
  for (int workers : {1, 3, 8}) {
    std::vector<std::atomic<int>> hits(1000);
    ParallelFor(hits.size(), workers, [&](size_t i) { hits[i]++; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
  ParallelFor(0, 4, [](size_t) { FAIL(); });
}

TEST(ParallelTest, RethrowsLowestFailure) {
  try {
    ParallelFor(100, 1, [](size_t i) {
      if (i == 17 || i == 60) throw Error(ErrorCode::kIoError, "at " + std::to_string(i));
    });
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("at 17"), std::string::npos);
  }
}

TEST(GridTest, DefaultMatrixHas96Cells) {
  const ExperimentConfig c;
  int pairs = 0;
  for (const auto& w : c.Watermarkers()) {
    for (const auto& p : c.Paraphrasers()) {
      EXPECT_EQ(w.key, kWatermarkerKey);
      EXPECT_EQ(p.key, kParaphraserKey);
      const bool sir_sir = w.kind == SchemeKind::kSirLike && p.kind == SchemeKind::kSirLike;
      EXPECT_EQ(PairIncluded(c, w, p), !sir_sir);
      pairs += PairIncluded(c, w, p);
    }
  }
  EXPECT_EQ(c.Watermarkers().size(), 6u);
  EXPECT_EQ(pairs, 32);
  EXPECT_EQ(pairs * static_cast<int>(c.fpr_targets.size()), 96);
  ExperimentConfig all = c;
  all.include_sir_pairs = true;
  int all_pairs = 0;
  for (const auto& w : all.Watermarkers()) {
    for (const auto& p : all.Paraphrasers()) all_pairs += PairIncluded(all, w, p);
  }
  EXPECT_EQ(all_pairs, 36);
}

ExperimentConfig SmallConfig() {
  ExperimentConfig c;
  c.lm.synthetic_tokens = 60'000;
  c.lm.max_vocab = 800;
  c.kinds = {SchemeKind::kKgwLike, SchemeKind::kSirLike};
  c.n_samples = 8;
  c.n_calibration = 150;
  c.max_new_tokens = 32;
  c.workers = 2;
  return c;
}

class MatrixTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { report_ = new CollisionReport(RunCollisionMatrix(SmallConfig())); }
  static CollisionReport* report_;
};
CollisionReport* MatrixTest::report_ = nullptr;

TEST_F(MatrixTest, TableSizes) {
  const auto c = SmallConfig();
  // kgw x2, sir x2; sir->sir skipped: 16 - 4 pairs.
  EXPECT_EQ(report_->cells.size(), 12u * 3);
  EXPECT_EQ(report_->baselines.size(), 4u * 3);
  EXPECT_EQ(report_->paraphraser_baselines.size(), 4u * 3);
  EXPECT_EQ(report_->thresholds.size(), 8u * 3);
  for (const auto& cell : report_->cells) {
    EXPECT_EQ(cell.n_samples, c.n_samples);
    EXPECT_EQ(cell.n_calibration, c.n_calibration);
    EXPECT_GE(cell.tpr_dw, 0.0);
    EXPECT_LE(cell.tpr_dp, 1.0);
  }
  EXPECT_EQ(report_->FindCell(SchemeKind::kSirLike, Strength::kWeak, SchemeKind::kSirLike,
                              Strength::kStrong, 0.01),
            nullptr);
  EXPECT_NE(report_->FindCell(SchemeKind::kSirLike, Strength::kWeak, SchemeKind::kKgwLike,
                              Strength::kStrong, 0.05),
            nullptr);
}

TEST_F(MatrixTest, CalibratedRatesOnNulls) {
  // Each threshold lets exactly floor(fpr n) of its calibration nulls through.
  std::map<std::string, std::vector<const ScoreRow*>> nulls;
  for (const auto& s : report_->scores) {
    if (s.sample_id.starts_with("null/")) nulls[s.detector].push_back(&s);
  }
  ASSERT_EQ(nulls.size(), 8u);
  for (const auto& t : report_->thresholds) {
    int above = 0, at = 0;
    for (const auto* s : nulls[t.detector]) {
      above += s->statistic > t.value;
      at += s->statistic == t.value;
    }
    EXPECT_LE(above, static_cast<int>(t.fpr_target * t.n_calibration)) << t.detector;
    EXPECT_GE(above + at, static_cast<int>(t.fpr_target * t.n_calibration)) << t.detector;
  }
}

TEST_F(MatrixTest, Deterministic) { EXPECT_EQ(RunCollisionMatrix(SmallConfig()), *report_); }

TEST_F(MatrixTest, CsvRoundTrip) {
  const fs::path dir = fs::path(::testing::TempDir()) / "wmcollide_csv_rt";
  fs::remove_all(dir);
  WriteReportCsvs(*report_, dir);
  EXPECT_EQ(ReadReportCsvs(dir), *report_);
  std::ifstream in(dir / "collision_matrix.csv");
  std::string line;
  int n = 0;
  std::getline(in, line);
  EXPECT_EQ(line, "w_kind,w_strength,p_kind,p_strength,fpr_target,tpr_dw,tpr_dp,"
                  "n_calibration,n_samples");
  while (std::getline(in, line)) ++n;
  EXPECT_EQ(n, static_cast<int>(report_->cells.size()));
}

TEST_F(MatrixTest, CsvErrorsNameFileAndLine) {
  const fs::path dir = fs::path(::testing::TempDir()) / "wmcollide_csv_bad";
  fs::remove_all(dir);
  WriteReportCsvs(*report_, dir);
  {
    std::ofstream out(dir / "baselines.csv", std::ios::app);
    out << "kgw,weak,zero\n";
  }
  try {
    ReadReportCsvs(dir);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormatError);
    const std::string what = e.what();
    EXPECT_NE(what.find("baselines.csv"), std::string::npos) << what;
    EXPECT_NE(what.find("line 14"), std::string::npos) << what;
  }
}

TEST_F(MatrixTest, SummaryCoversEveryFinding) {
  const std::string s = Summary(*report_);
  std::istringstream in(s);
  std::string line;
  int findings = 0;
  while (std::getline(in, line)) {
    if (line.find(" | ") != std::string::npos) ++findings;
  }
  // Per FPR: 4 degradation, 4 erasure, 3 competition and 3 probe lines
  // (weak x weak pairs minus sir->sir).
  EXPECT_EQ(findings, 14 * 3);
  EXPECT_NE(s.find("findings held: "), std::string::npos);
  EXPECT_NE(s.find("upstream erasure | w=kgw_strong | fpr=0.01 | "), std::string::npos);
}

// CLI checks run the real binary.
int RunCli(const std::string& args) {
  const std::string cmd = std::string(WMCOLLIDE_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliTest, ExitCodes) {
  EXPECT_EQ(RunCli("--help"), 0);
  EXPECT_EQ(RunCli("collide --help"), 0);
  EXPECT_EQ(RunCli("--no-such-flag"), 2);
  EXPECT_EQ(RunCli("collide --config /nonexistent.cfg"), 2);
  EXPECT_EQ(RunCli("report --in /nonexistent_dir --out /tmp/x"), 2);
  const fs::path dir = fs::path(::testing::TempDir()) / "wmcollide_cli_bad";
  fs::create_directories(dir);
  std::ofstream(dir / "bad.cfg") << "n_samples = lots\n";
  EXPECT_EQ(RunCli("collide -q --config " + (dir / "bad.cfg").string()), 1);
}

TEST(CliTest, GenerateThenDetect) {
  const fs::path dir = fs::path(::testing::TempDir()) / "wmcollide_cli_gen";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "c.cfg") << "n_samples = 6\nmax_new_tokens = 40\n"
                                  "lm.synthetic_tokens = 60000\nlm.max_vocab = 800\n";
  const std::string cfg = " --config " + (dir / "c.cfg").string();
  ASSERT_EQ(RunCli("train -q" + cfg + " --out " + (dir / "m.bin").string()), 0);
  ASSERT_EQ(RunCli("generate -q" + cfg + " --model " + (dir / "m.bin").string() +
                " --scheme kgw/strong --out " + (dir / "d.jsonl").string()),
            0);
  ASSERT_EQ(RunCli("detect -q" + cfg + " --dataset " + (dir / "d.jsonl").string() +
                " --scheme kgw/strong --out " + (dir / "s.csv").string()),
            0);
  std::ifstream in(dir / "s.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "sample_id,scheme_id,statistic,green_count,token_count");
  double sum = 0.0;
  int n = 0;
  while (std::getline(in, line)) {
    std::stringstream row(line);
    std::string field;
    for (int i = 0; i < 3; ++i) std::getline(row, field, ',');
    sum += std::stod(field);
    ++n;
  }
  EXPECT_EQ(n, 6);
  EXPECT_GT(sum / n, 4.0);
}

}  // namespace
}  // namespace wmcollide
