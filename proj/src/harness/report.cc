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

#include "wmcollide/report.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "wmcollide/error.h"
#include "wmcollide/plot.h"

namespace wmcollide {
namespace {

namespace fs = std::filesystem;

constexpr char kMatrixHeader[] =
    "w_kind,w_strength,p_kind,p_strength,fpr_target,tpr_dw,tpr_dp,n_calibration,n_samples";
constexpr char kBaselineHeader[] =
    "w_kind,w_strength,fpr_target,tpr_tw,tpr_tp_prime,tpr_tp,reference_paraphraser,"
    "n_calibration,n_samples";
constexpr char kParaphraserHeader[] =
    "p_kind,p_strength,fpr_target,tpr_fresh,tpr_unwatermarked_source,n_calibration,n_samples";
constexpr char kThresholdHeader[] = "detector,fpr_target,threshold,tie_fraction,n_calibration";
constexpr char kScoreHeader[] = "sample_id,detector,statistic,green_count,token_count";

std::string Label(SchemeKind kind, Strength strength) {
  return std::string(KindName(kind)) + "_" + std::string(StrengthName(strength));
}

std::string Percent(double fpr) { return FormatDouble(fpr * 100.0) + "%"; }

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const char* header) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
    out_ << header << '\n';
  }
  ~CsvWriter() noexcept(false) {
    out_.flush();
    if (!out_ && std::uncaught_exceptions() == 0) {
      throw Error(ErrorCode::kIoError, "write failed for " + path_.string());
    }
  }
  template <typename... Fields>
  void Row(const Fields&... fields) {
    bool first = true;
    ((out_ << (first ? "" : ",") << Field(fields), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string Field(double v) { return FormatDouble(v); }
  static std::string Field(int v) { return std::to_string(v); }
  static std::string Field(SchemeKind k) { return std::string(KindName(k)); }
  static std::string Field(Strength s) { return std::string(StrengthName(s)); }
  static const std::string& Field(const std::string& s) { return s; }

  fs::path path_;
  std::ofstream out_;
};

class CsvReader {
 public:
  CsvReader(const fs::path& path, const char* header) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
    std::string line;
    if (!std::getline(in_, line) || line != header) Fail("unexpected header");
  }

  // False at end of file.
  bool Next(size_t columns) {
    std::string line;
    do {
      if (!std::getline(in_, line)) return false;
      ++line_no_;
    } while (line.empty());
    fields_.clear();
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields_.push_back(f);
    if (!line.empty() && line.back() == ',') fields_.push_back("");
    if (fields_.size() != columns) Fail("expected " + std::to_string(columns) + " fields");
    column_ = 0;
    return true;
  }

  const std::string& String() { return fields_.at(column_++); }
  double Double() {
    const std::string& s = String();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) Fail("bad number '" + s + "'");
    return v;
  }
  int Int() {
    const std::string& s = String();
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) Fail("bad integer '" + s + "'");
    return v;
  }
  SchemeKind Kind() {
    try {
      return ParseKind(String());
    } catch (const Error& e) {
      Fail(e.message());
    }
  }
  Strength StrengthField() {
    try {
      return ParseStrength(String());
    } catch (const Error& e) {
      Fail(e.message());
    }
  }

  [[noreturn]] void Fail(const std::string& what) const {
    throw Error(ErrorCode::kFormatError,
                path_.filename().string() + " line " + std::to_string(line_no_ + 1) + ": " + what);
  }

 private:
  fs::path path_;
  std::ifstream in_;
  std::vector<std::string> fields_;
  size_t column_ = 0;
  int line_no_ = 0;
};

double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? NAN : s / static_cast<double>(v.size());
}

std::string Verdict(bool held) { return held ? "held" : "not held"; }

// Scores grouped by sample-id prefix (id without the slot) and detector.
std::map<std::pair<std::string, std::string>, std::vector<double>> GroupScores(
    const std::vector<ScoreRow>& scores) {
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  for (const auto& s : scores) {
    const auto slash = s.sample_id.rfind('/');
    groups[{s.sample_id.substr(0, slash), s.detector}].push_back(s.statistic);
  }
  return groups;
}

}  // namespace

void WriteReportCsvs(const CollisionReport& report, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());
  {
    CsvWriter csv(dir / "collision_matrix.csv", kMatrixHeader);
    for (const auto& c : report.cells) {
      csv.Row(c.w_kind, c.w_strength, c.p_kind, c.p_strength, c.fpr_target, c.tpr_dw, c.tpr_dp,
              c.n_calibration, c.n_samples);
    }
  }
  {
    CsvWriter csv(dir / "baselines.csv", kBaselineHeader);
    for (const auto& b : report.baselines) {
      csv.Row(b.w_kind, b.w_strength, b.fpr_target, b.tpr_tw, b.tpr_tp_prime, b.tpr_tp,
              b.reference_paraphraser, b.n_calibration, b.n_samples);
    }
  }
  {
    CsvWriter csv(dir / "paraphraser_baselines.csv", kParaphraserHeader);
    for (const auto& b : report.paraphraser_baselines) {
      csv.Row(b.p_kind, b.p_strength, b.fpr_target, b.tpr_fresh, b.tpr_unwatermarked_source,
              b.n_calibration, b.n_samples);
    }
  }
  {
    CsvWriter csv(dir / "thresholds.csv", kThresholdHeader);
    for (const auto& t : report.thresholds) {
      csv.Row(t.detector, t.fpr_target, t.value, t.tie_fraction, t.n_calibration);
    }
  }
  {
    CsvWriter csv(dir / "scores.csv", kScoreHeader);
    for (const auto& s : report.scores) {
      csv.Row(s.sample_id, s.detector, s.statistic, s.green_count, s.token_count);
    }
  }
}

CollisionReport ReadReportCsvs(const fs::path& dir) {
  CollisionReport report;
  {
    CsvReader csv(dir / "collision_matrix.csv", kMatrixHeader);
    while (csv.Next(9)) {
      CollisionCell c;
      c.w_kind = csv.Kind();
      c.w_strength = csv.StrengthField();
      c.p_kind = csv.Kind();
      c.p_strength = csv.StrengthField();
      c.fpr_target = csv.Double();
      c.tpr_dw = csv.Double();
      c.tpr_dp = csv.Double();
      c.n_calibration = csv.Int();
      c.n_samples = csv.Int();
      report.cells.push_back(c);
    }
  }
  {
    CsvReader csv(dir / "baselines.csv", kBaselineHeader);
    while (csv.Next(9)) {
      WatermarkerBaseline b;
      b.w_kind = csv.Kind();
      b.w_strength = csv.StrengthField();
      b.fpr_target = csv.Double();
      b.tpr_tw = csv.Double();
      b.tpr_tp_prime = csv.Double();
      b.tpr_tp = csv.Double();
      b.reference_paraphraser = csv.String();
      b.n_calibration = csv.Int();
      b.n_samples = csv.Int();
      report.baselines.push_back(b);
    }
  }
  {
    CsvReader csv(dir / "paraphraser_baselines.csv", kParaphraserHeader);
    while (csv.Next(7)) {
      ParaphraserBaseline b;
      b.p_kind = csv.Kind();
      b.p_strength = csv.StrengthField();
      b.fpr_target = csv.Double();
      b.tpr_fresh = csv.Double();
      b.tpr_unwatermarked_source = csv.Double();
      b.n_calibration = csv.Int();
      b.n_samples = csv.Int();
      report.paraphraser_baselines.push_back(b);
    }
  }
  {
    CsvReader csv(dir / "thresholds.csv", kThresholdHeader);
    while (csv.Next(5)) {
      ThresholdRow t;
      t.detector = csv.String();
      t.fpr_target = csv.Double();
      t.value = csv.Double();
      t.tie_fraction = csv.Double();
      t.n_calibration = csv.Int();
      report.thresholds.push_back(t);
    }
  }
  {
    CsvReader csv(dir / "scores.csv", kScoreHeader);
    while (csv.Next(5)) {
      ScoreRow s;
      s.sample_id = csv.String();
      s.detector = csv.String();
      s.statistic = csv.Double();
      s.green_count = csv.Int();
      s.token_count = csv.Int();
      report.scores.push_back(std::move(s));
    }
  }
  return report;
}

std::string Summary(const CollisionReport& report) {
  std::vector<double> fprs;
  std::vector<std::pair<SchemeKind, Strength>> ws, ps;
  auto add = [](auto& v, auto x) {
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
  };
  for (const auto& c : report.cells) {
    add(fprs, c.fpr_target);
    add(ws, std::pair(c.w_kind, c.w_strength));
    add(ps, std::pair(c.p_kind, c.p_strength));
  }
  std::ostringstream out;
  int held = 0, total = 0;
  auto line = [&](const std::string& finding, const std::string& who, double fpr, bool ok,
                  const std::string& detail) {
    out << finding << " | " << who << " | fpr=" << FormatDouble(fpr) << " | " << Verdict(ok)
        << " | " << detail << '\n';
    held += ok ? 1 : 0;
    ++total;
  };
  auto v = [](double x) { return FormatDouble(std::round(x * 1e4) / 1e4); };

  for (double fpr : fprs) {
    for (const auto& [wk, wst] : ws) {
      const std::string w = "w=" + Label(wk, wst);
      if (const auto* b = report.FindBaseline(wk, wst, fpr)) {
        line("paraphrase degradation", w, fpr,
             b->tpr_tw > b->tpr_tp_prime && b->tpr_tp_prime > b->tpr_tp,
             "tw=" + v(b->tpr_tw) + " tp_prime=" + v(b->tpr_tp_prime) + " tp=" + v(b->tpr_tp));
      }
      std::vector<double> weak, strong;
      for (const auto& [pk, pst] : ps) {
        if (const auto* c = report.FindCell(wk, wst, pk, pst, fpr)) {
          (pst == Strength::kStrong ? strong : weak).push_back(c->tpr_dw);
        }
      }
      if (!weak.empty() && !strong.empty()) {
        line("upstream erasure", w, fpr, Mean(strong) < Mean(weak),
             "weak_p_dw=" + v(Mean(weak)) + " strong_p_dw=" + v(Mean(strong)));
      }
    }
    for (const auto& [wk, wst] : ws) {
      for (const auto& [pk, pst] : ps) {
        if (pst != Strength::kWeak) continue;
        const auto* c = report.FindCell(wk, wst, pk, pst, fpr);
        const auto* bw = report.FindBaseline(wk, wst, fpr);
        const auto* bp = report.FindParaphraserBaseline(pk, pst, fpr);
        if (c == nullptr || bw == nullptr || bp == nullptr) continue;
        const std::string who = "w=" + Label(wk, wst) + " p=" + Label(pk, pst);
        if (wst == Strength::kWeak) {
          line("competition", who, fpr, c->tpr_dw < bw->tpr_tw && c->tpr_dp < bp->tpr_fresh,
               "dw=" + v(c->tpr_dw) + " tw=" + v(bw->tpr_tw) + " dp=" + v(c->tpr_dp) +
                   " fresh=" + v(bp->tpr_fresh));
        } else {
          line("weak watermark probe", who, fpr, c->tpr_dp < bp->tpr_unwatermarked_source,
               "dp=" + v(c->tpr_dp) + " over_unwatermarked=" + v(bp->tpr_unwatermarked_source));
        }
      }
    }
  }
  out << "findings held: " << held << " of " << total << '\n';
  return out.str();
}

void WritePlotsAndSummary(const CollisionReport& report, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "plots", ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + (dir / "plots").string());
  {
    std::ofstream out(dir / "summary.txt", std::ios::binary);
    out << Summary(report);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + (dir / "summary.txt").string());
  }

  const auto groups = GroupScores(report.scores);
  auto values = [&](const std::string& prefix, const std::string& detector) {
    auto it = groups.find({prefix, detector});
    return it == groups.end() ? std::vector<double>{} : it->second;
  };
  auto markers = [&](const std::string& detector) {
    std::vector<Marker> out;
    for (const auto& t : report.thresholds) {
      if (t.detector == detector) out.push_back({Percent(t.fpr_target), t.value});
    }
    return out;
  };

  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<double> fprs;
  for (const auto& c : report.cells) {
    const auto pair = std::pair(Label(c.w_kind, c.w_strength), Label(c.p_kind, c.p_strength));
    if (std::find(pairs.begin(), pairs.end(), pair) == pairs.end()) pairs.push_back(pair);
    if (std::find(fprs.begin(), fprs.end(), c.fpr_target) == fprs.end()) fprs.push_back(c.fpr_target);
  }
  for (const auto& [w, p] : pairs) {
    const std::string dw = "dw/" + w, dp = "dp/" + p;
    const std::string tp = "tp/" + w + "/" + p;
    WriteHistogramSvg(dir / "plots" / ("hist_" + w + "__" + p + ".svg"),
                      "T_P scores, W=" + w + ", P=" + p,
                      {{"D_W (" + w + ")",
                        {{"T_P", values(tp, dw), ""}, {"nulls", values("null", dw), "#888888"}},
                        markers(dw)},
                       {"D_P (" + p + ")",
                        {{"T_P", values(tp, dp), ""}, {"nulls", values("null", dp), "#888888"}},
                        markers(dp)}});
  }

  for (double fpr : fprs) {
    const std::string suffix = "_fpr" + FormatDouble(fpr) + ".svg";
    std::vector<BarGroup> base;
    for (const auto& b : report.baselines) {
      if (b.fpr_target != fpr) continue;
      base.push_back({Label(b.w_kind, b.w_strength), {b.tpr_tw, b.tpr_tp_prime, b.tpr_tp}});
    }
    if (!base.empty()) {
      WriteBarChartSvg(dir / "plots" / ("baselines" + suffix), "D_W TPR at FPR " + Percent(fpr),
                       {"T_W", "T_P'", "T_P (reference P)"}, base);
    }
    std::map<std::string, std::vector<BarGroup>> by_w;
    std::vector<std::string> order;
    for (const auto& c : report.cells) {
      if (c.fpr_target != fpr) continue;
      const std::string w = Label(c.w_kind, c.w_strength);
      if (!by_w.count(w)) order.push_back(w);
      by_w[w].push_back({Label(c.p_kind, c.p_strength), {c.tpr_dw, c.tpr_dp}});
    }
    for (const auto& w : order) {
      WriteBarChartSvg(dir / "plots" / ("tpr_" + w + suffix),
                       "W=" + w + ", TPR on T_P at FPR " + Percent(fpr), {"D_W", "D_P"}, by_w[w]);
    }
  }
}

void EmitReport(const CollisionReport& report, const fs::path& dir) {
  WriteReportCsvs(report, dir);
  WritePlotsAndSummary(report, dir);
}

}  // namespace wmcollide
