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

#ifndef WMCOLLIDE_REPORT_H_
#define WMCOLLIDE_REPORT_H_

#include <filesystem>
#include <string>

#include "wmcollide/collide.h"

namespace wmcollide {

// CSV layout version; bump when a column changes.
inline constexpr int kCsvSchemaVersion = 1;

// Writes collision_matrix.csv, baselines.csv, paraphraser_baselines.csv,
// thresholds.csv, scores.csv, summary.txt and plots/*.svg under `dir`,
// creating it if needed. Throws kIoError.
void EmitReport(const CollisionReport& report, const std::filesystem::path& dir);

// Only the CSV files.
void WriteReportCsvs(const CollisionReport& report, const std::filesystem::path& dir);
// Plots and summary from an in-memory report.
void WritePlotsAndSummary(const CollisionReport& report, const std::filesystem::path& dir);

// Reads the CSV files written by WriteReportCsvs; ReadReportCsvs(dir) equals
// the report that was written. Throws kIoError or kFormatError naming the
// file and line.
CollisionReport ReadReportCsvs(const std::filesystem::path& dir);

// Plain-text verdicts on the directional findings, one line each, computed
// from the report tables alone. Lines look like
//   upstream erasure | w=kgw_weak | fpr=0.01 | held | weak_p_dw=0.6 strong_p_dw=0.1
std::string Summary(const CollisionReport& report);

}  // namespace wmcollide

#endif  // WMCOLLIDE_REPORT_H_
