/*
 Copyright 2026 The fog-skills Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/


#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fog/core/image_io.hpp"
#include "fog/eval/metrics.hpp"

namespace fog::eval {

/// Plot families, recognised from the CSV header:
///   bar            group,seed,value
///   fan            skill,step,x,y
///   score line     episode,step,score
///   learning curve episode,return
enum class PlotKind { kBar, kFan, kScoreLine, kLearningCurve };

/// Plain comma-separated table; cells hold canonical text so a parse/print
/// round trip reproduces the bytes.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string to_csv(const CsvTable& table);
/// Throws InvalidArgument on ragged rows, an empty input or cells with quotes.
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

/// Throws InvalidArgument for an unknown header.
PlotKind plot_kind(const CsvTable& table);

/// Canonical number text: integers without a fraction, otherwise %.17g.
std::string format_number(double v);

struct BarEntry {
  std::string group;
  std::uint64_t seed = 0;
  double value = 0.0;
};
CsvTable bar_table(const std::vector<BarEntry>& entries);
CsvTable fan_table(const EvalReport& report);
CsvTable score_table(const AuditResult& audit);
CsvTable curve_table(const std::vector<double>& returns);

/// Draws the table. Bars show group means with standard-error whiskers and
/// one dot per seed; fans draw one polyline per skill.
core::RgbBuffer render_plot(const CsvTable& table);

/// Writes `stem`.csv and `stem`.png into `dir`; returns the CSV path.
/// Throws IoError when the directory cannot be written.
std::filesystem::path write_plot(const CsvTable& table, const std::filesystem::path& dir, const std::string& stem);

/// Bars for coverage and safe coverage (and flip % on TipCart) grouped by
/// method, plus one fan per report. Requires at least one report.
std::vector<std::filesystem::path> emit_plots(const std::vector<EvalReport>& reports,
                                              const std::filesystem::path& out_dir);

/// Re-emits each CSV (same file name) and its image into `out_dir`.
std::vector<std::filesystem::path> replot(const std::vector<std::filesystem::path>& csvs,
                                          const std::filesystem::path& out_dir);

}  // namespace fog::eval
