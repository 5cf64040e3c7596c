// sasv/eval/report.hpp

// Copyright 2026  SASVKit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sasv/core/config.hpp"
#include "sasv/protocol/trial.hpp"

namespace sasv::eval {

// Per-trial scores of the three score streams.  Higher always means "more
// bona fide / more target": the full score is the backend cosine, the ASV
// score the enrolment/test embedding cosine, the CM score the bona fide
// logit of the test utterance alone.
struct ScoreRecord {
  protocol::TrialPair trial;
  double full_score = 0.0;
  double asv_score = 0.0;
  double cm_score = 0.0;
};

// Score file: one line per trial,
//   <enrol_id> <test_id> <type> <full> <asv> <cm>
// scores printed with 17 significant digits so parsing is value-exact.
std::string FormatScores(const std::vector<ScoreRecord>& records);
void WriteScores(const std::vector<ScoreRecord>& records,
                 const std::string& path);
std::vector<ScoreRecord> ParseScores(const std::string& path);

inline constexpr std::array<const char*, 3> kStreamNames = {"full", "asv",
                                                            "cm"};
inline constexpr std::array<const char*, 3> kMetricNames = {
    "sasv_eer", "sv_eer", "spf_eer"};

// EERs in percent for one score stream.
struct StreamEers {
  double sasv_eer = 0.0;  // T1 positive vs T2+T3 negative
  double sv_eer = 0.0;    // T1 positive vs T2 negative
  double spf_eer = 0.0;   // T1 positive vs T3 negative

  double Get(int metric) const;
};

// The 3x3 metric grid of one evaluation run plus the trial counts that the
// records contained (T4 records are counted but never scored).
struct EvalReport {
  StreamEers full, asv, cm;
  std::array<int, protocol::kNumTrialTypes> trial_counts{};

  const StreamEers& Stream(int stream) const;
};

// Computes the grid over the assessment subsets.  Requires at least one
// trial of each of T1, T2 and T3; throws DataError naming the missing type.
EvalReport Evaluate(const std::vector<ScoreRecord>& records);

// Arithmetic mean of each metric over per-seed reports.  Trial counts must
// agree across the reports (same protocol).
EvalReport AverageReports(const std::vector<EvalReport>& reports);

// Flat machine-readable form with keys like
// `joint.base_aux_bf.full.sasv_eer`; prefix may be empty.
void ReportToConfig(const EvalReport& report, const std::string& prefix,
                    ConfigMap* out);
EvalReport ReportFromConfig(const ConfigMap& map, const std::string& prefix);

// Table-3-shaped text: one row per (condition, mode) cell in stable order,
// nine two-decimal percentages per row, missing cells rendered as a dash.
// ParseTable recovers the numbers at that precision.
using ReportGrid =
    std::map<std::pair<std::string, std::string>, EvalReport>;  // (cond, mode)

inline const std::vector<std::string> kConditionOrder = {"base", "base_aux",
                                                         "base_aux_bf"};
inline const std::vector<std::string> kModeOrder = {"fixed", "joint"};

std::string RenderTable(const ReportGrid& grid);
std::map<std::pair<std::string, std::string>, std::vector<double>> ParseTable(
    const std::string& text);

}  // namespace sasv::eval
