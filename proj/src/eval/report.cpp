// sasv/eval/report.cpp

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

#include "sasv/eval/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "sasv/eval/eer.hpp"

namespace sasv::eval {

namespace {

std::string FormatReal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double ParseReal(const std::string& s, const std::string& where, int lineno) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(where + ": line " + std::to_string(lineno) +
                     ": bad number '" + s + "'");
  }
}

}  // namespace

std::string FormatScores(const std::vector<ScoreRecord>& records) {
  std::string out;
  for (const ScoreRecord& r : records) {
    out += r.trial.enrol_id;
    out += ' ';
    out += r.trial.test_id;
    out += ' ';
    out += protocol::ToString(r.trial.type);
    out += ' ';
    out += FormatReal(r.full_score);
    out += ' ';
    out += FormatReal(r.asv_score);
    out += ' ';
    out += FormatReal(r.cm_score);
    out += '\n';
  }
  return out;
}

void WriteScores(const std::vector<ScoreRecord>& records,
                 const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write score file: " + path);
  out << FormatScores(records);
}

std::vector<ScoreRecord> ParseScores(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open score file: " + path);
  std::vector<ScoreRecord> records;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string enrol, test, tag, full, asv, cm;
    if (!(fields >> enrol >> test >> tag >> full >> asv >> cm)) {
      throw ParseError(path + ": line " + std::to_string(lineno) +
                       ": expected 6 fields");
    }
    ScoreRecord r;
    r.trial.enrol_id = enrol;
    r.trial.test_id = test;
    r.trial.type = protocol::TrialTypeFromString(tag);
    r.full_score = ParseReal(full, path, lineno);
    r.asv_score = ParseReal(asv, path, lineno);
    r.cm_score = ParseReal(cm, path, lineno);
    records.push_back(std::move(r));
  }
  return records;
}

double StreamEers::Get(int metric) const {
  switch (metric) {
    case 0: return sasv_eer;
    case 1: return sv_eer;
    case 2: return spf_eer;
  }
  throw std::logic_error("bad metric index");
}

const StreamEers& EvalReport::Stream(int stream) const {
  switch (stream) {
    case 0: return full;
    case 1: return asv;
    case 2: return cm;
  }
  throw std::logic_error("bad stream index");
}

EvalReport Evaluate(const std::vector<ScoreRecord>& records) {
  using protocol::TrialType;
  EvalReport report;
  std::array<std::vector<double>, 3> t1, t2, t3;  // per stream
  for (const ScoreRecord& r : records) {
    const int type = static_cast<int>(r.trial.type);
    report.trial_counts[static_cast<std::size_t>(type)] += 1;
    const std::array<double, 3> scores = {r.full_score, r.asv_score,
                                          r.cm_score};
    for (int s = 0; s < 3; ++s) {
      const auto us = static_cast<std::size_t>(s);
      switch (r.trial.type) {
        case TrialType::kT1: t1[us].push_back(scores[us]); break;
        case TrialType::kT2: t2[us].push_back(scores[us]); break;
        case TrialType::kT3: t3[us].push_back(scores[us]); break;
        case TrialType::kT4: break;  // never assessed
      }
    }
  }
  for (TrialType t : {TrialType::kT1, TrialType::kT2, TrialType::kT3}) {
    if (report.trial_counts[static_cast<std::size_t>(t)] == 0) {
      throw DataError("evaluate: no trials of type " + protocol::ToString(t));
    }
  }
  if (report.trial_counts[3] > 0) {
    LogInfo("evaluate: dropped " + std::to_string(report.trial_counts[3]) +
            " type T4 records (not assessed)");
  }
  for (int s = 0; s < 3; ++s) {
    const auto us = static_cast<std::size_t>(s);
    std::vector<double> sasv_neg = t2[us];
    sasv_neg.insert(sasv_neg.end(), t3[us].begin(), t3[us].end());
    StreamEers eers;
    eers.sv_eer = 100.0 * ComputeEer<double>(t1[us], t2[us]).eer;
    eers.spf_eer = 100.0 * ComputeEer<double>(t1[us], t3[us]).eer;
    eers.sasv_eer = 100.0 * ComputeEer<double>(t1[us], sasv_neg).eer;
    switch (s) {
      case 0: report.full = eers; break;
      case 1: report.asv = eers; break;
      case 2: report.cm = eers; break;
    }
  }
  return report;
}

EvalReport AverageReports(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw DataError("average: no reports");
  EvalReport mean = reports.front();
  for (std::size_t i = 1; i < reports.size(); ++i) {
    if (reports[i].trial_counts != mean.trial_counts) {
      throw DataError("average: reports cover different protocols");
    }
  }
  auto avg = [&](auto member, auto metric) {
    double sum = 0.0;
    for (const EvalReport& r : reports) sum += (r.*member).*metric;
    return sum / static_cast<double>(reports.size());
  };
  for (auto member : {&EvalReport::full, &EvalReport::asv, &EvalReport::cm}) {
    (mean.*member).sasv_eer = avg(member, &StreamEers::sasv_eer);
    (mean.*member).sv_eer = avg(member, &StreamEers::sv_eer);
    (mean.*member).spf_eer = avg(member, &StreamEers::spf_eer);
  }
  return mean;
}

void ReportToConfig(const EvalReport& report, const std::string& prefix,
                    ConfigMap* out) {
  const std::string p = prefix.empty() ? "" : prefix + ".";
  for (int s = 0; s < 3; ++s) {
    for (int m = 0; m < 3; ++m) {
      out->SetReal(p + kStreamNames[static_cast<std::size_t>(s)] + "." +
                       kMetricNames[static_cast<std::size_t>(m)],
                   report.Stream(s).Get(m));
    }
  }
  for (int t = 0; t < protocol::kNumTrialTypes; ++t) {
    out->SetInt(p + "counts.t" + std::to_string(t + 1),
                report.trial_counts[static_cast<std::size_t>(t)]);
  }
}

EvalReport ReportFromConfig(const ConfigMap& map, const std::string& prefix) {
  const std::string p = prefix.empty() ? "" : prefix + ".";
  EvalReport report;
  StreamEers* streams[3] = {&report.full, &report.asv, &report.cm};
  for (int s = 0; s < 3; ++s) {
    double* metrics[3] = {&streams[s]->sasv_eer, &streams[s]->sv_eer,
                          &streams[s]->spf_eer};
    for (int m = 0; m < 3; ++m) {
      *metrics[m] = map.GetReal(p + kStreamNames[static_cast<std::size_t>(s)] +
                                "." + kMetricNames[static_cast<std::size_t>(m)]);
    }
  }
  for (int t = 0; t < protocol::kNumTrialTypes; ++t) {
    report.trial_counts[static_cast<std::size_t>(t)] = static_cast<int>(
        map.GetInt(p + "counts.t" + std::to_string(t + 1), 0));
  }
  return report;
}

std::string RenderTable(const ReportGrid& grid) {
  std::ostringstream out;
  out << "# SASV summary: equal error rates [%]\n";
  out << "# columns: condition mode | full SASV SV SPF | asv SASV SV SPF | "
         "cm SASV SV SPF\n";
  for (const std::string& condition : kConditionOrder) {
    for (const std::string& mode : kModeOrder) {
      out << condition;
      for (std::size_t pad = condition.size(); pad < 12; ++pad) out << ' ';
      out << mode;
      for (std::size_t pad = mode.size(); pad < 6; ++pad) out << ' ';
      auto it = grid.find({condition, mode});
      for (int s = 0; s < 3; ++s) {
        for (int m = 0; m < 3; ++m) {
          char buf[32];
          if (it == grid.end()) {
            std::snprintf(buf, sizeof(buf), "%8s", "—");
          } else {
            std::snprintf(buf, sizeof(buf), "%8.2f",
                          it->second.Stream(s).Get(m));
          }
          out << buf;
        }
      }
      out << '\n';
    }
  }
  return out.str();
}

std::map<std::pair<std::string, std::string>, std::vector<double>> ParseTable(
    const std::string& text) {
  std::map<std::pair<std::string, std::string>, std::vector<double>> grid;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string condition, mode;
    if (!(fields >> condition >> mode)) {
      throw ParseError("summary table: line " + std::to_string(lineno) +
                       ": expected 'condition mode ...'");
    }
    std::vector<double> values;
    std::string tok;
    bool missing = false;
    while (fields >> tok) {
      if (tok == "—") {
        missing = true;
        continue;
      }
      values.push_back(ParseReal(tok, "summary table", lineno));
    }
    if (missing && values.empty()) continue;  // unpopulated cell
    if (values.size() != 9) {
      throw ParseError("summary table: line " + std::to_string(lineno) +
                       ": expected 9 numbers");
    }
    grid[{condition, mode}] = std::move(values);
  }
  return grid;
}

}  // namespace sasv::eval
