// tests/test_eval.cpp

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "sasv/core/rng.hpp"
#include "sasv/eval/eer.hpp"
#include "sasv/eval/report.hpp"
#include "test_util.hpp"

using namespace sasv;
using namespace sasv::eval;

namespace {

// Independent oracle: O(n^2) enumeration of every distinct-score threshold
// under "accept iff score >= t", midpoint EER, minimal gap first, then
// minimal midpoint, then smallest threshold.
EerResult<double> BruteForceEer(const std::vector<double>& pos,
                                const std::vector<double>& neg) {
  std::vector<double> thresholds = pos;
  thresholds.insert(thresholds.end(), neg.begin(), neg.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());
  EerResult<double> best;
  double best_gap = -1.0;
  for (double t : thresholds) {
    int n_far = 0, n_frr = 0;
    for (double s : neg) n_far += s >= t ? 1 : 0;
    for (double s : pos) n_frr += s < t ? 1 : 0;
    const double far = static_cast<double>(n_far) / neg.size();
    const double frr = static_cast<double>(n_frr) / pos.size();
    const double gap = std::abs(far - frr);
    const double mid = (far + frr) / 2.0;
    if (best_gap < 0.0 || gap < best_gap ||
        (gap == best_gap && mid < best.eer)) {
      best_gap = gap;
      best.eer = mid;
      best.threshold = t;
    }
  }
  return best;
}

std::vector<double> RandomScores(int n, Rng* rng) {
  std::vector<double> scores(static_cast<std::size_t>(n));
  for (double& s : scores) s = rng->Uniform(-1.0, 1.0);
  return scores;
}

ScoreRecord MakeRecord(const std::string& enrol, const std::string& test,
                       protocol::TrialType type, double full, double asv,
                       double cm) {
  ScoreRecord r;
  r.trial = {enrol, test, type};
  r.full_score = full;
  r.asv_score = asv;
  r.cm_score = cm;
  return r;
}

}  // namespace

TEST_CASE("eer: separable lists give zero") {
  const auto r = ComputeEer<double>({0.9, 0.8}, {0.1, 0.2});
  CHECK(r.eer == 0.0);
}

TEST_CASE("eer: identical multisets give one half") {
  const auto r = ComputeEer<double>({0.3, 0.7}, {0.3, 0.7});
  CHECK(r.eer == 0.5);
  const auto single = ComputeEer<double>({0.5}, {0.5});
  CHECK(single.eer == 0.5);
}

TEST_CASE("eer: interleaved quartet (brute-force derived)") {
  // Oracle value under the documented sweep rule: the minimal |FAR-FRR| is 0
  // at t = 0.6 where FAR = FRR = 0.5.
  const std::vector<double> pos = {0.8, 0.4}, neg = {0.6, 0.2};
  const auto oracle = BruteForceEer(pos, neg);
  CHECK(oracle.eer == 0.5);
  CHECK(oracle.threshold == 0.6);
  const auto r = ComputeEer<double>(pos, neg);
  CHECK(r.eer == oracle.eer);
  CHECK(r.threshold == oracle.threshold);
}

TEST_CASE("eer: empty list is an error") {
  CHECK_THROWS_AS(ComputeEer<double>({}, {0.1}), DataError);
  CHECK_THROWS_AS(ComputeEer<double>({0.1}, {}), DataError);
}

TEST_CASE("eer: matches the brute-force oracle on seeded random instances") {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const int n_pos = 1 + static_cast<int>(rng.Below(50));
    const int n_neg = 1 + static_cast<int>(rng.Below(50));
    const auto pos = RandomScores(n_pos, &rng);
    const auto neg = RandomScores(n_neg, &rng);
    const auto fast = ComputeEer<double>(pos, neg);
    const auto slow = BruteForceEer(pos, neg);
    REQUIRE(std::abs(fast.eer - slow.eer) <= 1e-12);
    REQUIRE(fast.threshold == slow.threshold);
  }
}

TEST_CASE("eer: invariant under strictly increasing transforms") {
  Rng rng(2025);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pos = RandomScores(20, &rng);
    const auto neg = RandomScores(25, &rng);
    auto transform = [](double s) { return std::exp(3.0 * s) - 0.5; };
    std::vector<double> pos_t, neg_t;
    for (double s : pos) pos_t.push_back(transform(s));
    for (double s : neg) neg_t.push_back(transform(s));
    CHECK(ComputeEer<double>(pos, neg).eer ==
          ComputeEer<double>(pos_t, neg_t).eer);
  }
}

TEST_CASE("eer: negating scores and swapping lists preserves the estimate") {
  Rng rng(2026);
  for (int trial = 0; trial < 200; ++trial) {
    const int n_pos = 1 + static_cast<int>(rng.Below(20));
    const int n_neg = 1 + static_cast<int>(rng.Below(20));
    const auto pos = RandomScores(n_pos, &rng);
    const auto neg = RandomScores(n_neg, &rng);
    std::vector<double> neg_flipped, pos_flipped;
    for (double s : pos) neg_flipped.push_back(-s);
    for (double s : neg) pos_flipped.push_back(-s);
    CHECK(ComputeEer<double>(pos, neg).eer ==
          ComputeEer<double>(pos_flipped, neg_flipped).eer);
  }
}

TEST_CASE("evaluate: oracle streams hit the expected corners") {
  std::vector<ScoreRecord> records;
  Rng rng(1);
  // perfect full system, CM-like asv stream; cm stream ignores speakers
  for (int i = 0; i < 40; ++i) {
    // T1: bona fide target
    records.push_back(MakeRecord("e", "t1_" + std::to_string(i),
                                 protocol::TrialType::kT1, 1.0,
                                 rng.Uniform(), 1.0));
    // T2: bona fide non-target
    records.push_back(MakeRecord("e", "t2_" + std::to_string(i),
                                 protocol::TrialType::kT2, 0.0,
                                 rng.Uniform(), 1.0));
    // T3: spoofed target
    records.push_back(MakeRecord("e", "t3_" + std::to_string(i),
                                 protocol::TrialType::kT3, 0.0,
                                 rng.Uniform(), 0.0));
  }
  const EvalReport report = Evaluate(records);
  CHECK(report.full.sasv_eer == 0.0);
  CHECK(report.full.sv_eer == 0.0);
  CHECK(report.full.spf_eer == 0.0);
  // the cm stream separates spoofing perfectly but is speaker-blind
  CHECK(report.cm.spf_eer == 0.0);
  CHECK(report.cm.sv_eer == 50.0);
  CHECK(report.trial_counts == std::array<int, 4>{40, 40, 40, 0});
}

TEST_CASE("evaluate: random streams sit near 50%") {
  Rng rng(7);
  std::vector<ScoreRecord> records;
  auto add = [&](protocol::TrialType type, int count) {
    for (int i = 0; i < count; ++i) {
      records.push_back(MakeRecord(
          "e", protocol::ToString(type) + std::to_string(i), type,
          rng.Uniform(-1, 1), rng.Uniform(-1, 1), rng.Uniform(-1, 1)));
    }
  };
  add(protocol::TrialType::kT1, 1000);
  add(protocol::TrialType::kT2, 1000);
  add(protocol::TrialType::kT3, 1000);
  const EvalReport report = Evaluate(records);
  for (int s = 0; s < 3; ++s) {
    for (int m = 0; m < 3; ++m) {
      CHECK(report.Stream(s).Get(m) > 45.0);
      CHECK(report.Stream(s).Get(m) < 55.0);
    }
  }
}

TEST_CASE("evaluate: type T4 never influences the metrics") {
  Rng rng(8);
  std::vector<ScoreRecord> records;
  for (int i = 0; i < 30; ++i) {
    records.push_back(MakeRecord("e", "a" + std::to_string(i),
                                 protocol::TrialType::kT1, rng.Uniform(),
                                 rng.Uniform(), rng.Uniform()));
    records.push_back(MakeRecord("e", "b" + std::to_string(i),
                                 protocol::TrialType::kT2, rng.Uniform(),
                                 rng.Uniform(), rng.Uniform()));
    records.push_back(MakeRecord("e", "c" + std::to_string(i),
                                 protocol::TrialType::kT3, rng.Uniform(),
                                 rng.Uniform(), rng.Uniform()));
  }
  const EvalReport before = Evaluate(records);
  for (int i = 0; i < 50; ++i) {
    records.push_back(MakeRecord("e", "d" + std::to_string(i),
                                 protocol::TrialType::kT4,
                                 i % 2 == 0 ? 1e9 : -1e9, 1e9, -1e9));
  }
  const EvalReport after = Evaluate(records);
  for (int s = 0; s < 3; ++s) {
    for (int m = 0; m < 3; ++m) {
      CHECK(before.Stream(s).Get(m) == after.Stream(s).Get(m));
    }
  }
  CHECK(after.trial_counts[3] == 50);
}

TEST_CASE("evaluate: record order does not matter") {
  Rng rng(9);
  std::vector<ScoreRecord> records;
  for (int i = 0; i < 25; ++i) {
    for (auto type : {protocol::TrialType::kT1, protocol::TrialType::kT2,
                      protocol::TrialType::kT3}) {
      records.push_back(MakeRecord(
          "e", protocol::ToString(type) + std::to_string(i), type,
          rng.Uniform(-1, 1), rng.Uniform(-1, 1), rng.Uniform(-1, 1)));
    }
  }
  const EvalReport a = Evaluate(records);
  std::vector<ScoreRecord> shuffled = records;
  rng.Shuffle(&shuffled);
  const EvalReport b = Evaluate(shuffled);
  for (int s = 0; s < 3; ++s) {
    for (int m = 0; m < 3; ++m) {
      CHECK(a.Stream(s).Get(m) == b.Stream(s).Get(m));
    }
  }
}

TEST_CASE("evaluate: a missing assessment type is an error naming it") {
  std::vector<ScoreRecord> records = {
      MakeRecord("e", "t", protocol::TrialType::kT1, 1, 1, 1),
      MakeRecord("e", "u", protocol::TrialType::kT2, 0, 0, 0),
  };
  try {
    Evaluate(records);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("T3") != std::string::npos);
  }
}

TEST_CASE("score files: repr-exact round-trip") {
  std::vector<ScoreRecord> records = {
      MakeRecord("spk01-e001", "spk01-t003", protocol::TrialType::kT1,
                 0.12345678901234567, -0.987654321, 3.0000000001),
      MakeRecord("spk02-e001", "spk09-t004", protocol::TrialType::kT4, -1,
                 0.5, 1e-17),
  };
  test::TempDir dir("scores");
  const std::string path = dir.str() + "/scores.txt";
  WriteScores(records, path);
  const auto parsed = ParseScores(path);
  REQUIRE(parsed.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(parsed[i].trial == records[i].trial);
    CHECK(parsed[i].full_score == records[i].full_score);
    CHECK(parsed[i].asv_score == records[i].asv_score);
    CHECK(parsed[i].cm_score == records[i].cm_score);
  }
  CHECK_THROWS_AS(ParseScores(dir.str() + "/none.txt"), DataError);
}

TEST_CASE("report sidecar: config round-trip with prefixed keys") {
  EvalReport report;
  report.full = {1.15, 1.27, 1.08};
  report.asv = {19.70, 1.27, 25.75};
  report.cm = {24.50, 49.01, 0.65};
  report.trial_counts = {600, 600, 600, 0};
  ConfigMap map;
  ReportToConfig(report, "joint.base_aux_bf", &map);
  CHECK(map.GetReal("joint.base_aux_bf.full.sasv_eer") == 1.15);
  CHECK(map.GetReal("joint.base_aux_bf.cm.sv_eer") == 49.01);
  const EvalReport back = ReportFromConfig(map, "joint.base_aux_bf");
  for (int s = 0; s < 3; ++s) {
    for (int m = 0; m < 3; ++m) {
      CHECK(back.Stream(s).Get(m) == report.Stream(s).Get(m));
    }
  }
  CHECK(back.trial_counts == report.trial_counts);
}

TEST_CASE("averaging reports") {
  EvalReport a, b;
  a.full = {1.0, 2.0, 3.0};
  b.full = {3.0, 4.0, 5.0};
  a.trial_counts = b.trial_counts = {10, 10, 10, 0};
  const EvalReport mean = AverageReports({a, b});
  CHECK(mean.full.sasv_eer == 2.0);
  CHECK(mean.full.sv_eer == 3.0);
  CHECK(mean.full.spf_eer == 4.0);
  // single report averages to itself
  const EvalReport single = AverageReports({a});
  CHECK(single.full.sasv_eer == a.full.sasv_eer);
  // a five-value metric column averages to its arithmetic mean
  std::vector<EvalReport> five(5, a);
  for (int i = 0; i < 5; ++i) {
    five[static_cast<std::size_t>(i)].full.sasv_eer = 1.0 + i;
  }
  CHECK(AverageReports(five).full.sasv_eer == 3.0);
  EvalReport mismatched = b;
  mismatched.trial_counts = {9, 10, 10, 0};
  CHECK_THROWS_AS(AverageReports({a, mismatched}), DataError);
}

TEST_CASE("summary table renders and parses at two decimals") {
  ReportGrid grid;
  EvalReport r;
  r.full = {1.154, 1.267, 1.081};
  r.asv = {19.703, 1.272, 25.752};
  r.cm = {24.498, 49.012, 0.649};
  grid[{"base", "fixed"}] = r;
  grid[{"base_aux_bf", "joint"}] = r;
  const std::string table = RenderTable(grid);
  const auto parsed = ParseTable(table);
  REQUIRE(parsed.size() == 2);
  const auto& row = parsed.at({"base", "fixed"});
  REQUIRE(row.size() == 9);
  CHECK(row[0] == doctest::Approx(1.15).epsilon(1e-12));
  CHECK(row[3] == doctest::Approx(19.70).epsilon(1e-12));
  CHECK(row[7] == doctest::Approx(49.01).epsilon(1e-12));
  // unpopulated cells render as a dash and parse back as absent
  CHECK(table.find("—") != std::string::npos);
  CHECK(parsed.count({"base_aux", "fixed"}) == 0);
}
