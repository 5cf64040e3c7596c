// sasv/protocol/trial.hpp

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
#include <string>
#include <vector>

#include "sasv/core/common.hpp"

namespace sasv::protocol {

// The four SASV trial types.  The enrolment utterance is always a bona fide
// recording of the target speaker; the type describes the test utterance:
//   T1  bona fide, target speaker      (the only accept class)
//   T2  bona fide, non-target speaker
//   T3  spoofed,   target speaker
//   T4  spoofed,   non-target speaker  (training-only, never assessed)
enum class TrialType { kT1 = 0, kT2 = 1, kT3 = 2, kT4 = 3 };

inline constexpr int kNumTrialTypes = 4;
inline constexpr std::array<TrialType, kNumTrialTypes> kAllTrialTypes = {
    TrialType::kT1, TrialType::kT2, TrialType::kT3, TrialType::kT4};

std::string ToString(TrialType type);
TrialType TrialTypeFromString(const std::string& tag);  // throws ParseError

// Total over both booleans; every (speaker-match, spoof-flag) combination
// maps to exactly one type.
constexpr TrialType ClassifyTrial(bool same_speaker, bool test_is_spoofed) {
  if (!test_is_spoofed) return same_speaker ? TrialType::kT1 : TrialType::kT2;
  return same_speaker ? TrialType::kT3 : TrialType::kT4;
}

struct TrialPair {
  std::string enrol_id;
  std::string test_id;
  TrialType type = TrialType::kT1;

  bool operator==(const TrialPair&) const = default;
};

// Per-type sampling fractions; must sum to one.
struct ProportionProfile {
  std::array<double, kNumTrialTypes> weights{};

  void Validate() const;  // throws ConfigError when the sum is off by > 1e-9
};

// Table of training-pair proportions: the fixed configuration never samples
// type T4; the joint configuration samples all four types equally.
ProportionProfile FixedProfile();  // (0.50, 0.25, 0.25, 0.00)
ProportionProfile JointProfile();  // (0.25, 0.25, 0.25, 0.25)

// Exact per-batch counts by largest-remainder rounding: start from
// floor(weight*batch_size) and hand out the remaining slots in order of
// decreasing fractional remainder, ties broken toward the lower type index.
std::array<int, kNumTrialTypes> TypeCounts(const ProportionProfile& profile,
                                           int batch_size);

// Protocol file: one trial per line, `<enrol_id> <test_id> <T1|T2|T3|T4>`,
// whitespace separated, `#` starts a comment, UTF-8, LF line endings.
std::vector<TrialPair> ParseProtocol(const std::string& path);
std::vector<TrialPair> ParseProtocolString(const std::string& text);
std::string FormatProtocol(const std::vector<TrialPair>& trials);
void WriteProtocol(const std::vector<TrialPair>& trials,
                   const std::string& path);

}  // namespace sasv::protocol
