// sasv/protocol/trial.cpp

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

#include "sasv/protocol/trial.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sasv::protocol {

std::string ToString(TrialType type) {
  switch (type) {
    case TrialType::kT1: return "T1";
    case TrialType::kT2: return "T2";
    case TrialType::kT3: return "T3";
    case TrialType::kT4: return "T4";
  }
  throw std::logic_error("unreachable trial type");
}

TrialType TrialTypeFromString(const std::string& tag) {
  for (TrialType t : kAllTrialTypes) {
    if (tag == ToString(t)) return t;
  }
  throw ParseError("unknown trial type tag '" + tag + "'");
}

void ProportionProfile::Validate() const {
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0 || w > 1.0) {
      throw ConfigError("proportion profile weight out of [0,1]");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("proportion profile weights sum to " +
                      std::to_string(sum) + ", expected 1");
  }
}

ProportionProfile FixedProfile() {
  return ProportionProfile{{0.50, 0.25, 0.25, 0.00}};
}

ProportionProfile JointProfile() {
  return ProportionProfile{{0.25, 0.25, 0.25, 0.25}};
}

std::array<int, kNumTrialTypes> TypeCounts(const ProportionProfile& profile,
                                           int batch_size) {
  profile.Validate();
  if (batch_size <= 0) throw ConfigError("batch size must be positive");
  std::array<int, kNumTrialTypes> counts{};
  std::array<double, kNumTrialTypes> remainder{};
  int assigned = 0;
  for (int i = 0; i < kNumTrialTypes; ++i) {
    double quota = profile.weights[i] * batch_size;
    counts[i] = static_cast<int>(std::floor(quota));
    remainder[i] = quota - counts[i];
    assigned += counts[i];
  }
  std::array<int, kNumTrialTypes> order = {0, 1, 2, 3};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return remainder[a] > remainder[b];
  });
  for (int k = 0; k < batch_size - assigned; ++k) counts[order[k]] += 1;
  return counts;
}

std::vector<TrialPair> ParseProtocolString(const std::string& text) {
  std::vector<TrialPair> trials;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream fields(line);
    std::string enrol, test, tag, extra;
    if (!(fields >> enrol)) continue;  // blank line
    if (!(fields >> test >> tag)) {
      throw ParseError("line " + std::to_string(lineno) +
                       ": expected '<enrol_id> <test_id> <type>'");
    }
    if (fields >> extra) {
      throw ParseError("line " + std::to_string(lineno) +
                       ": trailing field '" + extra + "'");
    }
    TrialPair pair;
    pair.enrol_id = enrol;
    pair.test_id = test;
    try {
      pair.type = TrialTypeFromString(tag);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
    trials.push_back(std::move(pair));
  }
  return trials;
}

std::vector<TrialPair> ParseProtocol(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open protocol file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return ParseProtocolString(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string FormatProtocol(const std::vector<TrialPair>& trials) {
  std::string out;
  for (const TrialPair& t : trials) {
    out += t.enrol_id;
    out += ' ';
    out += t.test_id;
    out += ' ';
    out += ToString(t.type);
    out += '\n';
  }
  return out;
}

void WriteProtocol(const std::vector<TrialPair>& trials,
                   const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write protocol file: " + path);
  out << FormatProtocol(trials);
}

}  // namespace sasv::protocol
