// sasv/core/common.hpp

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

#include <Eigen/Dense>

#include <iostream>
#include <mutex>
#include <stdexcept>
#include <string>

namespace sasv {

template <class S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <class S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using Real = double;
using Mat = MatX<Real>;
using Vec = VecX<Real>;

// Bad key/value, impossible request (e.g. sampling a trial type with an
// empty candidate pool), inconsistent experiment setup.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed file content; messages carry the offending line number.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Missing or inconsistent data at run time (unknown utterance id, shape
// mismatch, missing checkpoint).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

inline std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}

inline void LogWarn(const std::string& msg) {
  std::lock_guard<std::mutex> lock(log_mutex());
  std::cerr << "warning: " << msg << "\n";
}

inline void LogInfo(const std::string& msg) {
  std::lock_guard<std::mutex> lock(log_mutex());
  std::cerr << msg << "\n";
}

}  // namespace sasv
