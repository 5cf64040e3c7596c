// tests/test_util.hpp

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

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "sasv/core/common.hpp"
#include "sasv/core/tensor_store.hpp"

namespace sasv::test {

// Central finite difference of a scalar function with respect to one value.
inline double NumericGrad(const std::function<double()>& f, double* x) {
  const double orig = *x;
  const double h = 1e-5 * std::max(1.0, std::abs(orig));
  *x = orig + h;
  const double fp = f();
  *x = orig - h;
  const double fm = f();
  *x = orig;
  return (fp - fm) / (2.0 * h);
}

inline double RelError(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

// Checks every coordinate of a tensor's gradient against finite
// differences; returns the worst relative error.
inline double CheckTensorGrad(const std::function<double()>& loss,
                              Tensor* tensor, const Mat& analytic) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < tensor->value.cols(); ++j) {
    for (Eigen::Index i = 0; i < tensor->value.rows(); ++i) {
      const double fd = NumericGrad(loss, &tensor->value(i, j));
      worst = std::max(worst, RelError(analytic(i, j), fd));
    }
  }
  return worst;
}

// Temporary directory that cleans up after the test.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("sasvkit_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string str() const { return path_.string(); }
  std::filesystem::path path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(bool(in), "cannot open " << path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace sasv::test
