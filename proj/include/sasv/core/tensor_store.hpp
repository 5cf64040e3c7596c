// sasv/core/tensor_store.hpp

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

#include <string>
#include <vector>

#include "sasv/core/common.hpp"

namespace sasv {

// A named parameter matrix with its gradient accumulator.  Vectors are
// stored as n-by-1 matrices.
struct Tensor {
  std::string name;
  Mat value;
  Mat grad;

  Tensor() = default;
  Tensor(std::string name_, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(name_)),
        value(Mat::Zero(rows, cols)),
        grad(Mat::Zero(rows, cols)) {}

  void ZeroGrad() { grad.setZero(); }
};

using TensorRefs = std::vector<Tensor*>;
using ConstTensorRefs = std::vector<const Tensor*>;

inline void ZeroGrads(const TensorRefs& tensors) {
  for (Tensor* t : tensors) t->ZeroGrad();
}

inline ConstTensorRefs AsConst(const TensorRefs& tensors) {
  return ConstTensorRefs(tensors.begin(), tensors.end());
}

// Checkpoint file format "sasv-tensors-v1": a one-line JSON header naming
// each tensor and its shape, a newline, then the tensor values concatenated
// in header order as little-endian 32-bit floats, column-major.
void SaveTensors(const ConstTensorRefs& tensors, const std::string& path);

// Loads into existing tensors; names and shapes must match the file exactly
// and in order.  Throws DataError otherwise.
void LoadTensors(const TensorRefs& tensors, const std::string& path);

}  // namespace sasv
