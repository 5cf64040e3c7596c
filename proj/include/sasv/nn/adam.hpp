// sasv/nn/adam.hpp

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

#include <vector>

#include "sasv/core/tensor_store.hpp"

namespace sasv::nn {

struct AdamConfig {
  Real learning_rate = 5e-5;
  Real beta1 = 0.9;
  Real beta2 = 0.999;
  Real eps = 1e-8;
};

// Adaptive per-parameter moment estimation with bias correction.  The
// tensor list fixes the state layout; it must stay identical across steps.
class Adam {
 public:
  Adam(AdamConfig config, TensorRefs params)
      : config_(config), params_(std::move(params)) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const Tensor* t : params_) {
      m_.push_back(Mat::Zero(t->value.rows(), t->value.cols()));
      v_.push_back(Mat::Zero(t->value.rows(), t->value.cols()));
    }
  }

  void Step() {
    ++t_;
    const Real correction1 = 1.0 - std::pow(config_.beta1, t_);
    const Real correction2 = 1.0 - std::pow(config_.beta2, t_);
    for (std::size_t i = 0; i < params_.size(); ++i) {
      Tensor& p = *params_[i];
      m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * p.grad;
      v_[i] = config_.beta2 * v_[i].array().matrix() +
              (1.0 - config_.beta2) * p.grad.array().square().matrix();
      const auto m_hat = m_[i].array() / correction1;
      const auto v_hat = v_[i].array() / correction2;
      p.value.array() -=
          config_.learning_rate * m_hat / (v_hat.sqrt() + config_.eps);
    }
  }

  int step_count() const { return t_; }

 private:
  AdamConfig config_;
  TensorRefs params_;
  std::vector<Mat> m_, v_;
  int t_ = 0;
};

}  // namespace sasv::nn
