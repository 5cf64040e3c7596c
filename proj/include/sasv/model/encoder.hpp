// sasv/model/encoder.hpp

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

#include "sasv/core/rng.hpp"
#include "sasv/core/tensor_store.hpp"
#include "sasv/nn/ops.hpp"

namespace sasv::model {

// Frame encoder shared by the ASV and CM sub-systems: three strided 1-D
// convolutions with tanh, followed by attentive statistics pooling down to a
// fixed-length vector of size 2 * channels[2].
struct EncoderConfig {
  std::array<int, 3> channels{16, 16, 24};
  std::array<int, 3> kernels{25, 5, 3};
  std::array<int, 3> strides{8, 4, 2};
  double pool_eps = 1e-6;

  int frame_dim() const { return channels[2]; }
  int pooled_dim() const { return 2 * channels[2]; }
  void Validate() const {
    for (int i = 0; i < 3; ++i) {
      if (channels[i] < 1 || kernels[i] < 1 || strides[i] < 1) {
        throw ConfigError("encoder: channels/kernels/strides must be >= 1");
      }
    }
    if (pool_eps <= 0) throw ConfigError("encoder: pool_eps must be > 0");
  }
};

// Glorot-uniform initialisation.
inline void InitGlorot(Tensor* t, int fan_in, int fan_out, Rng* rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (Eigen::Index j = 0; j < t->value.cols(); ++j) {
    for (Eigen::Index i = 0; i < t->value.rows(); ++i) {
      t->value(i, j) = rng->Uniform(-limit, limit);
    }
  }
}

struct ConvStackCache {
  std::array<nn::Conv1dCache<Real>, 3> conv;
  std::array<Mat, 3> activations;  // post-tanh layer outputs
  nn::AttnPoolCache<Real> pool;
};

struct ConvStack {
  EncoderConfig cfg;
  Tensor conv_w[3], conv_b[3];
  Tensor attn_v, attn_c;

  ConvStack() = default;
  ConvStack(const EncoderConfig& config, Rng* rng) : cfg(config) {
    cfg.Validate();
    int in_ch = 1;
    for (int i = 0; i < 3; ++i) {
      const int out_ch = cfg.channels[static_cast<std::size_t>(i)];
      const int k = cfg.kernels[static_cast<std::size_t>(i)];
      conv_w[i] = Tensor("conv" + std::to_string(i + 1) + ".weight", out_ch,
                         in_ch * k);
      conv_b[i] = Tensor("conv" + std::to_string(i + 1) + ".bias", out_ch, 1);
      InitGlorot(&conv_w[i], in_ch * k, out_ch, rng);
      in_ch = out_ch;
    }
    attn_v = Tensor("attn.weight", cfg.frame_dim(), 1);
    attn_c = Tensor("attn.bias", 1, 1);
    InitGlorot(&attn_v, cfg.frame_dim(), 1, rng);
  }

  // signal -> pooled statistics vector (2F)
  Vec Forward(const Vec& signal, ConvStackCache* cache) const {
    Mat x = signal.transpose();  // 1 x T
    for (int i = 0; i < 3; ++i) {
      Mat z = nn::Conv1dForward<Real>(
          conv_w[i].value, Vec(conv_b[i].value.col(0)), x,
          cfg.kernels[static_cast<std::size_t>(i)],
          cfg.strides[static_cast<std::size_t>(i)],
          cache != nullptr ? &cache->conv[static_cast<std::size_t>(i)]
                           : nullptr);
      x = nn::TanhForward<Real>(z);
      if (cache != nullptr) {
        cache->activations[static_cast<std::size_t>(i)] = x;
      }
    }
    return nn::AttnPoolForward<Real>(
        x, Vec(attn_v.value.col(0)), attn_c.value(0, 0), cfg.pool_eps,
        cache != nullptr ? &cache->pool : nullptr);
  }

  // Accumulates parameter gradients; input gradients stop at the signal.
  void Backward(const ConvStackCache& cache, const Vec& dpooled) {
    Vec dv = Vec::Zero(attn_v.value.rows());
    Real dc = 0.0;
    Mat dx = nn::AttnPoolBackward<Real>(cache.pool, Vec(attn_v.value.col(0)),
                                        dpooled, &dv, &dc);
    attn_v.grad.col(0) += dv;
    attn_c.grad(0, 0) += dc;
    for (int i = 2; i >= 0; --i) {
      const auto ui = static_cast<std::size_t>(i);
      Mat dz = nn::TanhBackward<Real>(cache.activations[ui], dx);
      Mat dw = Mat::Zero(conv_w[i].value.rows(), conv_w[i].value.cols());
      Vec db = Vec::Zero(conv_b[i].value.rows());
      dx = nn::Conv1dBackward<Real>(conv_w[i].value, cache.conv[ui], dz,
                                    cfg.kernels[ui], cfg.strides[ui], &dw,
                                    &db);
      conv_w[i].grad += dw;
      conv_b[i].grad.col(0) += db;
    }
  }

  void CollectParams(TensorRefs* out) {
    for (int i = 0; i < 3; ++i) {
      out->push_back(&conv_w[i]);
      out->push_back(&conv_b[i]);
    }
    out->push_back(&attn_v);
    out->push_back(&attn_c);
  }
};

}  // namespace sasv::model
