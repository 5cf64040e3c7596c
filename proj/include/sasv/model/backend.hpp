// sasv/model/backend.hpp

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

#include "sasv/core/rng.hpp"
#include "sasv/core/tensor_store.hpp"
#include "sasv/model/encoder.hpp"
#include "sasv/nn/losses.hpp"
#include "sasv/nn/ops.hpp"

namespace sasv::model {

// The three embeddings a backend scores, in the fixed stacking order.
struct EmbeddingTriple {
  Vec asv_enrol;
  Vec asv_test;
  Vec cm_test;
};

// Rows, in order: (asv_enrol, asv_test, cm_test); the row axis is the
// channel axis of the backend's convolutions.  Throws ConfigError on
// dimension mismatch.
Mat StackEmbeddings(const EmbeddingTriple& triple);

struct BackendConfig {
  std::array<int, 3> channels{16, 16, 8};
  int kernel = 3;
  int pool_len = 8;
  int hidden_dim = 32;
  int final_dim = 32;
  double alpha = 20.0;   // OC-softmax scale
  double m_pos = 0.9;    // accept-class margin
  double m_neg = 0.2;    // reject-class margin

  void Validate() const {
    for (int c : channels) {
      if (c < 1) throw ConfigError("backend: channels must be >= 1");
    }
    if (kernel < 1) throw ConfigError("backend: kernel must be >= 1");
    if (pool_len < 1) throw ConfigError("backend: pool_len must be >= 1");
    if (hidden_dim < 1 || final_dim < 1) {
      throw ConfigError("backend: hidden/final dims must be >= 1");
    }
    nn::ValidateOcSoftmax<Real>(alpha, m_pos, m_neg);
  }
};

struct BackendCache {
  Eigen::Index stacked_cols = 0;
  std::array<nn::Conv1dCache<Real>, 3> conv;
  std::array<Mat, 3> activations;
  Eigen::Index pre_pool_len = 0;
  Mat pooled;       // channels x pool_len
  Vec flat;         // channels * pool_len
  Vec hidden_pre;   // pre-tanh
  Vec hidden;
  Vec final;        // representation whose cosine with w is the score
};

// Backend classifier: 1-D convolutions over the stacked embeddings,
// adaptive average pooling, two linear layers, and the one-class softmax
// read-out cos(w, r) in [-1, 1].
class BackendModel {
 public:
  BackendModel() = default;
  BackendModel(const BackendConfig& config, Rng rng) : cfg_(config) {
    cfg_.Validate();
    int in_ch = 3;
    for (int i = 0; i < 3; ++i) {
      const int out_ch = cfg_.channels[static_cast<std::size_t>(i)];
      conv_w_[i] = Tensor("conv" + std::to_string(i + 1) + ".weight", out_ch,
                          in_ch * cfg_.kernel);
      conv_b_[i] = Tensor("conv" + std::to_string(i + 1) + ".bias", out_ch, 1);
      InitGlorot(&conv_w_[i], in_ch * cfg_.kernel, out_ch, &rng);
      in_ch = out_ch;
    }
    const int flat_dim = cfg_.channels[2] * cfg_.pool_len;
    lin1_w_ = Tensor("lin1.weight", cfg_.hidden_dim, flat_dim);
    lin1_b_ = Tensor("lin1.bias", cfg_.hidden_dim, 1);
    lin2_w_ = Tensor("lin2.weight", cfg_.final_dim, cfg_.hidden_dim);
    lin2_b_ = Tensor("lin2.bias", cfg_.final_dim, 1);
    direction_ = Tensor("oc.direction", cfg_.final_dim, 1);
    InitGlorot(&lin1_w_, flat_dim, cfg_.hidden_dim, &rng);
    InitGlorot(&lin2_w_, cfg_.hidden_dim, cfg_.final_dim, &rng);
    for (Eigen::Index i = 0; i < direction_.value.rows(); ++i) {
      direction_.value(i, 0) = rng.Normal();
    }
    direction_.value.col(0).normalize();
  }

  const BackendConfig& config() const { return cfg_; }

  // stacked: 3 x D. Returns the bona fide target score, a cosine in [-1,1].
  Real Score(const Mat& stacked, BackendCache* cache) const {
    if (stacked.rows() != 3) {
      throw ConfigError("backend: stacked input must have 3 rows");
    }
    BackendCache local;
    BackendCache* c = cache != nullptr ? cache : &local;
    c->stacked_cols = stacked.cols();
    Mat x = stacked;
    for (int i = 0; i < 3; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      Mat z = nn::Conv1dForward<Real>(conv_w_[i].value,
                                      Vec(conv_b_[i].value.col(0)), x,
                                      cfg_.kernel, /*stride=*/1, &c->conv[ui]);
      x = nn::TanhForward<Real>(z);
      c->activations[ui] = x;
    }
    c->pre_pool_len = x.cols();
    c->pooled = nn::AdaptiveAvgPoolForward<Real>(x, cfg_.pool_len);
    c->flat = Eigen::Map<const Vec>(c->pooled.data(), c->pooled.size());
    c->hidden_pre = nn::LinearForward<Real>(lin1_w_.value,
                                            Vec(lin1_b_.value.col(0)), c->flat);
    c->hidden = c->hidden_pre.array().tanh().matrix();
    c->final = nn::LinearForward<Real>(lin2_w_.value, Vec(lin2_b_.value.col(0)),
                                       c->hidden);
    return nn::Cosine<Real>(Vec(direction_.value.col(0)), c->final);
  }

  // Accumulates parameter gradients and returns the gradient with respect
  // to the stacked embeddings (for joint optimisation).
  Mat ScoreBackward(const BackendCache& cache, Real dscore) {
    Vec ddir = Vec::Zero(cfg_.final_dim);
    Vec dfinal = Vec::Zero(cfg_.final_dim);
    nn::CosineBackward<Real>(Vec(direction_.value.col(0)), cache.final, dscore,
                             &ddir, &dfinal);
    direction_.grad.col(0) += ddir;

    Mat dw2 = Mat::Zero(lin2_w_.value.rows(), lin2_w_.value.cols());
    Vec db2 = Vec::Zero(lin2_b_.value.rows());
    Vec dhidden = nn::LinearBackward<Real>(lin2_w_.value, cache.hidden, dfinal,
                                           &dw2, &db2);
    lin2_w_.grad += dw2;
    lin2_b_.grad.col(0) += db2;

    Vec dhid_pre =
        (dhidden.array() * (1.0 - cache.hidden.array().square())).matrix();
    Mat dw1 = Mat::Zero(lin1_w_.value.rows(), lin1_w_.value.cols());
    Vec db1 = Vec::Zero(lin1_b_.value.rows());
    Vec dflat = nn::LinearBackward<Real>(lin1_w_.value, cache.flat, dhid_pre,
                                         &dw1, &db1);
    lin1_w_.grad += dw1;
    lin1_b_.grad.col(0) += db1;

    Mat dpooled = Eigen::Map<const Mat>(dflat.data(), cache.pooled.rows(),
                                        cache.pooled.cols());
    Mat dx = nn::AdaptiveAvgPoolBackward<Real>(cache.pre_pool_len, dpooled);
    for (int i = 2; i >= 0; --i) {
      const auto ui = static_cast<std::size_t>(i);
      Mat dz = nn::TanhBackward<Real>(cache.activations[ui], dx);
      Mat dw = Mat::Zero(conv_w_[i].value.rows(), conv_w_[i].value.cols());
      Vec db = Vec::Zero(conv_b_[i].value.rows());
      dx = nn::Conv1dBackward<Real>(conv_w_[i].value, cache.conv[ui], dz,
                                    cfg_.kernel, /*stride=*/1, &dw, &db);
      conv_w_[i].grad += dw;
      conv_b_[i].grad.col(0) += db;
    }
    return dx;
  }

  // Training loss for one trial; type T1 is the only accept class.
  Real Loss(Real score, bool is_target_bonafide, Real* dscore) const {
    return nn::OcSoftmaxLoss<Real>(score, is_target_bonafide, cfg_.alpha,
                                   cfg_.m_pos, cfg_.m_neg, dscore);
  }

  TensorRefs Params() {
    TensorRefs refs;
    for (int i = 0; i < 3; ++i) {
      refs.push_back(&conv_w_[i]);
      refs.push_back(&conv_b_[i]);
    }
    refs.push_back(&lin1_w_);
    refs.push_back(&lin1_b_);
    refs.push_back(&lin2_w_);
    refs.push_back(&lin2_b_);
    refs.push_back(&direction_);
    return refs;
  }

  // The OC direction stays unit-norm by projection after every step.
  void PostUpdate() { direction_.value.col(0).normalize(); }

  Tensor& direction() { return direction_; }
  Tensor& lin2_w() { return lin2_w_; }
  Tensor& lin2_b() { return lin2_b_; }

 private:
  BackendConfig cfg_;
  Tensor conv_w_[3], conv_b_[3];
  Tensor lin1_w_, lin1_b_;
  Tensor lin2_w_, lin2_b_;
  Tensor direction_;
};

}  // namespace sasv::model
