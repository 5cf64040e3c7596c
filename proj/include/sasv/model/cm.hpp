// sasv/model/cm.hpp

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

#include "sasv/model/encoder.hpp"
#include "sasv/nn/losses.hpp"

namespace sasv::model {

// Logit index convention: class 0 is bona fide, class 1 is spoof.  The CM
// score used everywhere downstream is the bona fide logit, so higher means
// more bona fide.
inline constexpr int kBonafideClass = 0;
inline constexpr int kSpoofClass = 1;

struct CmConfig {
  EncoderConfig encoder;
  int hidden_dim = 32;
  int embed_dim = 32;  // must equal the ASV embedding dimension

  void Validate() const {
    encoder.Validate();
    if (hidden_dim < 1) throw ConfigError("cm: hidden_dim must be >= 1");
    if (embed_dim < 1) throw ConfigError("cm: embed_dim must be >= 1");
  }
};

struct CmCache {
  ConvStackCache stack;
  Vec pooled;
  Vec hidden_pre;   // pre-tanh
  Vec hidden;       // penultimate representation
};

struct CmOutput {
  Vec embedding;  // D, unnormalised linear map of the penultimate layer
  Vec logits;     // 2: (bona fide, spoof)
};

// Spoofing countermeasure: conv stack, attentive statistics pooling, one
// hidden layer.  Two heads read the penultimate representation: the 2-class
// logit head and the linear projection to the CM embedding.
class CmModel {
 public:
  CmModel() = default;
  CmModel(const CmConfig& config, Rng rng) : cfg_(config) {
    cfg_.Validate();
    stack_ = ConvStack(cfg_.encoder, &rng);
    hidden_w_ =
        Tensor("hidden.weight", cfg_.hidden_dim, cfg_.encoder.pooled_dim());
    hidden_b_ = Tensor("hidden.bias", cfg_.hidden_dim, 1);
    logit_w_ = Tensor("logit.weight", 2, cfg_.hidden_dim);
    logit_b_ = Tensor("logit.bias", 2, 1);
    embed_w_ = Tensor("embed.weight", cfg_.embed_dim, cfg_.hidden_dim);
    embed_b_ = Tensor("embed.bias", cfg_.embed_dim, 1);
    InitGlorot(&hidden_w_, cfg_.encoder.pooled_dim(), cfg_.hidden_dim, &rng);
    InitGlorot(&logit_w_, cfg_.hidden_dim, 2, &rng);
    InitGlorot(&embed_w_, cfg_.hidden_dim, cfg_.embed_dim, &rng);
  }

  const CmConfig& config() const { return cfg_; }

  CmOutput Forward(const Vec& signal, CmCache* cache) const {
    ConvStackCache local;
    ConvStackCache* sc = cache != nullptr ? &cache->stack : &local;
    Vec pooled = stack_.Forward(signal, sc);
    Vec pre = nn::LinearForward<Real>(hidden_w_.value,
                                      Vec(hidden_b_.value.col(0)), pooled);
    Vec hidden = pre.array().tanh().matrix();
    CmOutput out;
    out.embedding = nn::LinearForward<Real>(embed_w_.value,
                                            Vec(embed_b_.value.col(0)), hidden);
    out.logits = nn::LinearForward<Real>(logit_w_.value,
                                         Vec(logit_b_.value.col(0)), hidden);
    if (cache != nullptr) {
      cache->pooled = pooled;
      cache->hidden_pre = pre;
      cache->hidden = hidden;
    }
    return out;
  }

  void Backward(const CmCache& cache, const Vec& dembedding,
                const Vec& dlogits) {
    Vec dhidden = Vec::Zero(cfg_.hidden_dim);
    if (dembedding.size() > 0) {
      Mat dw = Mat::Zero(embed_w_.value.rows(), embed_w_.value.cols());
      Vec db = Vec::Zero(embed_b_.value.rows());
      dhidden += nn::LinearBackward<Real>(embed_w_.value, cache.hidden,
                                          dembedding, &dw, &db);
      embed_w_.grad += dw;
      embed_b_.grad.col(0) += db;
    }
    if (dlogits.size() > 0) {
      Mat dw = Mat::Zero(logit_w_.value.rows(), logit_w_.value.cols());
      Vec db = Vec::Zero(logit_b_.value.rows());
      dhidden += nn::LinearBackward<Real>(logit_w_.value, cache.hidden,
                                          dlogits, &dw, &db);
      logit_w_.grad += dw;
      logit_b_.grad.col(0) += db;
    }
    Vec dpre =
        (dhidden.array() * (1.0 - cache.hidden.array().square())).matrix();
    Mat dw = Mat::Zero(hidden_w_.value.rows(), hidden_w_.value.cols());
    Vec db = Vec::Zero(hidden_b_.value.rows());
    Vec dpooled = nn::LinearBackward<Real>(hidden_w_.value, cache.pooled, dpre,
                                           &dw, &db);
    hidden_w_.grad += dw;
    hidden_b_.grad.col(0) += db;
    stack_.Backward(cache.stack, dpooled);
  }

  TensorRefs Params() {
    TensorRefs refs;
    stack_.CollectParams(&refs);
    refs.push_back(&hidden_w_);
    refs.push_back(&hidden_b_);
    refs.push_back(&logit_w_);
    refs.push_back(&logit_b_);
    refs.push_back(&embed_w_);
    refs.push_back(&embed_b_);
    return refs;
  }

  void PostUpdate() {}

 private:
  CmConfig cfg_;
  ConvStack stack_;
  Tensor hidden_w_, hidden_b_;
  Tensor logit_w_, logit_b_;
  Tensor embed_w_, embed_b_;
};

// Weighted cross-entropy over CM logit columns; labels use the class
// convention above.  Wrapper so the trainer and tests share one entry point.
inline double CmPretrainLoss(const Mat& logits, const std::vector<int>& labels,
                             const Vec& class_weights, Mat* dlogits) {
  return nn::WeightedCrossEntropy<Real>(logits, labels, class_weights,
                                        dlogits);
}

}  // namespace sasv::model
