// sasv/model/asv.hpp

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

#include "sasv/model/encoder.hpp"
#include "sasv/nn/losses.hpp"

namespace sasv::model {

struct AsvConfig {
  EncoderConfig encoder;
  int embed_dim = 32;
  int n_speakers = 2;  // pre-training head size
  double proto_scale_init = 10.0;
  double proto_scale_min = 1e-3;

  void Validate() const {
    encoder.Validate();
    if (embed_dim < 1) throw ConfigError("asv: embed_dim must be >= 1");
    if (n_speakers < 2) throw ConfigError("asv: need at least 2 speakers");
  }
};

struct AsvCache {
  ConvStackCache stack;
  Vec pooled;
  Vec embed_raw;  // pre-normalisation
};

// Speaker embedding extractor: conv stack, attentive statistics pooling, a
// linear projection to the embedding dimension, then length normalisation.
// Carries its pre-training speaker-classification head and the learnable
// angular-prototypical scale/bias.
class AsvModel {
 public:
  AsvModel() = default;
  AsvModel(const AsvConfig& config, Rng rng) : cfg_(config) {
    cfg_.Validate();
    stack_ = ConvStack(cfg_.encoder, &rng);
    proj_w_ = Tensor("proj.weight", cfg_.embed_dim, cfg_.encoder.pooled_dim());
    proj_b_ = Tensor("proj.bias", cfg_.embed_dim, 1);
    head_w_ = Tensor("head.weight", cfg_.n_speakers, cfg_.embed_dim);
    head_b_ = Tensor("head.bias", cfg_.n_speakers, 1);
    proto_scale_ = Tensor("proto.scale", 1, 1);
    proto_bias_ = Tensor("proto.bias", 1, 1);
    InitGlorot(&proj_w_, cfg_.encoder.pooled_dim(), cfg_.embed_dim, &rng);
    InitGlorot(&head_w_, cfg_.embed_dim, cfg_.n_speakers, &rng);
    proto_scale_.value(0, 0) = cfg_.proto_scale_init;
  }

  const AsvConfig& config() const { return cfg_; }

  // Unit-norm embedding of one utterance.
  Vec Embed(const Vec& signal, AsvCache* cache) const {
    ConvStackCache local;
    ConvStackCache* sc = cache != nullptr ? &cache->stack : &local;
    Vec pooled = stack_.Forward(signal, sc);
    Vec raw = nn::LinearForward<Real>(proj_w_.value, Vec(proj_b_.value.col(0)),
                                      pooled);
    if (cache != nullptr) {
      cache->pooled = pooled;
      cache->embed_raw = raw;
    }
    return nn::L2NormalizeForward<Real>(raw);
  }

  void EmbedBackward(const AsvCache& cache, const Vec& dembed) {
    Vec draw = nn::L2NormalizeBackward<Real>(cache.embed_raw, dembed);
    Mat dw = Mat::Zero(proj_w_.value.rows(), proj_w_.value.cols());
    Vec db = Vec::Zero(proj_b_.value.rows());
    Vec dpooled = nn::LinearBackward<Real>(proj_w_.value, cache.pooled, draw,
                                           &dw, &db);
    proj_w_.grad += dw;
    proj_b_.grad.col(0) += db;
    stack_.Backward(cache.stack, dpooled);
  }

  Mat HeadLogits(const Mat& embeddings) const {  // K x N
    return (head_w_.value * embeddings).colwise() + Vec(head_b_.value.col(0));
  }

  double proto_scale() const { return proto_scale_.value(0, 0); }
  double proto_bias() const { return proto_bias_.value(0, 0); }

  TensorRefs Params() {
    TensorRefs refs;
    stack_.CollectParams(&refs);
    refs.push_back(&proj_w_);
    refs.push_back(&proj_b_);
    refs.push_back(&head_w_);
    refs.push_back(&head_b_);
    refs.push_back(&proto_scale_);
    refs.push_back(&proto_bias_);
    return refs;
  }

  Tensor& head_w() { return head_w_; }
  Tensor& head_b() { return head_b_; }
  Tensor& proto_scale_tensor() { return proto_scale_; }
  Tensor& proto_bias_tensor() { return proto_bias_; }

  // Constraint projection applied after each optimiser step.
  void PostUpdate() {
    proto_scale_.value(0, 0) =
        std::max(proto_scale_.value(0, 0), cfg_.proto_scale_min);
  }

 private:
  AsvConfig cfg_;
  ConvStack stack_;
  Tensor proj_w_, proj_b_;
  Tensor head_w_, head_b_;
  Tensor proto_scale_, proto_bias_;
};

// Pre-training loss on a batch of N speakers with an anchor and a positive
// embedding each: softmax cross-entropy of the speaker head over all 2N
// embeddings plus the angular-prototypical term, summed with equal weight.
//
// `speaker_labels` holds the head class of each of the N speakers.
struct AsvPretrainGrads {
  Mat danchors, dpositives;
  Mat dhead_w;
  Vec dhead_b;
  double dproto_scale = 0.0;
  double dproto_bias = 0.0;
};

double AsvPretrainLoss(const Mat& anchors, const Mat& positives,
                       const std::vector<int>& speaker_labels,
                       const Mat& head_w, const Vec& head_b,
                       double proto_scale, double proto_bias,
                       AsvPretrainGrads* grads);

}  // namespace sasv::model
