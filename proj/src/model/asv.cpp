// sasv/model/asv.cpp

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

#include "sasv/model/asv.hpp"

namespace sasv::model {

double AsvPretrainLoss(const Mat& anchors, const Mat& positives,
                       const std::vector<int>& speaker_labels,
                       const Mat& head_w, const Vec& head_b,
                       double proto_scale, double proto_bias,
                       AsvPretrainGrads* grads) {
  const Eigen::Index n = anchors.cols();
  if (n < 2) {
    throw ConfigError("asv pre-training loss: need >= 2 speakers per batch");
  }
  if (positives.cols() != n) {
    throw ConfigError("asv pre-training loss: batch not arrangeable into "
                      "anchor/positive pairs");
  }
  if (static_cast<Eigen::Index>(speaker_labels.size()) != n) {
    throw ConfigError("asv pre-training loss: one label per speaker required");
  }

  // Softmax speaker classification over all 2N embeddings.
  Mat embeddings(anchors.rows(), 2 * n);
  embeddings << anchors, positives;
  std::vector<int> labels(static_cast<std::size_t>(2 * n));
  for (Eigen::Index i = 0; i < n; ++i) {
    labels[static_cast<std::size_t>(i)] = speaker_labels[static_cast<std::size_t>(i)];
    labels[static_cast<std::size_t>(n + i)] =
        speaker_labels[static_cast<std::size_t>(i)];
  }
  Mat logits = (head_w * embeddings).colwise() + head_b;
  Mat dlogits;
  const double ce =
      nn::SoftmaxCrossEntropy<Real>(logits, labels,
                                    grads != nullptr ? &dlogits : nullptr);

  nn::AngularProtoGrads<Real> proto_grads;
  const double proto = nn::AngularPrototypical<Real>(
      anchors, positives, proto_scale, proto_bias,
      grads != nullptr ? &proto_grads : nullptr);

  if (grads != nullptr) {
    Mat dembeddings = head_w.transpose() * dlogits;
    grads->danchors = dembeddings.leftCols(n) + proto_grads.danchors;
    grads->dpositives = dembeddings.rightCols(n) + proto_grads.dpositives;
    grads->dhead_w = dlogits * embeddings.transpose();
    grads->dhead_b = dlogits.rowwise().sum();
    grads->dproto_scale = proto_grads.dscale;
    grads->dproto_bias = proto_grads.dbias;
  }
  return ce + proto;
}

}  // namespace sasv::model
