// sasv/nn/losses.hpp

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

#include "sasv/nn/ops.hpp"

namespace sasv::nn {

// ---------------------------------------------------------------------------
// Softmax cross-entropy over a batch of logit columns.  Loss is the mean of
// the per-item negative log probability of the true class; dlogits carries
// (softmax - onehot) / N.

template <class S>
S SoftmaxCrossEntropy(const MatX<S>& logits, const std::vector<int>& labels,
                      MatX<S>* dlogits) {
  const Eigen::Index n = logits.cols();
  if (n == 0 || static_cast<Eigen::Index>(labels.size()) != n) {
    throw ConfigError("cross-entropy: labels must match the batch");
  }
  if (dlogits != nullptr) dlogits->setZero(logits.rows(), logits.cols());
  S loss = S(0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int label = labels[static_cast<std::size_t>(i)];
    if (label < 0 || label >= logits.rows()) {
      throw ConfigError("cross-entropy: label out of range");
    }
    const S max_logit = logits.col(i).maxCoeff();
    VecX<S> p = (logits.col(i).array() - max_logit).exp().matrix();
    const S z = p.sum();
    p /= z;
    loss += -(logits(label, i) - max_logit - std::log(z));
    if (dlogits != nullptr) {
      dlogits->col(i) = p / static_cast<S>(n);
      (*dlogits)(label, i) -= S(1) / static_cast<S>(n);
    }
  }
  return loss / static_cast<S>(n);
}

// Weighted variant: each item is scaled by weight[true class]; the batch
// reduction stays a plain mean, so uniform unit weights reduce to the
// unweighted loss.
template <class S>
S WeightedCrossEntropy(const MatX<S>& logits, const std::vector<int>& labels,
                       const VecX<S>& class_weights, MatX<S>* dlogits) {
  if ((class_weights.array() <= S(0)).any()) {
    throw ConfigError("weighted cross-entropy: class weights must be positive");
  }
  if (class_weights.size() != logits.rows()) {
    throw ConfigError("weighted cross-entropy: one weight per class required");
  }
  const Eigen::Index n = logits.cols();
  if (n == 0 || static_cast<Eigen::Index>(labels.size()) != n) {
    throw ConfigError("weighted cross-entropy: labels must match the batch");
  }
  if (dlogits != nullptr) dlogits->setZero(logits.rows(), logits.cols());
  S loss = S(0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int label = labels[static_cast<std::size_t>(i)];
    if (label < 0 || label >= logits.rows()) {
      throw ConfigError("weighted cross-entropy: label out of range");
    }
    const S w = class_weights[label];
    const S max_logit = logits.col(i).maxCoeff();
    VecX<S> p = (logits.col(i).array() - max_logit).exp().matrix();
    const S z = p.sum();
    p /= z;
    loss += -w * (logits(label, i) - max_logit - std::log(z));
    if (dlogits != nullptr) {
      dlogits->col(i) = w * p / static_cast<S>(n);
      (*dlogits)(label, i) -= w / static_cast<S>(n);
    }
  }
  return loss / static_cast<S>(n);
}

// ---------------------------------------------------------------------------
// Angular prototypical loss for batches of N speakers with an anchor and a
// positive utterance each.  With two utterances per speaker the prototype of
// speaker j is its positive embedding; logits are
//   S_ij = scale * cos(anchor_i, positive_j) + bias
// and the loss is mean softmax cross-entropy along the diagonal.

template <class S>
struct AngularProtoGrads {
  MatX<S> danchors;
  MatX<S> dpositives;
  S dscale = S(0);
  S dbias = S(0);
};

template <class S>
S AngularPrototypical(const MatX<S>& anchors, const MatX<S>& positives,
                      S scale, S bias, AngularProtoGrads<S>* grads) {
  const Eigen::Index n = anchors.cols();
  if (n < 2) {
    throw ConfigError(
        "angular prototypical loss: need at least 2 speakers per batch");
  }
  if (positives.cols() != n || positives.rows() != anchors.rows()) {
    throw ConfigError("angular prototypical loss: anchor/positive mismatch");
  }
  if (scale <= S(0)) {
    throw ConfigError("angular prototypical loss: scale must be positive");
  }

  MatX<S> cos(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      cos(i, j) = Cosine<S>(anchors.col(i), positives.col(j));
    }
  }
  MatX<S> logits = scale * cos;
  logits.array() += bias;

  S loss = S(0);
  MatX<S> dlogits = MatX<S>::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const S max_logit = logits.row(i).maxCoeff();
    VecX<S> p = (logits.row(i).array() - max_logit).exp().matrix().transpose();
    const S z = p.sum();
    p /= z;
    loss += -(logits(i, i) - max_logit - std::log(z));
    dlogits.row(i) = p.transpose() / static_cast<S>(n);
    dlogits(i, i) -= S(1) / static_cast<S>(n);
  }
  loss /= static_cast<S>(n);

  if (grads != nullptr) {
    grads->danchors.setZero(anchors.rows(), n);
    grads->dpositives.setZero(anchors.rows(), n);
    grads->dscale = (dlogits.array() * cos.array()).sum();
    grads->dbias = dlogits.sum();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const S dcos = dlogits(i, j) * scale;
        if (dcos == S(0)) continue;
        VecX<S> da = VecX<S>::Zero(anchors.rows());
        VecX<S> db = VecX<S>::Zero(anchors.rows());
        CosineBackward<S>(anchors.col(i), positives.col(j), dcos, &da, &db);
        grads->danchors.col(i) += da;
        grads->dpositives.col(j) += db;
      }
    }
  }
  return loss;
}

// ---------------------------------------------------------------------------
// One-class softmax loss on a scalar score.  The accept class is pushed
// above m_pos, everything else below m_neg:
//   positive: log(1 + exp(alpha * (m_pos - s)))
//   negative: log(1 + exp(alpha * (s - m_neg)))

template <class S>
void ValidateOcSoftmax(S alpha, S m_pos, S m_neg) {
  if (!(alpha > S(0))) {
    throw ConfigError("oc-softmax: alpha must be positive");
  }
  if (!(m_pos > m_neg)) {
    throw ConfigError("oc-softmax: m_pos must exceed m_neg");
  }
}

template <class S>
S OcSoftmaxLoss(S score, bool is_target_bonafide, S alpha, S m_pos, S m_neg,
                S* dscore) {
  ValidateOcSoftmax(alpha, m_pos, m_neg);
  const S z = is_target_bonafide ? alpha * (m_pos - score)
                                 : alpha * (score - m_neg);
  if (dscore != nullptr) {
    const S sig = Sigmoid(z);
    *dscore = is_target_bonafide ? -alpha * sig : alpha * sig;
  }
  return Softplus(z);
}

}  // namespace sasv::nn
