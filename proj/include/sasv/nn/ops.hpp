// sasv/nn/ops.hpp

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

#include <cmath>
#include <string>

#include "sasv/core/common.hpp"

// Differentiable building blocks as free functions over Eigen dense types,
// templated on the scalar.  Every *Backward matches its forward by central
// finite differences; the gradient test suite pins that down.
//
// Sequences are stored feature-major: a T-frame sequence with F features is
// an F-by-T matrix whose columns are frames.

namespace sasv::nn {

template <class S>
S Softplus(S z) {
  // log(1 + exp(z)) without overflow
  return std::max(z, S(0)) + std::log1p(std::exp(-std::abs(z)));
}

template <class S>
S Sigmoid(S z) {
  if (z >= S(0)) return S(1) / (S(1) + std::exp(-z));
  const S e = std::exp(z);
  return e / (S(1) + e);
}

// ---------------------------------------------------------------------------
// 1-D convolution over the time axis (valid padding, strided)

template <class S>
Eigen::Index ConvOutLength(Eigen::Index t_in, int kernel, int stride) {
  if (t_in < kernel) {
    throw DataError("conv1d: input length " + std::to_string(t_in) +
                    " shorter than kernel " + std::to_string(kernel));
  }
  return (t_in - kernel) / stride + 1;
}

// Window matrix: row (c*kernel + k), column j  <-  x(c, j*stride + k).
template <class S>
MatX<S> Im2Col(const MatX<S>& x, int kernel, int stride) {
  const Eigen::Index c_in = x.rows();
  const Eigen::Index t_out = ConvOutLength<S>(x.cols(), kernel, stride);
  MatX<S> cols(c_in * kernel, t_out);
  for (Eigen::Index j = 0; j < t_out; ++j) {
    for (Eigen::Index c = 0; c < c_in; ++c) {
      for (int k = 0; k < kernel; ++k) {
        cols(c * kernel + k, j) = x(c, j * stride + k);
      }
    }
  }
  return cols;
}

template <class S>
MatX<S> Col2Im(const MatX<S>& dcols, Eigen::Index c_in, Eigen::Index t_in,
               int kernel, int stride) {
  MatX<S> dx = MatX<S>::Zero(c_in, t_in);
  for (Eigen::Index j = 0; j < dcols.cols(); ++j) {
    for (Eigen::Index c = 0; c < c_in; ++c) {
      for (int k = 0; k < kernel; ++k) {
        dx(c, j * stride + k) += dcols(c * kernel + k, j);
      }
    }
  }
  return dx;
}

template <class S>
struct Conv1dCache {
  MatX<S> cols;
  Eigen::Index t_in = 0;
};

// weight: (c_out) x (c_in*kernel), bias: c_out.  Returns (c_out) x t_out.
template <class S>
MatX<S> Conv1dForward(const MatX<S>& weight, const VecX<S>& bias,
                      const MatX<S>& x, int kernel, int stride,
                      Conv1dCache<S>* cache) {
  MatX<S> cols = Im2Col<S>(x, kernel, stride);
  MatX<S> y = (weight * cols).colwise() + bias;
  if (cache != nullptr) {
    cache->cols = std::move(cols);
    cache->t_in = x.cols();
  }
  return y;
}

// Accumulates parameter gradients, returns the input gradient.
template <class S>
MatX<S> Conv1dBackward(const MatX<S>& weight, const Conv1dCache<S>& cache,
                       const MatX<S>& dy, int kernel, int stride,
                       MatX<S>* dweight, VecX<S>* dbias) {
  *dweight += dy * cache.cols.transpose();
  *dbias += dy.rowwise().sum();
  const Eigen::Index c_in = weight.cols() / kernel;
  MatX<S> dcols = weight.transpose() * dy;
  return Col2Im<S>(dcols, c_in, cache.t_in, kernel, stride);
}

// ---------------------------------------------------------------------------
// Pointwise tanh

template <class S>
MatX<S> TanhForward(const MatX<S>& x) {
  return x.array().tanh().matrix();
}

template <class S>
MatX<S> TanhBackward(const MatX<S>& y, const MatX<S>& dy) {
  return (dy.array() * (S(1) - y.array().square())).matrix();
}

// ---------------------------------------------------------------------------
// Attentive statistics pooling
//
// Per-frame scalar scores s_t = v.h_t + c are soft-maxed into attention
// weights; the output stacks the attention-weighted mean over the weighted
// standard deviation, sqrt(E[h^2] - E[h]^2 + eps).  The epsilon keeps the
// square root differentiable when all frames agree.

template <class S>
struct AttnPoolCache {
  MatX<S> frames;      // F x T
  VecX<S> alpha;       // T
  VecX<S> mean;        // F
  VecX<S> moment2;     // F
  VecX<S> sigma;       // F
};

template <class S>
VecX<S> AttnPoolForward(const MatX<S>& frames, const VecX<S>& score_weight,
                        S score_bias, S eps, AttnPoolCache<S>* cache) {
  if (frames.cols() < 1) {
    throw DataError("attentive pooling: need at least one frame");
  }
  VecX<S> scores = frames.transpose() * score_weight;
  scores.array() += score_bias;
  const S max_score = scores.maxCoeff();
  VecX<S> alpha = (scores.array() - max_score).exp().matrix();
  alpha /= alpha.sum();
  VecX<S> mean = frames * alpha;
  VecX<S> moment2 = frames.array().square().matrix() * alpha;
  VecX<S> sigma =
      (moment2.array() - mean.array().square() + eps).sqrt().matrix();
  VecX<S> out(2 * frames.rows());
  out << mean, sigma;
  if (cache != nullptr) {
    cache->frames = frames;
    cache->alpha = std::move(alpha);
    cache->mean = mean;
    cache->moment2 = moment2;
    cache->sigma = sigma;
  }
  return out;
}

template <class S>
MatX<S> AttnPoolBackward(const AttnPoolCache<S>& cache,
                         const VecX<S>& score_weight, const VecX<S>& dout,
                         VecX<S>* dscore_weight, S* dscore_bias) {
  const Eigen::Index f = cache.frames.rows();
  const VecX<S> dmean_out = dout.head(f);
  const VecX<S> dsigma = dout.tail(f);
  const VecX<S> dvar =
      (dsigma.array() * (S(0.5) / cache.sigma.array())).matrix();
  const VecX<S> dmoment2 = dvar;
  const VecX<S> dmean =
      dmean_out - (S(2) * cache.mean.array() * dvar.array()).matrix();

  const MatX<S> frames_sq = cache.frames.array().square().matrix();
  VecX<S> dalpha =
      cache.frames.transpose() * dmean + frames_sq.transpose() * dmoment2;
  const S inner = cache.alpha.dot(dalpha);
  VecX<S> dscores =
      (cache.alpha.array() * (dalpha.array() - inner)).matrix();

  *dscore_weight += cache.frames * dscores;
  *dscore_bias += dscores.sum();

  MatX<S> dframes = dmean * cache.alpha.transpose();
  dframes += S(2) * (dmoment2.asDiagonal() * cache.frames) *
             cache.alpha.asDiagonal();
  dframes += score_weight * dscores.transpose();
  return dframes;
}

// ---------------------------------------------------------------------------
// Adaptive average pooling to a fixed output length.  Output bin i averages
// input columns [floor(i*T/L), ceil((i+1)*T/L)).

template <class S>
MatX<S> AdaptiveAvgPoolForward(const MatX<S>& x, int out_len) {
  const Eigen::Index t = x.cols();
  if (t < 1) throw DataError("adaptive pooling: empty input");
  MatX<S> y(x.rows(), out_len);
  for (int i = 0; i < out_len; ++i) {
    const Eigen::Index start = (t * i) / out_len;
    const Eigen::Index end = (t * (i + 1) + out_len - 1) / out_len;
    y.col(i) = x.middleCols(start, end - start).rowwise().mean();
  }
  return y;
}

template <class S>
MatX<S> AdaptiveAvgPoolBackward(Eigen::Index t_in, const MatX<S>& dy) {
  const int out_len = static_cast<int>(dy.cols());
  MatX<S> dx = MatX<S>::Zero(dy.rows(), t_in);
  for (int i = 0; i < out_len; ++i) {
    const Eigen::Index start = (t_in * i) / out_len;
    const Eigen::Index end = (t_in * (i + 1) + out_len - 1) / out_len;
    const S scale = S(1) / static_cast<S>(end - start);
    for (Eigen::Index j = start; j < end; ++j) {
      dx.col(j) += scale * dy.col(i);
    }
  }
  return dx;
}

// ---------------------------------------------------------------------------
// Affine map on vectors

template <class S>
VecX<S> LinearForward(const MatX<S>& weight, const VecX<S>& bias,
                      const VecX<S>& x) {
  return weight * x + bias;
}

template <class S>
VecX<S> LinearBackward(const MatX<S>& weight, const VecX<S>& x,
                       const VecX<S>& dy, MatX<S>* dweight, VecX<S>* dbias) {
  *dweight += dy * x.transpose();
  *dbias += dy;
  return weight.transpose() * dy;
}

// ---------------------------------------------------------------------------
// L2 normalisation and cosine similarity

template <class S>
VecX<S> L2NormalizeForward(const VecX<S>& x, S floor = S(1e-12)) {
  return x / std::max(x.norm(), floor);
}

template <class S>
VecX<S> L2NormalizeBackward(const VecX<S>& x, const VecX<S>& dy,
                            S floor = S(1e-12)) {
  const S n = std::max(x.norm(), floor);
  const VecX<S> y = x / n;
  return (dy - y * y.dot(dy)) / n;
}

template <class S>
S Cosine(const VecX<S>& a, const VecX<S>& b, S floor = S(1e-12)) {
  return a.dot(b) / (std::max(a.norm(), floor) * std::max(b.norm(), floor));
}

// d(cos)/da and d(cos)/db, scaled by the incoming dscore.
template <class S>
void CosineBackward(const VecX<S>& a, const VecX<S>& b, S dscore, VecX<S>* da,
                    VecX<S>* db, S floor = S(1e-12)) {
  const S na = std::max(a.norm(), floor);
  const S nb = std::max(b.norm(), floor);
  const VecX<S> ua = a / na;
  const VecX<S> ub = b / nb;
  const S cos = ua.dot(ub);
  *da += dscore * (ub - cos * ua) / na;
  *db += dscore * (ua - cos * ub) / nb;
}

}  // namespace sasv::nn
