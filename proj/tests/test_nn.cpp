// tests/test_nn.cpp

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sasv/core/rng.hpp"
#include "sasv/nn/adam.hpp"
#include "sasv/nn/losses.hpp"
#include "sasv/nn/ops.hpp"
#include "test_util.hpp"

using namespace sasv;
using namespace sasv::nn;
using sasv::test::NumericGrad;
using sasv::test::RelError;

namespace {

Mat RandomMat(Eigen::Index rows, Eigen::Index cols, Rng* rng,
              double scale = 1.0) {
  Mat m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = scale * rng->Normal();
  }
  return m;
}

Vec RandomVec(Eigen::Index n, Rng* rng, double scale = 1.0) {
  return Vec(RandomMat(n, 1, rng, scale));
}

constexpr double kGradTol = 1e-4;

}  // namespace

// ---------------------------------------------------------------------------
// attentive statistics pooling

TEST_CASE("attn pool: identical frames give mean=frame, std=sqrt(eps)") {
  const double eps = 1e-6;
  Mat frames(3, 5);
  Vec frame(3);
  frame << 0.2, -0.4, 1.1;
  for (int t = 0; t < 5; ++t) frames.col(t) = frame;
  Rng rng(1);
  const Vec v = RandomVec(3, &rng);
  const Vec out = AttnPoolForward<double>(frames, v, 0.3, eps, nullptr);
  for (int i = 0; i < 3; ++i) {
    CHECK(out[i] == doctest::Approx(frame[i]));
    CHECK(out[3 + i] == doctest::Approx(std::sqrt(eps)));
  }
}

TEST_CASE("attn pool: single frame ignores attention parameters") {
  const double eps = 1e-6;
  Mat frames(4, 1);
  Rng rng(2);
  frames.col(0) = RandomVec(4, &rng);
  const Vec out_a =
      AttnPoolForward<double>(frames, RandomVec(4, &rng), -2.0, eps, nullptr);
  const Vec out_b =
      AttnPoolForward<double>(frames, RandomVec(4, &rng), 5.0, eps, nullptr);
  CHECK((out_a - out_b).cwiseAbs().maxCoeff() < 1e-12);
  for (int i = 0; i < 4; ++i) {
    CHECK(out_a[i] == doctest::Approx(frames(i, 0)));
    CHECK(out_a[4 + i] == doctest::Approx(std::sqrt(eps)));
  }
}

TEST_CASE("attn pool: two frames 0 and 2 with equal attention") {
  const double eps = 1e-6;
  Mat frames(1, 2);
  frames << 0.0, 2.0;
  const Vec v = Vec::Zero(1);  // zero scoring weight -> uniform attention
  const Vec out = AttnPoolForward<double>(frames, v, 0.7, eps, nullptr);
  CHECK(out[0] == doctest::Approx(1.0));
  CHECK(out[1] == doctest::Approx(std::sqrt(1.0 + eps)));
}

TEST_CASE("attn pool: empty input is an error") {
  Mat frames(3, 0);
  CHECK_THROWS_AS(
      AttnPoolForward<double>(frames, Vec::Zero(3), 0.0, 1e-6, nullptr),
      DataError);
}

TEST_CASE("attn pool: permutation invariance and positive std floor") {
  Rng rng(3);
  Mat frames = RandomMat(5, 9, &rng);
  const Vec v = RandomVec(5, &rng);
  const Vec out = AttnPoolForward<double>(frames, v, 0.1, 1e-6, nullptr);
  // shuffle columns
  std::vector<int> perm = {4, 7, 0, 8, 2, 6, 1, 5, 3};
  Mat shuffled(5, 9);
  for (int t = 0; t < 9; ++t) {
    shuffled.col(t) = frames.col(perm[static_cast<std::size_t>(t)]);
  }
  const Vec out_perm = AttnPoolForward<double>(shuffled, v, 0.1, 1e-6, nullptr);
  CHECK((out - out_perm).cwiseAbs().maxCoeff() < 1e-12);
  for (int i = 5; i < 10; ++i) CHECK(out[i] >= std::sqrt(1e-6));
}

TEST_CASE("attn pool: gradients match finite differences") {
  Rng rng(4);
  for (int config = 0; config < 20; ++config) {
    const int f = 2 + static_cast<int>(rng.Below(4));
    const int t = 1 + static_cast<int>(rng.Below(6));
    Mat frames = RandomMat(f, t, &rng);
    Vec v = RandomVec(f, &rng);
    double c = rng.Normal();
    const Vec dout = RandomVec(2 * f, &rng);

    auto loss = [&]() {
      return dout.dot(AttnPoolForward<double>(frames, v, c, 1e-6, nullptr));
    };

    AttnPoolCache<double> cache;
    AttnPoolForward<double>(frames, v, c, 1e-6, &cache);
    Vec dv = Vec::Zero(f);
    double dc = 0.0;
    const Mat dframes = AttnPoolBackward<double>(cache, v, dout, &dv, &dc);

    for (Eigen::Index j = 0; j < frames.cols(); ++j) {
      for (Eigen::Index i = 0; i < frames.rows(); ++i) {
        CHECK(RelError(dframes(i, j), NumericGrad(loss, &frames(i, j))) <
              kGradTol);
      }
    }
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      CHECK(RelError(dv[i], NumericGrad(loss, &v[i])) < kGradTol);
    }
    CHECK(RelError(dc, NumericGrad(loss, &c)) < kGradTol);
  }
}

// ---------------------------------------------------------------------------
// convolution / pooling / affine / normalisation

TEST_CASE("conv1d: gradients match finite differences") {
  Rng rng(5);
  for (int config = 0; config < 10; ++config) {
    const int c_in = 1 + static_cast<int>(rng.Below(3));
    const int c_out = 1 + static_cast<int>(rng.Below(4));
    const int kernel = 2 + static_cast<int>(rng.Below(3));
    const int stride = 1 + static_cast<int>(rng.Below(3));
    const int t_in = kernel + static_cast<int>(rng.Below(9));
    Mat w = RandomMat(c_out, c_in * kernel, &rng);
    Vec b = RandomVec(c_out, &rng);
    Mat x = RandomMat(c_in, t_in, &rng);
    const Eigen::Index t_out = ConvOutLength<double>(t_in, kernel, stride);
    const Mat dy = RandomMat(c_out, t_out, &rng);

    auto loss = [&]() {
      return (dy.array() *
              Conv1dForward<double>(w, b, x, kernel, stride, nullptr).array())
          .sum();
    };

    Conv1dCache<double> cache;
    Conv1dForward<double>(w, b, x, kernel, stride, &cache);
    Mat dw = Mat::Zero(c_out, c_in * kernel);
    Vec db = Vec::Zero(c_out);
    const Mat dx = Conv1dBackward<double>(w, cache, dy, kernel, stride, &dw, &db);

    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) {
        CHECK(RelError(dw(i, j), NumericGrad(loss, &w(i, j))) < kGradTol);
      }
    }
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      CHECK(RelError(db[i], NumericGrad(loss, &b[i])) < kGradTol);
    }
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        CHECK(RelError(dx(i, j), NumericGrad(loss, &x(i, j))) < kGradTol);
      }
    }
  }
}

TEST_CASE("conv1d: too-short input is an error") {
  Mat w(2, 4), x(1, 3);
  w.setZero();
  x.setZero();
  CHECK_THROWS_AS(Conv1dForward<double>(w, Vec::Zero(2), x, 4, 1, nullptr),
                  DataError);
}

TEST_CASE("adaptive average pooling forward and backward") {
  Rng rng(6);
  Mat x = RandomMat(2, 10, &rng);
  const Mat y = AdaptiveAvgPoolForward<double>(x, 4);
  REQUIRE(y.cols() == 4);
  // bins per the floor/ceil rule: [0,3) [2,5) [5,8) [7,10)
  CHECK(y(0, 0) == doctest::Approx(x.row(0).segment(0, 3).mean()));
  CHECK(y(0, 1) == doctest::Approx(x.row(0).segment(2, 3).mean()));
  CHECK(y(0, 2) == doctest::Approx(x.row(0).segment(5, 3).mean()));
  CHECK(y(0, 3) == doctest::Approx(x.row(0).segment(7, 3).mean()));

  const Mat dy = RandomMat(2, 4, &rng);
  auto loss = [&]() {
    return (dy.array() * AdaptiveAvgPoolForward<double>(x, 4).array()).sum();
  };
  const Mat dx = AdaptiveAvgPoolBackward<double>(10, dy);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      CHECK(RelError(dx(i, j), NumericGrad(loss, &x(i, j))) < kGradTol);
    }
  }
  // identity when sizes agree
  const Mat same = AdaptiveAvgPoolForward<double>(x, 10);
  CHECK((same - x).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("l2 normalise and cosine gradients") {
  Rng rng(7);
  for (int config = 0; config < 10; ++config) {
    Vec x = RandomVec(6, &rng);
    Vec w = RandomVec(6, &rng);
    const Vec dout = RandomVec(6, &rng);

    auto norm_loss = [&]() {
      return dout.dot(L2NormalizeForward<double>(x));
    };
    const Vec dx = L2NormalizeBackward<double>(x, dout);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      CHECK(RelError(dx[i], NumericGrad(norm_loss, &x[i])) < kGradTol);
    }
    CHECK(L2NormalizeForward<double>(x).norm() == doctest::Approx(1.0));

    auto cos_loss = [&]() { return Cosine<double>(w, x); };
    Vec dw = Vec::Zero(6), dxc = Vec::Zero(6);
    CosineBackward<double>(w, x, 1.0, &dw, &dxc);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      CHECK(RelError(dxc[i], NumericGrad(cos_loss, &x[i])) < kGradTol);
      CHECK(RelError(dw[i], NumericGrad(cos_loss, &w[i])) < kGradTol);
    }
  }
  // cosine extremes
  Vec a(3), b(3);
  a << 1, 0, 0;
  b << 2, 0, 0;
  CHECK(Cosine<double>(a, b) == doctest::Approx(1.0));
  b << 0, 3, 0;
  CHECK(Cosine<double>(a, b) == doctest::Approx(0.0));
  b << -5, 0, 0;
  CHECK(Cosine<double>(a, b) == doctest::Approx(-1.0));
}

// ---------------------------------------------------------------------------
// losses

TEST_CASE("softmax cross-entropy: value and gradient") {
  Rng rng(8);
  Mat logits = RandomMat(5, 7, &rng);
  std::vector<int> labels;
  for (int i = 0; i < 7; ++i) {
    labels.push_back(static_cast<int>(rng.Below(5)));
  }
  Mat dlogits;
  const double loss = SoftmaxCrossEntropy<double>(logits, labels, &dlogits);
  CHECK(loss > 0.0);
  auto loss_fn = [&]() {
    return SoftmaxCrossEntropy<double>(logits, labels, nullptr);
  };
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
      CHECK(RelError(dlogits(i, j), NumericGrad(loss_fn, &logits(i, j))) <
            kGradTol);
    }
  }
}

TEST_CASE("weighted cross-entropy: frozen hand value") {
  // logits (1,0) labelled bona fide and (0,1) labelled spoof, weights (9,1):
  // (9*softplus(-1) + 1*softplus(-1)) / 2 = 5*log(1+exp(-1))
  Mat logits(2, 2);
  logits << 1.0, 0.0, 0.0, 1.0;
  Vec weights(2);
  weights << 9.0, 1.0;
  const double loss =
      WeightedCrossEntropy<double>(logits, {0, 1}, weights, nullptr);
  CHECK(loss == doctest::Approx(5.0 * std::log1p(std::exp(-1.0)))
                    .epsilon(1e-12));
  CHECK(loss == doctest::Approx(1.5663084375911143).epsilon(1e-12));
}

TEST_CASE("weighted cross-entropy: uniform weights reduce to plain CE") {
  Rng rng(9);
  Mat logits = RandomMat(2, 9, &rng);
  std::vector<int> labels;
  for (int i = 0; i < 9; ++i) labels.push_back(static_cast<int>(rng.Below(2)));
  const double plain = SoftmaxCrossEntropy<double>(logits, labels, nullptr);
  const double weighted = WeightedCrossEntropy<double>(
      logits, labels, Vec::Ones(2), nullptr);
  CHECK(weighted == doctest::Approx(plain).epsilon(1e-12));
}

TEST_CASE("weighted cross-entropy: confident truth drives loss to zero") {
  Mat logits(2, 1);
  logits << 30.0, 0.0;
  CHECK(WeightedCrossEntropy<double>(logits, {0}, Vec::Ones(2), nullptr) <
        1e-12);
}

TEST_CASE("weighted cross-entropy: errors") {
  Mat logits(2, 2);
  logits.setZero();
  Vec bad_weights(2);
  bad_weights << 1.0, 0.0;
  CHECK_THROWS_AS(
      WeightedCrossEntropy<double>(logits, {0, 1}, bad_weights, nullptr),
      ConfigError);
  CHECK_THROWS_AS(
      WeightedCrossEntropy<double>(logits, {0}, Vec::Ones(2), nullptr),
      ConfigError);
}

TEST_CASE("weighted cross-entropy: gradient matches finite differences") {
  Rng rng(10);
  for (int config = 0; config < 20; ++config) {
    const int n = 2 + static_cast<int>(rng.Below(8));
    Mat logits = RandomMat(2, n, &rng);
    Vec weights(2);
    weights << rng.Uniform(0.5, 9.5), rng.Uniform(0.5, 9.5);
    std::vector<int> labels;
    for (int i = 0; i < n; ++i) {
      labels.push_back(static_cast<int>(rng.Below(2)));
    }
    Mat dlogits;
    WeightedCrossEntropy<double>(logits, labels, weights, &dlogits);
    auto loss_fn = [&]() {
      return WeightedCrossEntropy<double>(logits, labels, weights, nullptr);
    };
    for (Eigen::Index j = 0; j < logits.cols(); ++j) {
      for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        CHECK(RelError(dlogits(i, j), NumericGrad(loss_fn, &logits(i, j))) <
              kGradTol);
      }
    }
  }
}

TEST_CASE("angular prototypical: hand value at N=2, scale 1, bias 0") {
  Mat anchors(2, 2), positives(2, 2);
  anchors << 1, 0, 0, 1;
  positives << 1, 0, 0, 1;
  const double loss =
      AngularPrototypical<double>(anchors, positives, 1.0, 0.0, nullptr);
  // each row: -log(e^1 / (e^1 + e^0)) = log(1 + e^-1)
  CHECK(loss == doctest::Approx(std::log1p(std::exp(-1.0))).epsilon(1e-12));
}

TEST_CASE("angular prototypical: clustered embeddings, large scale -> 0") {
  Mat anchors(3, 2), positives(3, 2);
  anchors << 1, 0, 0, 1, 0, 0;
  positives = anchors;
  const double loss =
      AngularPrototypical<double>(anchors, positives, 1000.0, 0.0, nullptr);
  CHECK(loss < 1e-9);
}

TEST_CASE("angular prototypical: single speaker is an error") {
  Mat anchors(3, 1), positives(3, 1);
  anchors.setOnes();
  positives.setOnes();
  CHECK_THROWS_AS(
      AngularPrototypical<double>(anchors, positives, 1.0, 0.0, nullptr),
      ConfigError);
}

TEST_CASE("angular prototypical: gradients match finite differences") {
  Rng rng(11);
  for (int config = 0; config < 20; ++config) {
    const int n = 2 + static_cast<int>(rng.Below(4));
    const int d = 2 + static_cast<int>(rng.Below(5));
    Mat anchors = RandomMat(d, n, &rng);
    Mat positives = RandomMat(d, n, &rng);
    double scale = rng.Uniform(0.5, 12.0);
    double bias = rng.Normal();

    AngularProtoGrads<double> grads;
    AngularPrototypical<double>(anchors, positives, scale, bias, &grads);
    auto loss_fn = [&]() {
      return AngularPrototypical<double>(anchors, positives, scale, bias,
                                         nullptr);
    };
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < d; ++i) {
        CHECK(RelError(grads.danchors(i, j),
                       NumericGrad(loss_fn, &anchors(i, j))) < kGradTol);
        CHECK(RelError(grads.dpositives(i, j),
                       NumericGrad(loss_fn, &positives(i, j))) < kGradTol);
      }
    }
    CHECK(RelError(grads.dscale, NumericGrad(loss_fn, &scale)) < kGradTol);
    CHECK(RelError(grads.dbias, NumericGrad(loss_fn, &bias)) < kGradTol);
  }
}

TEST_CASE("oc-softmax: margin points give log 2") {
  CHECK(OcSoftmaxLoss<double>(0.9, true, 20.0, 0.9, 0.2, nullptr) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(OcSoftmaxLoss<double>(0.2, false, 20.0, 0.9, 0.2, nullptr) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("oc-softmax: frozen derived value at s=1, alpha=20, m_pos=0.9") {
  const double loss = OcSoftmaxLoss<double>(1.0, true, 20.0, 0.9, 0.2, nullptr);
  CHECK(loss == doctest::Approx(std::log1p(std::exp(-2.0))).epsilon(1e-12));
  CHECK(loss == doctest::Approx(0.12692801104297263).epsilon(1e-10));
}

TEST_CASE("oc-softmax: monotonicity and hyperparameter validation") {
  // strictly decreasing in the score for positives, increasing for negatives
  double prev_pos = OcSoftmaxLoss<double>(-1.0, true, 5.0, 0.9, 0.2, nullptr);
  double prev_neg = OcSoftmaxLoss<double>(-1.0, false, 5.0, 0.9, 0.2, nullptr);
  for (double s = -0.9; s <= 1.0; s += 0.1) {
    const double pos = OcSoftmaxLoss<double>(s, true, 5.0, 0.9, 0.2, nullptr);
    const double neg = OcSoftmaxLoss<double>(s, false, 5.0, 0.9, 0.2, nullptr);
    CHECK(pos < prev_pos);
    CHECK(neg > prev_neg);
    prev_pos = pos;
    prev_neg = neg;
  }
  CHECK_THROWS_AS(OcSoftmaxLoss<double>(0.0, true, -1.0, 0.9, 0.2, nullptr),
                  ConfigError);
  CHECK_THROWS_AS(OcSoftmaxLoss<double>(0.0, true, 20.0, 0.2, 0.9, nullptr),
                  ConfigError);
}

TEST_CASE("oc-softmax: gradient matches finite differences") {
  Rng rng(12);
  for (int config = 0; config < 40; ++config) {
    double s = rng.Uniform(-1.2, 1.2);
    const double alpha = rng.Uniform(1.0, 30.0);
    const double m_neg = rng.Uniform(-0.5, 0.5);
    const double m_pos = m_neg + rng.Uniform(0.05, 1.0);
    const bool positive = rng.Below(2) == 0;
    double dscore = 0.0;
    OcSoftmaxLoss<double>(s, positive, alpha, m_pos, m_neg, &dscore);
    auto loss_fn = [&]() {
      return OcSoftmaxLoss<double>(s, positive, alpha, m_pos, m_neg, nullptr);
    };
    CHECK(RelError(dscore, NumericGrad(loss_fn, &s)) < kGradTol);
  }
}

// ---------------------------------------------------------------------------
// optimiser

TEST_CASE("adam minimises a convex quadratic") {
  Tensor p("p", 3, 1);
  p.value << 2.0, -1.5, 0.5;
  Vec target(3);
  target << -0.3, 0.8, 0.1;
  Adam adam(AdamConfig{0.05, 0.9, 0.999, 1e-8}, {&p});
  for (int i = 0; i < 500; ++i) {
    p.grad = p.value - target;  // gradient of 0.5*||p - target||^2
    adam.Step();
  }
  CHECK((Vec(p.value.col(0)) - target).norm() < 1e-3);
  CHECK(adam.step_count() == 500);
}

TEST_CASE("adam with zero gradient leaves parameters unchanged") {
  Tensor p("p", 2, 1);
  p.value << 1.0, -2.0;
  const Mat before = p.value;
  Adam adam(AdamConfig{0.1, 0.9, 0.999, 1e-8}, {&p});
  for (int i = 0; i < 10; ++i) {
    p.ZeroGrad();
    adam.Step();
  }
  CHECK(p.value == before);
}
