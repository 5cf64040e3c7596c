// tests/test_models.cpp

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

#include <map>

#include "sasv/model/bundle.hpp"
#include "sasv/nn/adam.hpp"
#include "test_util.hpp"

using namespace sasv;
using namespace sasv::model;
using sasv::test::NumericGrad;
using sasv::test::RelError;

namespace {

constexpr double kGradTol = 1e-4;

EncoderConfig TinyEncoder() {
  EncoderConfig cfg;
  cfg.channels = {6, 6, 8};
  cfg.kernels = {12, 5, 3};
  cfg.strides = {4, 2, 2};
  return cfg;
}

AsvConfig TinyAsv() {
  AsvConfig cfg;
  cfg.encoder = TinyEncoder();
  cfg.embed_dim = 10;
  cfg.n_speakers = 4;
  return cfg;
}

CmConfig TinyCm() {
  CmConfig cfg;
  cfg.encoder = TinyEncoder();
  cfg.hidden_dim = 12;
  cfg.embed_dim = 10;
  return cfg;
}

Vec RandomSignal(int n, Rng* rng) {
  Vec x(n);
  for (int i = 0; i < n; ++i) x[i] = 0.5 * rng->Normal();
  return x;
}

std::map<std::string, const Tensor*> NamedParams(TensorRefs refs) {
  std::map<std::string, const Tensor*> map;
  for (const Tensor* t : refs) map[t->name] = t;
  return map;
}

// Independent re-implementation of the backend forward pass with plain
// loops; the production path must agree with it exactly.
double NaiveBackendScore(BackendModel* backend, const Mat& stacked) {
  auto params = NamedParams(backend->Params());
  const BackendConfig& cfg = backend->config();
  std::vector<std::vector<double>> x(3);
  for (int c = 0; c < 3; ++c) {
    for (Eigen::Index j = 0; j < stacked.cols(); ++j) {
      x[static_cast<std::size_t>(c)].push_back(stacked(c, j));
    }
  }
  for (int layer = 1; layer <= 3; ++layer) {
    const Tensor* w = params.at("conv" + std::to_string(layer) + ".weight");
    const Tensor* b = params.at("conv" + std::to_string(layer) + ".bias");
    const int c_in = static_cast<int>(x.size());
    const int c_out = static_cast<int>(w->value.rows());
    const int t_out = static_cast<int>(x[0].size()) - cfg.kernel + 1;
    std::vector<std::vector<double>> y(static_cast<std::size_t>(c_out));
    for (int co = 0; co < c_out; ++co) {
      for (int j = 0; j < t_out; ++j) {
        double acc = b->value(co, 0);
        for (int ci = 0; ci < c_in; ++ci) {
          for (int k = 0; k < cfg.kernel; ++k) {
            acc += w->value(co, ci * cfg.kernel + k) *
                   x[static_cast<std::size_t>(ci)][static_cast<std::size_t>(j + k)];
          }
        }
        y[static_cast<std::size_t>(co)].push_back(std::tanh(acc));
      }
    }
    x = std::move(y);
  }
  // adaptive average pooling to cfg.pool_len
  const int t_in = static_cast<int>(x[0].size());
  std::vector<double> flat;
  flat.resize(x.size() * static_cast<std::size_t>(cfg.pool_len));
  for (int i = 0; i < cfg.pool_len; ++i) {
    const int start = (t_in * i) / cfg.pool_len;
    const int end = (t_in * (i + 1) + cfg.pool_len - 1) / cfg.pool_len;
    for (std::size_t c = 0; c < x.size(); ++c) {
      double acc = 0.0;
      for (int j = start; j < end; ++j) {
        acc += x[c][static_cast<std::size_t>(j)];
      }
      // column-major flattening: channel index varies fastest
      flat[c + x.size() * static_cast<std::size_t>(i)] = acc / (end - start);
    }
  }
  const Tensor* w1 = params.at("lin1.weight");
  const Tensor* b1 = params.at("lin1.bias");
  std::vector<double> hidden(static_cast<std::size_t>(w1->value.rows()));
  for (Eigen::Index i = 0; i < w1->value.rows(); ++i) {
    double acc = b1->value(i, 0);
    for (Eigen::Index j = 0; j < w1->value.cols(); ++j) {
      acc += w1->value(i, j) * flat[static_cast<std::size_t>(j)];
    }
    hidden[static_cast<std::size_t>(i)] = std::tanh(acc);
  }
  const Tensor* w2 = params.at("lin2.weight");
  const Tensor* b2 = params.at("lin2.bias");
  std::vector<double> final(static_cast<std::size_t>(w2->value.rows()));
  for (Eigen::Index i = 0; i < w2->value.rows(); ++i) {
    double acc = b2->value(i, 0);
    for (Eigen::Index j = 0; j < w2->value.cols(); ++j) {
      acc += w2->value(i, j) * hidden[static_cast<std::size_t>(j)];
    }
    final[static_cast<std::size_t>(i)] = acc;
  }
  const Tensor* dir = params.at("oc.direction");
  double dot = 0.0, nw = 0.0, nr = 0.0;
  for (Eigen::Index i = 0; i < dir->value.rows(); ++i) {
    dot += dir->value(i, 0) * final[static_cast<std::size_t>(i)];
    nw += dir->value(i, 0) * dir->value(i, 0);
    nr += final[static_cast<std::size_t>(i)] * final[static_cast<std::size_t>(i)];
  }
  return dot / (std::sqrt(nw) * std::sqrt(nr));
}

}  // namespace

TEST_CASE("asv embeddings are unit norm and deterministic") {
  AsvModel asv(TinyAsv(), Rng(42));
  Rng rng(1);
  const Vec signal = RandomSignal(200, &rng);
  const Vec e1 = asv.Embed(signal, nullptr);
  const Vec e2 = asv.Embed(signal, nullptr);
  CHECK(e1.size() == 10);
  CHECK(e1.norm() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(e1 == e2);
  CHECK_THROWS_AS(asv.Embed(RandomSignal(5, &rng), nullptr), DataError);
}

TEST_CASE("cm forward shapes and determinism") {
  CmModel cm(TinyCm(), Rng(43));
  Rng rng(2);
  const Vec signal = RandomSignal(200, &rng);
  const CmOutput a = cm.Forward(signal, nullptr);
  const CmOutput b = cm.Forward(signal, nullptr);
  CHECK(a.embedding.size() == 10);
  CHECK(a.logits.size() == 2);
  CHECK(a.embedding == b.embedding);
  CHECK(a.logits == b.logits);
  CHECK_THROWS_AS(cm.Forward(RandomSignal(4, &rng), nullptr), DataError);
}

TEST_CASE("stack_embeddings: order matters and mismatches are errors") {
  Vec a(4), b(4), c(4);
  a << 1, 2, 3, 4;
  b << 5, 6, 7, 8;
  c << 9, 10, 11, 12;
  const Mat stacked = StackEmbeddings({a, b, c});
  REQUIRE(stacked.rows() == 3);
  REQUIRE(stacked.cols() == 4);
  CHECK(Vec(stacked.row(0).transpose()) == a);
  CHECK(Vec(stacked.row(1).transpose()) == b);
  CHECK(Vec(stacked.row(2).transpose()) == c);
  CHECK(StackEmbeddings({b, a, c}) != stacked);  // no role symmetry
  Vec d8(8);
  d8.setZero();
  CHECK_THROWS_AS(StackEmbeddings({a, a, d8}), ConfigError);
}

TEST_CASE("backend score stays in [-1, 1] and matches the naive oracle") {
  BackendConfig cfg;
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    BackendModel backend(cfg, Rng(100 + static_cast<std::uint64_t>(trial)));
    Mat stacked(3, 32);
    for (int c = 0; c < 3; ++c) {
      for (int j = 0; j < 32; ++j) stacked(c, j) = rng.Uniform(-1.0, 1.0);
    }
    const double score = backend.Score(stacked, nullptr);
    CHECK(score >= -1.0);
    CHECK(score <= 1.0);
    const double naive = NaiveBackendScore(&backend, stacked);
    CHECK(score == doctest::Approx(naive).epsilon(1e-12));
  }
}

TEST_CASE("backend: scaling the final linear layer preserves score order") {
  BackendConfig cfg;
  BackendModel backend(cfg, Rng(7));
  Rng rng(4);
  std::vector<Mat> inputs;
  std::vector<double> scores;
  for (int i = 0; i < 12; ++i) {
    Mat stacked(3, 32);
    for (int c = 0; c < 3; ++c) {
      for (int j = 0; j < 32; ++j) stacked(c, j) = rng.Uniform(-1.0, 1.0);
    }
    inputs.push_back(stacked);
    scores.push_back(backend.Score(stacked, nullptr));
  }
  backend.lin2_w().value *= 3.7;
  backend.lin2_b().value *= 3.7;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    // cosine read-out is scale invariant, so scores are unchanged entirely
    CHECK(backend.Score(inputs[i], nullptr) ==
          doctest::Approx(scores[i]).epsilon(1e-9));
  }
}

TEST_CASE("backend: full-path gradient matches finite differences") {
  BackendConfig cfg;
  cfg.channels = {5, 4, 3};
  cfg.pool_len = 4;
  cfg.hidden_dim = 6;
  cfg.final_dim = 5;
  Rng rng(5);
  for (int config = 0; config < 3; ++config) {
    BackendModel backend(cfg, Rng(200 + static_cast<std::uint64_t>(config)));
    Mat stacked(3, 12);
    for (int c = 0; c < 3; ++c) {
      for (int j = 0; j < 12; ++j) stacked(c, j) = rng.Uniform(-1.0, 1.0);
    }
    const bool is_target = config % 2 == 0;

    auto loss_fn = [&]() {
      const double s = backend.Score(stacked, nullptr);
      return backend.Loss(s, is_target, nullptr);
    };

    ZeroGrads(backend.Params());
    BackendCache cache;
    const double score = backend.Score(stacked, &cache);
    double dscore = 0.0;
    backend.Loss(score, is_target, &dscore);
    const Mat dstacked = backend.ScoreBackward(cache, dscore);

    for (Tensor* t : backend.Params()) {
      const Mat analytic = t->grad;
      const double worst = test::CheckTensorGrad(loss_fn, t, analytic);
      CAPTURE(t->name);
      CHECK(worst < kGradTol);
    }
    for (Eigen::Index j = 0; j < stacked.cols(); ++j) {
      for (Eigen::Index i = 0; i < stacked.rows(); ++i) {
        CHECK(RelError(dstacked(i, j), NumericGrad(loss_fn, &stacked(i, j))) <
              kGradTol);
      }
    }
  }
}

TEST_CASE("backend learns linearly separable triples below log 2 in 200 steps") {
  BackendConfig cfg;
  BackendModel backend(cfg, Rng(11));
  Rng rng(6);
  Vec u = Vec::Zero(32), v = Vec::Zero(32);
  u[0] = 1.0;
  v[1] = 1.0;
  // T1: matching speaker embeddings, bona fide CM direction; negatives flip
  // one of the two factors.
  struct Example {
    EmbeddingTriple triple;
    bool positive;
  };
  std::vector<Example> data;
  for (int i = 0; i < 6; ++i) {
    Vec noise = Vec::Zero(32);
    for (int k = 0; k < 32; ++k) noise[k] = 0.05 * rng.Normal();
    data.push_back({{u, u + noise, v}, true});
    data.push_back({{u, -u + noise, v}, false});
    data.push_back({{u, u + noise, -v}, false});
    data.push_back({{u, -u + noise, -v}, false});
  }
  nn::Adam adam(nn::AdamConfig{1e-2, 0.9, 0.999, 1e-8}, backend.Params());
  double mean_loss = 0.0;
  for (int step = 0; step < 200; ++step) {
    ZeroGrads(backend.Params());
    mean_loss = 0.0;
    for (const Example& ex : data) {
      BackendCache cache;
      const double s =
          backend.Score(StackEmbeddings(ex.triple), &cache);
      double dscore = 0.0;
      mean_loss += backend.Loss(s, ex.positive, &dscore);
      backend.ScoreBackward(cache, dscore / static_cast<double>(data.size()));
    }
    mean_loss /= static_cast<double>(data.size());
    adam.Step();
    backend.PostUpdate();
  }
  CHECK(mean_loss < std::log(2.0));
}

TEST_CASE("backend: direction renormalised after updates") {
  BackendConfig cfg;
  BackendModel backend(cfg, Rng(12));
  backend.direction().value *= 3.0;
  backend.PostUpdate();
  CHECK(backend.direction().value.col(0).norm() ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("asv pre-training loss: gradient through the encoder (sampled)") {
  AsvModel asv(TinyAsv(), Rng(21));
  Rng rng(7);
  const int n_speakers = 3;
  std::vector<Vec> anchor_sig, positive_sig;
  for (int i = 0; i < n_speakers; ++i) {
    anchor_sig.push_back(RandomSignal(160, &rng));
    positive_sig.push_back(RandomSignal(160, &rng));
  }
  std::vector<int> labels = {0, 1, 2};

  auto loss_fn = [&]() {
    Mat anchors(10, n_speakers), positives(10, n_speakers);
    for (int i = 0; i < n_speakers; ++i) {
      anchors.col(i) = asv.Embed(anchor_sig[static_cast<std::size_t>(i)], nullptr);
      positives.col(i) =
          asv.Embed(positive_sig[static_cast<std::size_t>(i)], nullptr);
    }
    return AsvPretrainLoss(anchors, positives, labels, asv.head_w().value,
                           Vec(asv.head_b().value.col(0)), asv.proto_scale(),
                           asv.proto_bias(), nullptr);
  };

  ZeroGrads(asv.Params());
  {
    Mat anchors(10, n_speakers), positives(10, n_speakers);
    std::vector<AsvCache> a_caches(static_cast<std::size_t>(n_speakers));
    std::vector<AsvCache> p_caches(static_cast<std::size_t>(n_speakers));
    for (int i = 0; i < n_speakers; ++i) {
      anchors.col(i) = asv.Embed(anchor_sig[static_cast<std::size_t>(i)],
                                 &a_caches[static_cast<std::size_t>(i)]);
      positives.col(i) = asv.Embed(positive_sig[static_cast<std::size_t>(i)],
                                   &p_caches[static_cast<std::size_t>(i)]);
    }
    AsvPretrainGrads grads;
    AsvPretrainLoss(anchors, positives, labels, asv.head_w().value,
                    Vec(asv.head_b().value.col(0)), asv.proto_scale(),
                    asv.proto_bias(), &grads);
    asv.head_w().grad += grads.dhead_w;
    asv.head_b().grad.col(0) += grads.dhead_b;
    asv.proto_scale_tensor().grad(0, 0) += grads.dproto_scale;
    asv.proto_bias_tensor().grad(0, 0) += grads.dproto_bias;
    for (int i = 0; i < n_speakers; ++i) {
      asv.EmbedBackward(a_caches[static_cast<std::size_t>(i)],
                        Vec(grads.danchors.col(i)));
      asv.EmbedBackward(p_caches[static_cast<std::size_t>(i)],
                        Vec(grads.dpositives.col(i)));
    }
  }

  // Sampled coordinates across every tensor.
  Rng pick(99);
  for (Tensor* t : asv.Params()) {
    const Mat analytic = t->grad;
    const int samples =
        std::min<int>(6, static_cast<int>(t->value.size()));
    for (int s = 0; s < samples; ++s) {
      const auto idx = static_cast<Eigen::Index>(
          pick.Below(static_cast<std::uint64_t>(t->value.size())));
      const Eigen::Index i = idx % t->value.rows();
      const Eigen::Index j = idx / t->value.rows();
      const double fd = NumericGrad(loss_fn, &t->value(i, j));
      CAPTURE(t->name);
      CHECK(RelError(analytic(i, j), fd) < kGradTol);
    }
  }
}

TEST_CASE("cm: gradient through encoder and both heads (sampled)") {
  CmModel cm(TinyCm(), Rng(22));
  Rng rng(8);
  std::vector<Vec> signals;
  for (int i = 0; i < 3; ++i) signals.push_back(RandomSignal(160, &rng));
  const std::vector<int> labels = {0, 1, 0};
  Vec weights(2);
  weights << 4.0, 1.0;
  Vec probe(10);
  for (int i = 0; i < 10; ++i) probe[i] = rng.Normal();

  // Combined objective touching the logit head, the embedding head, and the
  // shared encoder: weighted CE plus a linear probe of one embedding.
  auto loss_fn = [&]() {
    Mat logits(2, 3);
    Vec first_embedding;
    for (int i = 0; i < 3; ++i) {
      CmOutput out = cm.Forward(signals[static_cast<std::size_t>(i)], nullptr);
      logits.col(i) = out.logits;
      if (i == 0) first_embedding = out.embedding;
    }
    return CmPretrainLoss(logits, labels, weights, nullptr) +
           probe.dot(first_embedding);
  };

  ZeroGrads(cm.Params());
  {
    Mat logits(2, 3);
    std::vector<CmCache> caches(3);
    for (int i = 0; i < 3; ++i) {
      CmOutput out = cm.Forward(signals[static_cast<std::size_t>(i)],
                                &caches[static_cast<std::size_t>(i)]);
      logits.col(i) = out.logits;
    }
    Mat dlogits;
    CmPretrainLoss(logits, labels, weights, &dlogits);
    cm.Backward(caches[0], probe, Vec(dlogits.col(0)));
    for (int i = 1; i < 3; ++i) {
      cm.Backward(caches[static_cast<std::size_t>(i)], Vec(),
                  Vec(dlogits.col(i)));
    }
  }

  Rng pick(98);
  for (Tensor* t : cm.Params()) {
    const Mat analytic = t->grad;
    const int samples = std::min<int>(6, static_cast<int>(t->value.size()));
    for (int s = 0; s < samples; ++s) {
      const auto idx = static_cast<Eigen::Index>(
          pick.Below(static_cast<std::uint64_t>(t->value.size())));
      const Eigen::Index i = idx % t->value.rows();
      const Eigen::Index j = idx / t->value.rows();
      const double fd = NumericGrad(loss_fn, &t->value(i, j));
      CAPTURE(t->name);
      CHECK(RelError(analytic(i, j), fd) < kGradTol);
    }
  }
}

TEST_CASE("joint path: signal -> encoders -> backend -> loss gradient") {
  AsvConfig asv_cfg = TinyAsv();
  CmConfig cm_cfg = TinyCm();
  BackendConfig be_cfg;
  be_cfg.channels = {5, 4, 3};
  be_cfg.pool_len = 4;
  be_cfg.hidden_dim = 6;
  be_cfg.final_dim = 5;

  AsvModel asv(asv_cfg, Rng(31));
  CmModel cm(cm_cfg, Rng(32));
  BackendModel backend(be_cfg, Rng(33));
  Rng rng(9);
  const Vec enrol_sig = RandomSignal(160, &rng);
  const Vec test_sig = RandomSignal(160, &rng);
  const bool is_target = true;

  auto loss_fn = [&]() {
    EmbeddingTriple triple;
    triple.asv_enrol = asv.Embed(enrol_sig, nullptr);
    triple.asv_test = asv.Embed(test_sig, nullptr);
    triple.cm_test = cm.Forward(test_sig, nullptr).embedding;
    const double s = backend.Score(StackEmbeddings(triple), nullptr);
    return backend.Loss(s, is_target, nullptr);
  };

  TensorRefs all = backend.Params();
  {
    TensorRefs a = asv.Params(), c = cm.Params();
    all.insert(all.end(), a.begin(), a.end());
    all.insert(all.end(), c.begin(), c.end());
  }
  ZeroGrads(all);
  {
    AsvCache enrol_cache, test_cache;
    CmCache cm_cache;
    EmbeddingTriple triple;
    triple.asv_enrol = asv.Embed(enrol_sig, &enrol_cache);
    triple.asv_test = asv.Embed(test_sig, &test_cache);
    triple.cm_test = cm.Forward(test_sig, &cm_cache).embedding;
    BackendCache be_cache;
    const double s = backend.Score(StackEmbeddings(triple), &be_cache);
    double dscore = 0.0;
    backend.Loss(s, is_target, &dscore);
    const Mat dstacked = backend.ScoreBackward(be_cache, dscore);
    asv.EmbedBackward(enrol_cache, Vec(dstacked.row(0)));
    asv.EmbedBackward(test_cache, Vec(dstacked.row(1)));
    cm.Backward(cm_cache, Vec(dstacked.row(2)), Vec());
  }

  Rng pick(97);
  for (Tensor* t : all) {
    // the ASV pre-training head gets no gradient from this path
    if (t->name.rfind("head.", 0) == 0 || t->name.rfind("proto.", 0) == 0 ||
        t->name.rfind("logit.", 0) == 0) {
      CHECK(t->grad.cwiseAbs().maxCoeff() == 0.0);
      continue;
    }
    const Mat analytic = t->grad;
    const int samples = std::min<int>(4, static_cast<int>(t->value.size()));
    for (int s = 0; s < samples; ++s) {
      const auto idx = static_cast<Eigen::Index>(
          pick.Below(static_cast<std::uint64_t>(t->value.size())));
      const Eigen::Index i = idx % t->value.rows();
      const Eigen::Index j = idx / t->value.rows();
      const double fd = NumericGrad(loss_fn, &t->value(i, j));
      CAPTURE(t->name);
      CHECK(RelError(analytic(i, j), fd) < kGradTol);
    }
  }
}

TEST_CASE("bundle: save/load round-trip is float32-stable") {
  test::TempDir dir("bundle");
  ModelBundle bundle;
  bundle.asv = AsvModel(TinyAsv(), Rng(51));
  bundle.cm = CmModel(TinyCm(), Rng(52));
  bundle.backend = BackendModel(BackendConfig{}, Rng(53));
  // backend default config expects 32-dim embeddings; shrink it to match
  BackendConfig be_cfg;
  be_cfg.channels = {4, 4, 4};
  be_cfg.pool_len = 3;
  be_cfg.hidden_dim = 5;
  be_cfg.final_dim = 5;
  bundle.backend = BackendModel(be_cfg, Rng(53));

  const std::string dir1 = dir.str() + "/b1";
  SaveBundle(&bundle, dir1);
  ModelBundle loaded = LoadBundle(dir1);
  CHECK(loaded.asv.config().embed_dim == 10);
  CHECK(loaded.cm.config().hidden_dim == 12);
  CHECK(loaded.backend.config().pool_len == 3);

  // float32 quantisation is idempotent: a second save/load changes nothing
  const std::string dir2 = dir.str() + "/b2";
  SaveBundle(&loaded, dir2);
  CHECK(test::ReadFileBytes(dir1 + "/manifest.json") ==
        test::ReadFileBytes(dir2 + "/manifest.json"));
  ModelBundle again = LoadBundle(dir2);
  TensorRefs l = loaded.asv.Params(), a = again.asv.Params();
  for (std::size_t i = 0; i < l.size(); ++i) {
    CHECK(l[i]->value == a[i]->value);
  }
  CHECK(test::ReadFileBytes(dir1 + "/asv.ckpt") ==
        test::ReadFileBytes(dir2 + "/asv.ckpt"));

  CHECK_THROWS_AS(LoadBundle(dir.str() + "/missing"), DataError);
}

TEST_CASE("embedding dimension equality is enforced") {
  ModelBundle bundle;
  AsvConfig asv_cfg = TinyAsv();
  CmConfig cm_cfg = TinyCm();
  cm_cfg.embed_dim = 12;  // mismatch
  bundle.asv = AsvModel(asv_cfg, Rng(61));
  bundle.cm = CmModel(cm_cfg, Rng(62));
  bundle.backend = BackendModel(BackendConfig{}, Rng(63));
  CHECK_THROWS_AS(bundle.Validate(), ConfigError);
}
