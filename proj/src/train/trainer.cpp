// sasv/train/trainer.cpp

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

#include "sasv/train/trainer.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <thread>

namespace sasv::train {

namespace fs = std::filesystem;

std::string ToString(TrainingCondition condition) {
  switch (condition) {
    case TrainingCondition::kBaseOnly: return "base";
    case TrainingCondition::kBasePlusAux: return "base_aux";
    case TrainingCondition::kBasePlusAuxBonafide: return "base_aux_bf";
  }
  throw std::logic_error("unreachable condition");
}

std::string ToString(OptimisationMode mode) {
  return mode == OptimisationMode::kFixed ? "fixed" : "joint";
}

TrainingCondition ConditionFromString(const std::string& name) {
  if (name == "base") return TrainingCondition::kBaseOnly;
  if (name == "base_aux") return TrainingCondition::kBasePlusAux;
  if (name == "base_aux_bf") return TrainingCondition::kBasePlusAuxBonafide;
  throw ConfigError("unknown training condition '" + name +
                    "' (expected base | base_aux | base_aux_bf)");
}

OptimisationMode ModeFromString(const std::string& name) {
  if (name == "fixed") return OptimisationMode::kFixed;
  if (name == "joint") return OptimisationMode::kJoint;
  throw ConfigError("unknown optimisation mode '" + name +
                    "' (expected fixed | joint)");
}

const synth::Utterance& CorpusView::ById(const std::string& id) const {
  for (const synth::Corpus* corpus : parts_) {
    auto it = corpus->index_by_id.find(id);
    if (it != corpus->index_by_id.end()) {
      return corpus->utterances[static_cast<std::size_t>(it->second)];
    }
  }
  throw DataError("unknown utterance id: " + id);
}

protocol::TrialPool BuildPool(const synth::Corpus& base,
                              const synth::Corpus* aux,
                              TrainingCondition condition,
                              bool allow_aux_enrolment) {
  std::vector<protocol::PoolUtterance> utterances =
      synth::AsPoolUtterances(base, /*aux=*/false, /*bonafide_only=*/false);
  if (condition != TrainingCondition::kBaseOnly) {
    if (aux == nullptr) {
      throw ConfigError("condition " + ToString(condition) +
                        " requests auxiliary data, but none was provided");
    }
    const bool bonafide_only =
        condition == TrainingCondition::kBasePlusAuxBonafide;
    auto aux_utts = synth::AsPoolUtterances(*aux, /*aux=*/true, bonafide_only);
    utterances.insert(utterances.end(), aux_utts.begin(), aux_utts.end());
  }
  const bool aux_in_t12_only =
      condition == TrainingCondition::kBasePlusAuxBonafide;
  return protocol::TrialPool(std::move(utterances), aux_in_t12_only,
                             allow_aux_enrolment);
}

// ---------------------------------------------------------------------------
// Pre-training

model::AsvModel PretrainAsv(const synth::Corpus& corpus,
                            const model::AsvConfig& model_cfg,
                            const PretrainConfig& cfg) {
  cfg.Validate();
  // Bona fide utterances per speaker; pre-training ignores spoofed data.
  std::vector<std::vector<int>> by_speaker;
  for (std::size_t s = 0; s < corpus.bonafide_by_speaker.size(); ++s) {
    if (!corpus.bonafide_by_speaker[s].empty()) {
      by_speaker.push_back(corpus.bonafide_by_speaker[s]);
    }
  }
  const int n_speakers = static_cast<int>(by_speaker.size());
  if (n_speakers < 2) {
    throw ConfigError("asv pre-training: corpus too small (need >= 2 "
                      "speakers with bona fide data)");
  }
  for (const auto& utts : by_speaker) {
    if (utts.size() < 2) {
      throw ConfigError("asv pre-training: corpus too small (every speaker "
                        "needs >= 2 bona fide utterances)");
    }
  }

  model::AsvConfig asv_cfg = model_cfg;
  asv_cfg.n_speakers = n_speakers;
  Rng rng(cfg.seed);
  model::AsvModel asv(asv_cfg, rng.Derive("init"));
  if (cfg.epochs == 0) return asv;

  const int speakers_per_batch = std::min(cfg.speakers_per_batch, n_speakers);
  int total_bonafide = 0;
  for (const auto& utts : by_speaker) {
    total_bonafide += static_cast<int>(utts.size());
  }
  const int steps_per_epoch =
      std::max(1, total_bonafide / (2 * speakers_per_batch));

  nn::Adam adam(nn::AdamConfig{cfg.learning_rate, 0.9, 0.999, 1e-8},
                asv.Params());
  Rng sample_rng = rng.Derive("sampling");
  std::vector<int> speaker_order(static_cast<std::size_t>(n_speakers));
  for (int s = 0; s < n_speakers; ++s) {
    speaker_order[static_cast<std::size_t>(s)] = s;
  }

  const int d = asv_cfg.embed_dim;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (int step = 0; step < steps_per_epoch; ++step) {
      sample_rng.Shuffle(&speaker_order);
      Mat anchors(d, speakers_per_batch), positives(d, speakers_per_batch);
      std::vector<model::AsvCache> anchor_caches(
          static_cast<std::size_t>(speakers_per_batch));
      std::vector<model::AsvCache> positive_caches(
          static_cast<std::size_t>(speakers_per_batch));
      std::vector<int> labels(static_cast<std::size_t>(speakers_per_batch));
      for (int i = 0; i < speakers_per_batch; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const int spk = speaker_order[ui];
        const auto& utts = by_speaker[static_cast<std::size_t>(spk)];
        const auto a = sample_rng.Below(utts.size());
        auto b = sample_rng.Below(utts.size() - 1);
        if (b >= a) ++b;  // distinct pair
        anchors.col(i) = asv.Embed(
            corpus.utterances[static_cast<std::size_t>(utts[a])].signal,
            &anchor_caches[ui]);
        positives.col(i) = asv.Embed(
            corpus.utterances[static_cast<std::size_t>(utts[b])].signal,
            &positive_caches[ui]);
        labels[ui] = spk;
      }
      ZeroGrads(asv.Params());
      model::AsvPretrainGrads grads;
      model::AsvPretrainLoss(anchors, positives, labels, asv.head_w().value,
                             Vec(asv.head_b().value.col(0)), asv.proto_scale(),
                             asv.proto_bias(), &grads);
      asv.head_w().grad += grads.dhead_w;
      asv.head_b().grad.col(0) += grads.dhead_b;
      asv.proto_scale_tensor().grad(0, 0) += grads.dproto_scale;
      asv.proto_bias_tensor().grad(0, 0) += grads.dproto_bias;
      for (int i = 0; i < speakers_per_batch; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        asv.EmbedBackward(anchor_caches[ui], Vec(grads.danchors.col(i)));
        asv.EmbedBackward(positive_caches[ui], Vec(grads.dpositives.col(i)));
      }
      adam.Step();
      asv.PostUpdate();
    }
  }
  return asv;
}

model::CmModel PretrainCm(const synth::Corpus& corpus,
                          const model::CmConfig& model_cfg,
                          const PretrainConfig& cfg,
                          std::optional<Vec> class_weights) {
  cfg.Validate();
  int n_bona = 0, n_spoof = 0;
  for (const synth::Utterance& u : corpus.utterances) {
    (u.is_spoofed ? n_spoof : n_bona) += 1;
  }
  if (n_spoof == 0 || n_bona == 0) {
    throw ConfigError("cm pre-training: corpus must contain both bona fide "
                      "and spoofed data");
  }

  Rng rng(cfg.seed);
  model::CmModel cm(model_cfg, rng.Derive("init"));
  if (cfg.epochs == 0) return cm;

  Vec weights(2);
  if (class_weights) {
    weights = *class_weights;
  } else {
    // Inverse class frequency, normalised so balanced classes give 1.
    const double total = n_bona + n_spoof;
    weights[model::kBonafideClass] = total / (2.0 * n_bona);
    weights[model::kSpoofClass] = total / (2.0 * n_spoof);
  }

  TensorRefs params = cm.Params();
  if (!cfg.train_embed_projection) {
    TensorRefs filtered;
    for (Tensor* t : params) {
      if (t->name.rfind("embed.", 0) != 0) filtered.push_back(t);
    }
    params = filtered;
  }
  nn::Adam adam(nn::AdamConfig{cfg.learning_rate, 0.9, 0.999, 1e-8}, params);
  Rng sample_rng = rng.Derive("sampling");

  std::vector<int> order(corpus.utterances.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = static_cast<int>(i);
  }
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    sample_rng.Shuffle(&order);
    const int n_batches = static_cast<int>(order.size()) / cfg.batch_size;
    for (int b = 0; b < n_batches; ++b) {
      const int batch = cfg.batch_size;
      Mat logits(2, batch);
      std::vector<model::CmCache> caches(static_cast<std::size_t>(batch));
      std::vector<int> labels(static_cast<std::size_t>(batch));
      for (int i = 0; i < batch; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const synth::Utterance& u = corpus.utterances[static_cast<std::size_t>(
            order[static_cast<std::size_t>(b * batch + i)])];
        model::CmOutput out = cm.Forward(u.signal, &caches[ui]);
        logits.col(i) = out.logits;
        labels[ui] = u.is_spoofed ? model::kSpoofClass : model::kBonafideClass;
      }
      ZeroGrads(cm.Params());
      Mat dlogits;
      model::CmPretrainLoss(logits, labels, weights, &dlogits);
      for (int i = 0; i < batch; ++i) {
        cm.Backward(caches[static_cast<std::size_t>(i)], Vec(),
                    Vec(dlogits.col(i)));
      }
      adam.Step();
      cm.PostUpdate();
    }
  }
  return cm;
}

// ---------------------------------------------------------------------------
// SASV training

int SelectModel(const std::vector<eval::EvalReport>& dev_reports) {
  if (dev_reports.empty()) {
    throw DataError("model selection: no dev reports");
  }
  int best = 0;
  for (int i = 1; i < static_cast<int>(dev_reports.size()); ++i) {
    if (dev_reports[static_cast<std::size_t>(i)].full.sasv_eer <
        dev_reports[static_cast<std::size_t>(best)].full.sasv_eer) {
      best = i;
    }
  }
  return best + 1;
}

namespace {

struct EpochSnapshot {
  std::vector<Mat> asv, cm, backend;
};

std::vector<Mat> SnapshotValues(const TensorRefs& refs) {
  std::vector<Mat> values;
  values.reserve(refs.size());
  for (const Tensor* t : refs) values.push_back(t->value);
  return values;
}

void RestoreValues(const std::vector<Mat>& values, const TensorRefs& refs) {
  if (values.size() != refs.size()) {
    throw std::logic_error("snapshot size mismatch");
  }
  for (std::size_t i = 0; i < refs.size(); ++i) {
    refs[i]->value = values[i];
  }
}

}  // namespace

SasvTrainResult TrainSasv(const model::AsvModel& pretrained_asv,
                          const model::CmModel& pretrained_cm,
                          const model::BackendConfig& backend_cfg,
                          OptimisationMode mode, TrainingCondition condition,
                          const TrainConfig& cfg, std::uint64_t seed,
                          const SasvTrainInputs& inputs,
                          const std::string& run_dir) {
  cfg.Validate();
  if (inputs.base == nullptr || inputs.dev == nullptr) {
    throw ConfigError("sasv training: base and dev corpora are required");
  }
  if (pretrained_asv.config().embed_dim != pretrained_cm.config().embed_dim) {
    throw ConfigError("sasv training: asv/cm embedding dimensions differ");
  }

  const bool joint = mode == OptimisationMode::kJoint;
  Rng rng(seed);

  model::ModelBundle bundle;
  bundle.asv = pretrained_asv;
  bundle.cm = pretrained_cm;
  bundle.backend = model::BackendModel(backend_cfg, rng.Derive("backend_init"));
  bundle.Validate();

  protocol::TrialPool pool =
      BuildPool(*inputs.base, inputs.aux, condition, inputs.allow_aux_enrolment);
  const protocol::ProportionProfile profile =
      joint ? protocol::JointProfile() : protocol::FixedProfile();

  CorpusView view;
  view.Add(inputs.base);
  if (inputs.aux != nullptr) view.Add(inputs.aux);

  TensorRefs trainable = bundle.backend.Params();
  if (joint) {
    TensorRefs asv_params = bundle.asv.Params();
    TensorRefs cm_params = bundle.cm.Params();
    trainable.insert(trainable.end(), asv_params.begin(), asv_params.end());
    trainable.insert(trainable.end(), cm_params.begin(), cm_params.end());
  }
  nn::Adam adam(cfg.AdamSettings(), trainable);

  // Frozen sub-systems make train and dev embeddings reusable across the
  // whole run; joint mode refreshes dev embeddings every epoch.
  eval::EmbeddingCache train_cache;
  eval::EmbeddingCache dev_cache;
  Rng sample_rng = rng.Derive("sampling");

  auto cached_fixed_embedding = [&](const std::string& id, bool want_cm)
      -> std::pair<const Vec*, const Vec*> {
    auto it = train_cache.asv.find(id);
    if (it == train_cache.asv.end()) {
      const synth::Utterance& utt = view.ById(id);
      it = train_cache.asv.emplace(id, bundle.asv.Embed(utt.signal, nullptr))
               .first;
    }
    const Vec* cm_embed = nullptr;
    if (want_cm) {
      auto cit = train_cache.cm_embed.find(id);
      if (cit == train_cache.cm_embed.end()) {
        const synth::Utterance& utt = view.ById(id);
        model::CmOutput out = bundle.cm.Forward(utt.signal, nullptr);
        cit = train_cache.cm_embed.emplace(id, std::move(out.embedding)).first;
      }
      cm_embed = &cit->second;
    }
    return {&it->second, cm_embed};
  };

  SasvTrainResult result;
  std::vector<EpochSnapshot> snapshots;
  snapshots.reserve(static_cast<std::size_t>(cfg.epochs));

  const bool persist = !run_dir.empty();
  if (persist) fs::create_directories(fs::path(run_dir) / "epochs");

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    for (int step = 0; step < cfg.batches_per_epoch; ++step) {
      const auto batch =
          protocol::SampleBatch(pool, profile, cfg.batch_size, &sample_rng);
      ZeroGrads(trainable);
      for (const protocol::TrialPair& trial : batch) {
        const bool is_target = trial.type == protocol::TrialType::kT1;
        Real score = 0.0;
        model::BackendCache backend_cache;
        model::AsvCache enrol_cache, test_cache;
        model::CmCache cm_cache;
        if (joint) {
          const synth::Utterance& enrol = view.ById(trial.enrol_id);
          const synth::Utterance& test = view.ById(trial.test_id);
          model::EmbeddingTriple triple;
          triple.asv_enrol = bundle.asv.Embed(enrol.signal, &enrol_cache);
          triple.asv_test = bundle.asv.Embed(test.signal, &test_cache);
          model::CmOutput out = bundle.cm.Forward(test.signal, &cm_cache);
          triple.cm_test = out.embedding;
          score = bundle.backend.Score(model::StackEmbeddings(triple),
                                       &backend_cache);
          Real dscore = 0.0;
          loss_sum += bundle.backend.Loss(score, is_target, &dscore);
          dscore /= cfg.batch_size;
          Mat dstacked = bundle.backend.ScoreBackward(backend_cache, dscore);
          bundle.asv.EmbedBackward(enrol_cache, Vec(dstacked.row(0)));
          bundle.asv.EmbedBackward(test_cache, Vec(dstacked.row(1)));
          bundle.cm.Backward(cm_cache, Vec(dstacked.row(2)), Vec());
        } else {
          auto [enrol_asv, unused] =
              cached_fixed_embedding(trial.enrol_id, false);
          auto [test_asv, test_cm] =
              cached_fixed_embedding(trial.test_id, true);
          (void)unused;
          model::EmbeddingTriple triple{*enrol_asv, *test_asv, *test_cm};
          score = bundle.backend.Score(model::StackEmbeddings(triple),
                                       &backend_cache);
          Real dscore = 0.0;
          loss_sum += bundle.backend.Loss(score, is_target, &dscore);
          dscore /= cfg.batch_size;
          bundle.backend.ScoreBackward(backend_cache, dscore);
        }
      }
      adam.Step();
      bundle.backend.PostUpdate();
      if (joint) {
        bundle.asv.PostUpdate();
        bundle.cm.PostUpdate();
      }
    }
    result.train_losses.push_back(loss_sum /
                                  (cfg.batches_per_epoch * cfg.batch_size));

    // Dev evaluation for model selection.
    if (joint) dev_cache.Clear();
    const auto dev_records =
        eval::ScoreTrials(bundle.asv, bundle.cm, bundle.backend,
                          inputs.dev_trials, *inputs.dev, &dev_cache);
    result.dev_reports.push_back(eval::Evaluate(dev_records));

    EpochSnapshot snap;
    snap.backend = SnapshotValues(bundle.backend.Params());
    if (joint) {
      snap.asv = SnapshotValues(bundle.asv.Params());
      snap.cm = SnapshotValues(bundle.cm.Params());
    }
    snapshots.push_back(std::move(snap));

    if (persist) {
      char name[16];
      std::snprintf(name, sizeof(name), "ep%03d", epoch);
      const fs::path dir = fs::path(run_dir) / "epochs" / name;
      fs::create_directories(dir);
      SaveTensors(AsConst(bundle.backend.Params()),
                  (dir / "backend.ckpt").string());
      if (joint) {
        SaveTensors(AsConst(bundle.asv.Params()), (dir / "asv.ckpt").string());
        SaveTensors(AsConst(bundle.cm.Params()), (dir / "cm.ckpt").string());
      }
    }
  }

  if (cfg.epochs == 0) {
    // Degenerate run: keep the freshly initialised backend and the
    // pretrained sub-systems; no selection possible.
    result.selected_epoch = 0;
    result.bundle = std::move(bundle);
    if (persist) {
      model::SaveBundle(&result.bundle,
                        (fs::path(run_dir) / "final").string());
    }
    return result;
  }

  result.selected_epoch = SelectModel(result.dev_reports);
  const EpochSnapshot& chosen =
      snapshots[static_cast<std::size_t>(result.selected_epoch - 1)];
  RestoreValues(chosen.backend, bundle.backend.Params());
  if (joint) {
    RestoreValues(chosen.asv, bundle.asv.Params());
    RestoreValues(chosen.cm, bundle.cm.Params());
  }
  result.bundle = std::move(bundle);
  if (persist) {
    model::SaveBundle(&result.bundle, (fs::path(run_dir) / "final").string());
  }
  return result;
}

// ---------------------------------------------------------------------------
// Seed-averaged experiments

std::vector<protocol::TrialPair> MakeAssessmentProtocol(
    const synth::Corpus& corpus, int trials_per_type, std::uint64_t seed) {
  if (trials_per_type < 1) {
    throw ConfigError("protocol: trials_per_type must be >= 1");
  }
  protocol::TrialPool pool(
      synth::AsPoolUtterances(corpus, false, false), false);
  protocol::ProportionProfile profile{{1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0}};
  Rng rng(seed);
  return protocol::SampleBatch(pool, profile, 3 * trials_per_type, &rng);
}

eval::EvalReport RunExperiment(const model::AsvModel& pretrained_asv,
                               const model::CmModel& pretrained_cm,
                               OptimisationMode mode,
                               TrainingCondition condition,
                               const ExperimentInputs& inputs) {
  if (inputs.eval == nullptr) {
    throw ConfigError("experiment: eval corpus is required");
  }
  if (inputs.seeds.empty()) {
    throw ConfigError("experiment: seed list must not be empty");
  }
  const std::string experiment = ExperimentName(mode, condition);
  const fs::path exp_dir = fs::path(inputs.runs_dir) / experiment;
  fs::create_directories(exp_dir);

  std::vector<std::uint64_t> seeds = inputs.seeds;
  std::sort(seeds.begin(), seeds.end());

  std::vector<eval::EvalReport> reports(seeds.size());
  std::vector<std::exception_ptr> failures(seeds.size());
  std::atomic<std::size_t> next{0};

  auto run_seed = [&](std::size_t idx) {
    const std::uint64_t seed = seeds[idx];
    const fs::path run_dir = exp_dir / std::to_string(seed);
    fs::create_directories(run_dir);
    inputs.config_snapshot.WriteFile((run_dir / "config.cfg").string());

    SasvTrainResult trained = TrainSasv(
        pretrained_asv, pretrained_cm, inputs.backend_cfg, mode, condition,
        inputs.train_cfg, seed, inputs.data, run_dir.string());

    ConfigMap dev_map;
    dev_map.SetInt("selected_epoch", trained.selected_epoch);
    for (std::size_t e = 0; e < trained.dev_reports.size(); ++e) {
      char name[16];
      std::snprintf(name, sizeof(name), "ep%03zu", e + 1);
      eval::ReportToConfig(trained.dev_reports[e], name, &dev_map);
      dev_map.SetReal(std::string(name) + ".train_loss",
                      trained.train_losses[e]);
    }
    dev_map.WriteFile((run_dir / "dev_reports.cfg").string());

    // Score the evaluation protocol with the persisted bundle so a later
    // `evaluate` invocation reproduces the same bytes.
    model::ModelBundle final_bundle =
        model::LoadBundle((run_dir / "final").string());
    const auto records = eval::ScoreTrials(final_bundle, inputs.eval_trials,
                                           *inputs.eval, nullptr);
    eval::WriteScores(records, (run_dir / "eval_scores.txt").string());
    reports[idx] = eval::Evaluate(records);
    ConfigMap report_map;
    eval::ReportToConfig(reports[idx], "eval", &report_map);
    report_map.WriteFile((run_dir / "report.cfg").string());
  };

  const int workers =
      std::max(1, std::min<int>(inputs.workers,
                                static_cast<int>(seeds.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      try {
        run_seed(i);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      threads.emplace_back([&]() {
        while (true) {
          const std::size_t idx = next.fetch_add(1);
          if (idx >= seeds.size()) return;
          try {
            run_seed(idx);
          } catch (...) {
            failures[idx] = std::current_exception();
          }
        }
      });
    }
    for (std::thread& t : threads) t.join();
  }
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (failures[i]) std::rethrow_exception(failures[i]);
  }

  const eval::EvalReport averaged = eval::AverageReports(reports);
  const fs::path summary_dir = exp_dir / "summary";
  fs::create_directories(summary_dir);
  ConfigMap summary;
  eval::ReportToConfig(averaged, ToString(mode) + "." + ToString(condition),
                       &summary);
  {
    std::string seed_list;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      if (i > 0) seed_list += ",";
      seed_list += std::to_string(seeds[i]);
    }
    summary.Set("seeds", seed_list);
  }
  summary.WriteFile((summary_dir / "report.cfg").string());
  return averaged;
}

}  // namespace sasv::train
