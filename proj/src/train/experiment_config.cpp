// sasv/train/experiment_config.cpp

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

#include "sasv/train/experiment_config.hpp"

#include <set>

namespace sasv::train {

namespace {

void ApplyEncoder(const ConfigMap& map, const std::string& prefix,
                  model::EncoderConfig* enc) {
  for (const auto& [key, member] :
       std::initializer_list<std::pair<const char*, std::array<int, 3>
                                                        model::EncoderConfig::*>>{
           {"channels", &model::EncoderConfig::channels},
           {"kernels", &model::EncoderConfig::kernels},
           {"strides", &model::EncoderConfig::strides}}) {
    const std::string full = prefix + key;
    if (!map.Has(full)) continue;
    const auto list = map.GetIntList(full);
    if (list.size() != 3) {
      throw ConfigError("config key " + full + ": expected 3 integers");
    }
    for (int i = 0; i < 3; ++i) {
      (enc->*member)[static_cast<std::size_t>(i)] =
          static_cast<int>(list[static_cast<std::size_t>(i)]);
    }
  }
  enc->pool_eps = map.GetReal(prefix + "pool_eps", enc->pool_eps);
}

void EmitEncoder(const model::EncoderConfig& enc, const std::string& prefix,
                 ConfigMap* map) {
  auto join = [](const std::array<int, 3>& v) {
    return std::to_string(v[0]) + "," + std::to_string(v[1]) + "," +
           std::to_string(v[2]);
  };
  map->Set(prefix + "channels", join(enc.channels));
  map->Set(prefix + "kernels", join(enc.kernels));
  map->Set(prefix + "strides", join(enc.strides));
  map->SetReal(prefix + "pool_eps", enc.pool_eps);
}

void ApplyCorpus(const ConfigMap& map, const std::string& prefix,
                 synth::CorpusSpec* spec) {
  spec->n_speakers =
      static_cast<int>(map.GetInt(prefix + "n_speakers", spec->n_speakers));
  spec->n_bonafide =
      static_cast<int>(map.GetInt(prefix + "n_bonafide", spec->n_bonafide));
  spec->n_spoofed =
      static_cast<int>(map.GetInt(prefix + "n_spoofed", spec->n_spoofed));
  spec->n_attacks =
      static_cast<int>(map.GetInt(prefix + "n_attacks", spec->n_attacks));
  spec->domain_shift = map.GetReal(prefix + "domain_shift", spec->domain_shift);
  spec->quality_lo = map.GetReal(prefix + "quality_lo", spec->quality_lo);
  spec->quality_hi = map.GetReal(prefix + "quality_hi", spec->quality_hi);
  spec->signal_length = static_cast<int>(
      map.GetInt(prefix + "signal_length", spec->signal_length));
  spec->seed = static_cast<std::uint64_t>(
      map.GetInt(prefix + "seed", static_cast<std::int64_t>(spec->seed)));
  if (map.Has(prefix + "attack_seed")) {
    spec->attack_seed =
        static_cast<std::uint64_t>(map.GetInt(prefix + "attack_seed"));
  }
}

void EmitCorpus(const synth::CorpusSpec& spec, const std::string& prefix,
                ConfigMap* map) {
  map->SetInt(prefix + "n_speakers", spec.n_speakers);
  map->SetInt(prefix + "n_bonafide", spec.n_bonafide);
  map->SetInt(prefix + "n_spoofed", spec.n_spoofed);
  map->SetInt(prefix + "n_attacks", spec.n_attacks);
  map->SetReal(prefix + "domain_shift", spec.domain_shift);
  map->SetReal(prefix + "quality_lo", spec.quality_lo);
  map->SetReal(prefix + "quality_hi", spec.quality_hi);
  map->SetInt(prefix + "signal_length", spec.signal_length);
  map->SetInt(prefix + "seed", static_cast<std::int64_t>(spec.seed));
  if (spec.attack_seed) {
    map->SetInt(prefix + "attack_seed",
                static_cast<std::int64_t>(*spec.attack_seed));
  }
}

}  // namespace

ExperimentConfig DefaultExperimentConfig() {
  ExperimentConfig c;

  c.corpus_pretrain_asv.name = "pretrain_asv";
  c.corpus_pretrain_asv.n_speakers = 50;
  c.corpus_pretrain_asv.n_bonafide = 2000;
  c.corpus_pretrain_asv.n_spoofed = 0;
  c.corpus_pretrain_asv.n_attacks = 0;
  c.corpus_pretrain_asv.seed = 7001;

  // Table-1-shaped training corpora at one tenth scale.
  c.corpus_base.name = "base";
  c.corpus_base.n_speakers = 20;
  c.corpus_base.n_bonafide = 258;
  c.corpus_base.n_spoofed = 2280;
  c.corpus_base.n_attacks = 6;
  c.corpus_base.seed = 7101;
  c.corpus_base.attack_seed = 8001;

  c.corpus_aux.name = "aux";
  c.corpus_aux.n_speakers = 40;
  c.corpus_aux.n_bonafide = 320;
  c.corpus_aux.n_spoofed = 2560;
  c.corpus_aux.n_attacks = 8;
  c.corpus_aux.domain_shift = 0.5;
  c.corpus_aux.seed = 7201;
  c.corpus_aux.attack_seed = 8002;

  // Dev shares the base attacks (seen); eval gets unseen attacks.
  c.corpus_dev.name = "dev";
  c.corpus_dev.n_speakers = 12;
  c.corpus_dev.n_bonafide = 160;
  c.corpus_dev.n_spoofed = 640;
  c.corpus_dev.n_attacks = 6;
  c.corpus_dev.seed = 7301;
  c.corpus_dev.attack_seed = 8001;

  c.corpus_eval.name = "eval";
  c.corpus_eval.n_speakers = 16;
  c.corpus_eval.n_bonafide = 200;
  c.corpus_eval.n_spoofed = 800;
  c.corpus_eval.n_attacks = 6;
  c.corpus_eval.seed = 7401;
  c.corpus_eval.attack_seed = 8003;

  c.pretrain_asv.epochs = 12;
  c.pretrain_asv.learning_rate = 1e-3;
  c.pretrain_asv.speakers_per_batch = 10;
  c.pretrain_asv.seed = 6001;

  c.pretrain_cm.epochs = 4;
  c.pretrain_cm.learning_rate = 1e-3;
  c.pretrain_cm.batch_size = 20;
  c.pretrain_cm.seed = 6002;

  return c;
}

void ExperimentConfig::Validate() const {
  signal.Validate();
  corpus_pretrain_asv.Validate();
  corpus_base.Validate();
  corpus_aux.Validate();
  corpus_dev.Validate();
  corpus_eval.Validate();
  asv.encoder.Validate();
  cm.Validate();
  backend.Validate();
  pretrain_asv.Validate();
  pretrain_cm.Validate();
  train.Validate();
  if (asv.embed_dim != cm.embed_dim) {
    throw ConfigError("config: asv.embed_dim must equal cm.embed_dim");
  }
  if (dev_trials_per_type < 1 || eval_trials_per_type < 1) {
    throw ConfigError("config: trials_per_type must be >= 1");
  }
  if (seeds.empty()) throw ConfigError("config: seed list must not be empty");
  std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
  if (unique.size() != seeds.size()) {
    throw ConfigError("config: seed list must be duplicate-free");
  }
  if (train.n_seeds != static_cast<int>(seeds.size())) {
    throw ConfigError("config: sasv.n_seeds (" +
                      std::to_string(train.n_seeds) +
                      ") must match the seed list length (" +
                      std::to_string(seeds.size()) + ")");
  }
  if (workers < 1) throw ConfigError("config: workers must be >= 1");
  if (out_dir.empty()) throw ConfigError("config: out dir must not be empty");
}

ExperimentConfig ExperimentConfigFromMap(const ConfigMap& map) {
  ExperimentConfig c = DefaultExperimentConfig();

  auto real = [&](const char* key, double* v) { *v = map.GetReal(key, *v); };
  auto integer = [&](const char* key, int* v) {
    *v = static_cast<int>(map.GetInt(key, *v));
  };

  real("signal.tone_amp_l1", &c.signal.tone_amp_l1);
  real("signal.amp_jitter", &c.signal.amp_jitter);
  real("signal.noise_sigma", &c.signal.noise_sigma);
  real("signal.artefact_amp0", &c.signal.artefact_amp0);
  real("signal.artefact_qslope", &c.signal.artefact_qslope);
  real("signal.latent_lo", &c.signal.latent_lo);
  real("signal.latent_hi", &c.signal.latent_hi);
  real("signal.min_latent_dist", &c.signal.min_latent_dist);
  real("signal.tilt_per_shift", &c.signal.tilt_per_shift);
  real("signal.tilt_max", &c.signal.tilt_max);
  real("signal.floor_sigma_per_shift", &c.signal.floor_sigma_per_shift);
  integer("signal.speaker_bin_start", &c.signal.speaker_bin_start);
  integer("signal.speaker_bin_step", &c.signal.speaker_bin_step);
  integer("signal.speaker_bin_count", &c.signal.speaker_bin_count);
  integer("signal.artefact_bin_start", &c.signal.artefact_bin_start);
  integer("signal.artefact_bin_step", &c.signal.artefact_bin_step);
  integer("signal.artefact_bin_count", &c.signal.artefact_bin_count);
  integer("signal.artefact_tones", &c.signal.artefact_tones);

  ApplyCorpus(map, "corpus.pretrain_asv.", &c.corpus_pretrain_asv);
  ApplyCorpus(map, "corpus.base.", &c.corpus_base);
  ApplyCorpus(map, "corpus.aux.", &c.corpus_aux);
  ApplyCorpus(map, "corpus.dev.", &c.corpus_dev);
  ApplyCorpus(map, "corpus.eval.", &c.corpus_eval);

  integer("protocol.dev.trials_per_type", &c.dev_trials_per_type);
  integer("protocol.eval.trials_per_type", &c.eval_trials_per_type);
  c.dev_protocol_seed = static_cast<std::uint64_t>(map.GetInt(
      "protocol.dev.seed", static_cast<std::int64_t>(c.dev_protocol_seed)));
  c.eval_protocol_seed = static_cast<std::uint64_t>(map.GetInt(
      "protocol.eval.seed", static_cast<std::int64_t>(c.eval_protocol_seed)));

  ApplyEncoder(map, "encoder.asv.", &c.asv.encoder);
  ApplyEncoder(map, "encoder.cm.", &c.cm.encoder);
  integer("asv.embed_dim", &c.asv.embed_dim);
  real("asv.proto_scale_init", &c.asv.proto_scale_init);
  real("asv.proto_scale_min", &c.asv.proto_scale_min);
  integer("cm.hidden_dim", &c.cm.hidden_dim);
  integer("cm.embed_dim", &c.cm.embed_dim);

  {
    const auto list = map.Has("backend.channels")
                          ? map.GetIntList("backend.channels")
                          : std::vector<std::int64_t>{};
    if (!list.empty()) {
      if (list.size() != 3) {
        throw ConfigError("config key backend.channels: expected 3 integers");
      }
      for (int i = 0; i < 3; ++i) {
        c.backend.channels[static_cast<std::size_t>(i)] =
            static_cast<int>(list[static_cast<std::size_t>(i)]);
      }
    }
  }
  integer("backend.kernel", &c.backend.kernel);
  integer("backend.pool_len", &c.backend.pool_len);
  integer("backend.hidden_dim", &c.backend.hidden_dim);
  integer("backend.final_dim", &c.backend.final_dim);
  real("backend.alpha", &c.backend.alpha);
  real("backend.m_pos", &c.backend.m_pos);
  real("backend.m_neg", &c.backend.m_neg);

  integer("pretrain.asv.epochs", &c.pretrain_asv.epochs);
  real("pretrain.asv.learning_rate", &c.pretrain_asv.learning_rate);
  integer("pretrain.asv.speakers_per_batch", &c.pretrain_asv.speakers_per_batch);
  c.pretrain_asv.seed = static_cast<std::uint64_t>(map.GetInt(
      "pretrain.asv.seed", static_cast<std::int64_t>(c.pretrain_asv.seed)));

  integer("pretrain.cm.epochs", &c.pretrain_cm.epochs);
  real("pretrain.cm.learning_rate", &c.pretrain_cm.learning_rate);
  integer("pretrain.cm.batch_size", &c.pretrain_cm.batch_size);
  c.pretrain_cm.seed = static_cast<std::uint64_t>(map.GetInt(
      "pretrain.cm.seed", static_cast<std::int64_t>(c.pretrain_cm.seed)));
  c.pretrain_cm.train_embed_projection =
      map.GetBool("pretrain.cm.train_embed_projection",
                  c.pretrain_cm.train_embed_projection);

  integer("sasv.epochs", &c.train.epochs);
  real("sasv.learning_rate", &c.train.learning_rate);
  integer("sasv.batch_size", &c.train.batch_size);
  integer("sasv.batches_per_epoch", &c.train.batches_per_epoch);
  real("sasv.adam_beta1", &c.train.adam_beta1);
  real("sasv.adam_beta2", &c.train.adam_beta2);
  real("sasv.adam_eps", &c.train.adam_eps);

  if (map.Has("seeds")) {
    c.seeds.clear();
    for (std::int64_t s : map.GetIntList("seeds")) {
      c.seeds.push_back(static_cast<std::uint64_t>(s));
    }
  }
  c.train.n_seeds = static_cast<int>(
      map.GetInt("sasv.n_seeds", static_cast<std::int64_t>(c.seeds.size())));

  c.out_dir = map.GetStr("out", c.out_dir);
  integer("workers", &c.workers);
  c.allow_aux_enrolment =
      map.GetBool("sampling.allow_aux_enrolment", c.allow_aux_enrolment);

  const auto known = ExperimentConfigToMap(c);
  std::vector<std::string> known_keys;
  known_keys.reserve(known.values().size());
  for (const auto& [key, value] : known.values()) known_keys.push_back(key);
  const auto unknown = map.UnknownKeys(known_keys);
  if (!unknown.empty()) {
    throw ConfigError("unknown config key: " + unknown.front());
  }

  c.Validate();
  return c;
}

ConfigMap ExperimentConfigToMap(const ExperimentConfig& c) {
  ConfigMap map;

  map.SetInt("signal.speaker_bin_start", c.signal.speaker_bin_start);
  map.SetInt("signal.speaker_bin_step", c.signal.speaker_bin_step);
  map.SetInt("signal.speaker_bin_count", c.signal.speaker_bin_count);
  map.SetInt("signal.artefact_bin_start", c.signal.artefact_bin_start);
  map.SetInt("signal.artefact_bin_step", c.signal.artefact_bin_step);
  map.SetInt("signal.artefact_bin_count", c.signal.artefact_bin_count);
  map.SetInt("signal.artefact_tones", c.signal.artefact_tones);
  map.SetReal("signal.tone_amp_l1", c.signal.tone_amp_l1);
  map.SetReal("signal.amp_jitter", c.signal.amp_jitter);
  map.SetReal("signal.noise_sigma", c.signal.noise_sigma);
  map.SetReal("signal.artefact_amp0", c.signal.artefact_amp0);
  map.SetReal("signal.artefact_qslope", c.signal.artefact_qslope);
  map.SetReal("signal.latent_lo", c.signal.latent_lo);
  map.SetReal("signal.latent_hi", c.signal.latent_hi);
  map.SetReal("signal.min_latent_dist", c.signal.min_latent_dist);
  map.SetReal("signal.tilt_per_shift", c.signal.tilt_per_shift);
  map.SetReal("signal.tilt_max", c.signal.tilt_max);
  map.SetReal("signal.floor_sigma_per_shift", c.signal.floor_sigma_per_shift);

  EmitCorpus(c.corpus_pretrain_asv, "corpus.pretrain_asv.", &map);
  EmitCorpus(c.corpus_base, "corpus.base.", &map);
  EmitCorpus(c.corpus_aux, "corpus.aux.", &map);
  EmitCorpus(c.corpus_dev, "corpus.dev.", &map);
  EmitCorpus(c.corpus_eval, "corpus.eval.", &map);

  map.SetInt("protocol.dev.trials_per_type", c.dev_trials_per_type);
  map.SetInt("protocol.dev.seed", static_cast<std::int64_t>(c.dev_protocol_seed));
  map.SetInt("protocol.eval.trials_per_type", c.eval_trials_per_type);
  map.SetInt("protocol.eval.seed",
             static_cast<std::int64_t>(c.eval_protocol_seed));

  EmitEncoder(c.asv.encoder, "encoder.asv.", &map);
  EmitEncoder(c.cm.encoder, "encoder.cm.", &map);
  map.SetInt("asv.embed_dim", c.asv.embed_dim);
  map.SetReal("asv.proto_scale_init", c.asv.proto_scale_init);
  map.SetReal("asv.proto_scale_min", c.asv.proto_scale_min);
  map.SetInt("cm.hidden_dim", c.cm.hidden_dim);
  map.SetInt("cm.embed_dim", c.cm.embed_dim);

  map.Set("backend.channels", std::to_string(c.backend.channels[0]) + "," +
                                  std::to_string(c.backend.channels[1]) + "," +
                                  std::to_string(c.backend.channels[2]));
  map.SetInt("backend.kernel", c.backend.kernel);
  map.SetInt("backend.pool_len", c.backend.pool_len);
  map.SetInt("backend.hidden_dim", c.backend.hidden_dim);
  map.SetInt("backend.final_dim", c.backend.final_dim);
  map.SetReal("backend.alpha", c.backend.alpha);
  map.SetReal("backend.m_pos", c.backend.m_pos);
  map.SetReal("backend.m_neg", c.backend.m_neg);

  map.SetInt("pretrain.asv.epochs", c.pretrain_asv.epochs);
  map.SetReal("pretrain.asv.learning_rate", c.pretrain_asv.learning_rate);
  map.SetInt("pretrain.asv.speakers_per_batch",
             c.pretrain_asv.speakers_per_batch);
  map.SetInt("pretrain.asv.seed",
             static_cast<std::int64_t>(c.pretrain_asv.seed));

  map.SetInt("pretrain.cm.epochs", c.pretrain_cm.epochs);
  map.SetReal("pretrain.cm.learning_rate", c.pretrain_cm.learning_rate);
  map.SetInt("pretrain.cm.batch_size", c.pretrain_cm.batch_size);
  map.SetInt("pretrain.cm.seed", static_cast<std::int64_t>(c.pretrain_cm.seed));
  map.Set("pretrain.cm.train_embed_projection",
          c.pretrain_cm.train_embed_projection ? "true" : "false");

  map.SetInt("sasv.epochs", c.train.epochs);
  map.SetReal("sasv.learning_rate", c.train.learning_rate);
  map.SetInt("sasv.batch_size", c.train.batch_size);
  map.SetInt("sasv.n_seeds", c.train.n_seeds);
  map.SetInt("sasv.batches_per_epoch", c.train.batches_per_epoch);
  map.SetReal("sasv.adam_beta1", c.train.adam_beta1);
  map.SetReal("sasv.adam_beta2", c.train.adam_beta2);
  map.SetReal("sasv.adam_eps", c.train.adam_eps);

  {
    std::string list;
    for (std::size_t i = 0; i < c.seeds.size(); ++i) {
      if (i > 0) list += ",";
      list += std::to_string(c.seeds[i]);
    }
    map.Set("seeds", list);
  }
  map.Set("out", c.out_dir);
  map.SetInt("workers", c.workers);
  map.Set("sampling.allow_aux_enrolment",
          c.allow_aux_enrolment ? "true" : "false");

  return map;
}

}  // namespace sasv::train
