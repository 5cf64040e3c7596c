// sasv/train/experiment_config.hpp

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

#include <string>
#include <vector>

#include "sasv/core/config.hpp"
#include "sasv/model/bundle.hpp"
#include "sasv/synth/corpus.hpp"
#include "sasv/train/config.hpp"

namespace sasv::train {

// Everything a full experiment needs, resolvable from a flat config file.
// Field defaults are the shipped desk-scale experiment; any key can be
// overridden.  ToConfigMap emits the fully resolved key set, and
// FromConfigMap(ToConfigMap(c)) == c.
struct ExperimentConfig {
  synth::SignalModel signal;

  synth::CorpusSpec corpus_pretrain_asv;  // bona-fide-only, ASV pre-training
  synth::CorpusSpec corpus_base;          // in-domain training corpus
  synth::CorpusSpec corpus_aux;           // domain-shifted auxiliary corpus
  synth::CorpusSpec corpus_dev;           // model selection
  synth::CorpusSpec corpus_eval;          // final assessment

  int dev_trials_per_type = 300;
  std::uint64_t dev_protocol_seed = 9001;
  int eval_trials_per_type = 600;
  std::uint64_t eval_protocol_seed = 9002;

  model::AsvConfig asv;       // n_speakers is filled in by pre-training
  model::CmConfig cm;
  model::BackendConfig backend;

  PretrainConfig pretrain_asv;
  PretrainConfig pretrain_cm;
  TrainConfig train;

  std::vector<std::uint64_t> seeds{101, 102, 103, 104, 105};
  std::string out_dir = "out";
  int workers = 4;
  bool allow_aux_enrolment = true;

  void Validate() const;
};

ExperimentConfig DefaultExperimentConfig();
ExperimentConfig ExperimentConfigFromMap(const ConfigMap& map);
ConfigMap ExperimentConfigToMap(const ExperimentConfig& config);

inline ExperimentConfig LoadExperimentConfig(const std::string& path) {
  return ExperimentConfigFromMap(ConfigMap::ParseFile(path));
}

}  // namespace sasv::train
