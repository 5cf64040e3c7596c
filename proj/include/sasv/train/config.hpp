// sasv/train/config.hpp

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

#include <cstdint>
#include <string>

#include "sasv/core/common.hpp"
#include "sasv/nn/adam.hpp"

namespace sasv::train {

// Which data the SASV stage trains on: the base corpus alone, base plus the
// full auxiliary corpus, or base plus only the auxiliary bona fide
// utterances (which then appear in type T1/T2 trials only).
enum class TrainingCondition { kBaseOnly, kBasePlusAux, kBasePlusAuxBonafide };

// Fixed: sub-systems frozen, backend-only updates, fixed trial proportions.
// Joint: everything updates end-to-end, joint trial proportions.
enum class OptimisationMode { kFixed, kJoint };

std::string ToString(TrainingCondition condition);  // base / base_aux / base_aux_bf
std::string ToString(OptimisationMode mode);        // fixed / joint
TrainingCondition ConditionFromString(const std::string& name);
OptimisationMode ModeFromString(const std::string& name);

inline std::string ExperimentName(OptimisationMode mode,
                                  TrainingCondition condition) {
  return ToString(mode) + "_" + ToString(condition);
}

// SASV-stage settings.  Epochs, learning rate, batch size and seed count
// default to the reference recipe (20 / 5e-5 / 20 / 5); everything is
// overridable from the experiment config.
struct TrainConfig {
  int epochs = 20;
  double learning_rate = 5e-5;
  int batch_size = 20;
  int n_seeds = 5;
  int batches_per_epoch = 30;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  nn::AdamConfig AdamSettings() const {
    return nn::AdamConfig{learning_rate, adam_beta1, adam_beta2, adam_eps};
  }
  void Validate() const {
    if (epochs < 0) throw ConfigError("train: epochs must be >= 0");
    if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
    if (batches_per_epoch < 1) {
      throw ConfigError("train: batches_per_epoch must be >= 1");
    }
    if (learning_rate <= 0) {
      throw ConfigError("train: learning_rate must be > 0");
    }
  }
};

// Sub-system pre-training gets its own block; the SASV-stage settings above
// are not reused for it.
struct PretrainConfig {
  int epochs = 10;
  double learning_rate = 1e-3;
  int speakers_per_batch = 10;  // ASV: anchor/positive pairs per batch
  int batch_size = 20;          // CM: utterances per batch
  std::uint64_t seed = 1;
  // When false the CM embedding projection is left out of the optimiser
  // during pre-training.  The pre-training objective gives it zero gradient
  // either way; the switch only changes which tensors carry optimiser state.
  bool train_embed_projection = true;

  void Validate() const {
    if (epochs < 0) throw ConfigError("pretrain: epochs must be >= 0");
    if (speakers_per_batch < 2) {
      throw ConfigError("pretrain: speakers_per_batch must be >= 2");
    }
    if (batch_size < 2) throw ConfigError("pretrain: batch_size must be >= 2");
    if (learning_rate <= 0) {
      throw ConfigError("pretrain: learning_rate must be > 0");
    }
  }
};

}  // namespace sasv::train
