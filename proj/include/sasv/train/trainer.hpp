// sasv/train/trainer.hpp

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

#include <optional>

#include "sasv/eval/score.hpp"
#include "sasv/model/bundle.hpp"
#include "sasv/protocol/sampler.hpp"
#include "sasv/synth/corpus.hpp"
#include "sasv/train/config.hpp"

namespace sasv::train {

// Utterance lookup across the corpora a condition admits.
class CorpusView {
 public:
  void Add(const synth::Corpus* corpus) { parts_.push_back(corpus); }
  const synth::Utterance& ById(const std::string& id) const;

 private:
  std::vector<const synth::Corpus*> parts_;
};

// Builds the sampling pool for a condition.  Auxiliary spoofed utterances
// enter only under BASE_PLUS_AUX; under BASE_PLUS_AUX_BONAFIDE the
// auxiliary bona fide utterances are restricted to type T1/T2 trials.
// `allow_aux_enrolment` additionally bars auxiliary utterances from the
// enrolment role when false.  Throws ConfigError when the condition needs
// an auxiliary corpus that was not provided.
protocol::TrialPool BuildPool(const synth::Corpus& base,
                              const synth::Corpus* aux,
                              TrainingCondition condition,
                              bool allow_aux_enrolment);

// ASV pre-training on a bona-fide corpus (speaker classification plus the
// angular-prototypical objective).  Needs >= 2 speakers with >= 2 bona fide
// utterances each.  Zero epochs returns the freshly initialised model.
model::AsvModel PretrainAsv(const synth::Corpus& corpus,
                            const model::AsvConfig& model_cfg,
                            const PretrainConfig& cfg);

// CM pre-training with weighted cross-entropy; class weights default to
// inverse class frequency, total/(2 * class count).  The corpus must
// contain both classes.
model::CmModel PretrainCm(const synth::Corpus& corpus,
                          const model::CmConfig& model_cfg,
                          const PretrainConfig& cfg,
                          std::optional<Vec> class_weights = std::nullopt);

struct SasvTrainInputs {
  const synth::Corpus* base = nullptr;
  const synth::Corpus* aux = nullptr;  // optional
  const synth::Corpus* dev = nullptr;
  std::vector<protocol::TrialPair> dev_trials;
  bool allow_aux_enrolment = true;
};

struct SasvTrainResult {
  model::ModelBundle bundle;  // parameters of the selected epoch
  std::vector<eval::EvalReport> dev_reports;
  std::vector<double> train_losses;  // per-epoch mean OC loss
  int selected_epoch = 1;            // 1-based
};

// One SASV training run.  FIXED freezes the sub-systems (their parameters
// are bit-identical afterwards) and trains the backend on cached
// embeddings; JOINT backpropagates through everything.  Model selection is
// the epoch with the lowest full-system dev SASV-EER, earlier epoch on
// ties.  When run_dir is non-empty, per-epoch checkpoints land in
// <run_dir>/epochs/ep<k>/ and the selected bundle in <run_dir>/final/.
SasvTrainResult TrainSasv(const model::AsvModel& pretrained_asv,
                          const model::CmModel& pretrained_cm,
                          const model::BackendConfig& backend_cfg,
                          OptimisationMode mode, TrainingCondition condition,
                          const TrainConfig& cfg, std::uint64_t seed,
                          const SasvTrainInputs& inputs,
                          const std::string& run_dir);

// Lowest dev SASV-EER of the full system; ties break toward the earlier
// epoch.  1-based, like the epoch directories.
int SelectModel(const std::vector<eval::EvalReport>& dev_reports);

struct ExperimentInputs {
  SasvTrainInputs data;
  const synth::Corpus* eval = nullptr;
  std::vector<protocol::TrialPair> eval_trials;
  model::BackendConfig backend_cfg;
  TrainConfig train_cfg;
  std::vector<std::uint64_t> seeds;
  int workers = 1;
  std::string runs_dir;          // parent of <experiment>/<seed>
  ConfigMap config_snapshot;     // copied into every run directory
};

// Runs one (mode, condition) experiment over all seeds (fanning out over
// worker threads), persists per-seed artifacts and the seed-averaged
// summary, and returns the averaged report.  A failing seed fails the
// experiment; artifacts of finished seeds stay on disk.
eval::EvalReport RunExperiment(const model::AsvModel& pretrained_asv,
                               const model::CmModel& pretrained_cm,
                               OptimisationMode mode,
                               TrainingCondition condition,
                               const ExperimentInputs& inputs);

// Deterministic protocol generation: one largest-remainder "batch" of
// 3 * trials_per_type trials with equal T1/T2/T3 shares and no T4.
std::vector<protocol::TrialPair> MakeAssessmentProtocol(
    const synth::Corpus& corpus, int trials_per_type, std::uint64_t seed);

}  // namespace sasv::train
