// sasv/eval/score.hpp

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

#include <map>

#include "sasv/eval/report.hpp"
#include "sasv/model/bundle.hpp"
#include "sasv/synth/corpus.hpp"

namespace sasv::eval {

// Embeddings and CM scores of the utterances one scoring pass touches.
// Valid only for the sub-system parameters it was filled with.
struct EmbeddingCache {
  std::map<std::string, Vec> asv;       // unit-norm ASV embeddings
  std::map<std::string, Vec> cm_embed;  // CM embeddings
  std::map<std::string, double> cm_score;  // bona fide logits

  void Clear() {
    asv.clear();
    cm_embed.clear();
    cm_score.clear();
  }
};

const Vec& CachedAsvEmbedding(const model::AsvModel& asv,
                              const synth::Corpus& corpus,
                              const std::string& utt_id,
                              EmbeddingCache* cache);
void EnsureCmOutputs(const model::CmModel& cm, const synth::Corpus& corpus,
                     const std::string& utt_id, EmbeddingCache* cache);

// Scores every trial in order.  The CM stream sees the test utterance only;
// the ASV stream is the cosine of the two unit-norm ASV embeddings; the full
// stream is the backend score of the stacked triple.  Unknown utterance ids
// raise DataError naming the id.  `cache` may be shared across calls with
// unchanged models; pass nullptr for a throwaway cache.
std::vector<ScoreRecord> ScoreTrials(
    const model::AsvModel& asv, const model::CmModel& cm,
    const model::BackendModel& backend,
    const std::vector<protocol::TrialPair>& trials,
    const synth::Corpus& corpus, EmbeddingCache* cache);

std::vector<ScoreRecord> ScoreTrials(
    const model::ModelBundle& bundle,
    const std::vector<protocol::TrialPair>& trials,
    const synth::Corpus& corpus, EmbeddingCache* cache);

}  // namespace sasv::eval
