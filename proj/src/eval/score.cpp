// sasv/eval/score.cpp

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

#include "sasv/eval/score.hpp"

namespace sasv::eval {

const Vec& CachedAsvEmbedding(const model::AsvModel& asv,
                              const synth::Corpus& corpus,
                              const std::string& utt_id,
                              EmbeddingCache* cache) {
  auto it = cache->asv.find(utt_id);
  if (it == cache->asv.end()) {
    const synth::Utterance& utt = corpus.ById(utt_id);
    it = cache->asv.emplace(utt_id, asv.Embed(utt.signal, nullptr)).first;
  }
  return it->second;
}

void EnsureCmOutputs(const model::CmModel& cm, const synth::Corpus& corpus,
                     const std::string& utt_id, EmbeddingCache* cache) {
  if (cache->cm_embed.count(utt_id) > 0) return;
  const synth::Utterance& utt = corpus.ById(utt_id);
  model::CmOutput out = cm.Forward(utt.signal, nullptr);
  cache->cm_embed.emplace(utt_id, std::move(out.embedding));
  cache->cm_score.emplace(utt_id, out.logits[model::kBonafideClass]);
}

std::vector<ScoreRecord> ScoreTrials(
    const model::AsvModel& asv, const model::CmModel& cm,
    const model::BackendModel& backend,
    const std::vector<protocol::TrialPair>& trials,
    const synth::Corpus& corpus, EmbeddingCache* cache) {
  EmbeddingCache local;
  EmbeddingCache* c = cache != nullptr ? cache : &local;
  std::vector<ScoreRecord> records;
  records.reserve(trials.size());
  for (const protocol::TrialPair& trial : trials) {
    const Vec& enrol = CachedAsvEmbedding(asv, corpus, trial.enrol_id, c);
    const Vec& test = CachedAsvEmbedding(asv, corpus, trial.test_id, c);
    EnsureCmOutputs(cm, corpus, trial.test_id, c);
    model::EmbeddingTriple triple{enrol, test, c->cm_embed.at(trial.test_id)};
    ScoreRecord r;
    r.trial = trial;
    r.full_score = backend.Score(model::StackEmbeddings(triple), nullptr);
    r.asv_score = nn::Cosine<Real>(enrol, test);
    r.cm_score = c->cm_score.at(trial.test_id);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<ScoreRecord> ScoreTrials(
    const model::ModelBundle& bundle,
    const std::vector<protocol::TrialPair>& trials,
    const synth::Corpus& corpus, EmbeddingCache* cache) {
  return ScoreTrials(bundle.asv, bundle.cm, bundle.backend, trials, corpus,
                     cache);
}

}  // namespace sasv::eval
