// sasv/protocol/sampler.hpp

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

#include "sasv/core/rng.hpp"
#include "sasv/protocol/trial.hpp"

namespace sasv::protocol {

// One utterance as the sampler sees it.  `aux` marks utterances from the
// auxiliary (speaker-augmentation) corpus; when the pool is built with
// aux_in_t12_only, those may appear in type T1/T2 trials but never in T3/T4,
// in either role.
struct PoolUtterance {
  std::string id;
  std::string speaker_id;
  bool spoofed = false;
  bool aux = false;
};

// Candidate index over a set of utterances, grouped by speaker and class.
// Building the pool is the place where per-type candidacy is decided; the
// sampler itself only draws from the prepared lists.  When
// allow_aux_enrolment is false, auxiliary speakers are barred from the
// enrolment role entirely (so they appear only as T2 test utterances).
class TrialPool {
 public:
  TrialPool(std::vector<PoolUtterance> utterances, bool aux_in_t12_only,
            bool allow_aux_enrolment = true);

  const std::vector<PoolUtterance>& utterances() const { return utterances_; }
  bool aux_in_t12_only() const { return aux_in_t12_only_; }

  int num_speakers() const { return static_cast<int>(speaker_ids_.size()); }
  const std::vector<std::string>& speaker_ids() const { return speaker_ids_; }

  // Indices into utterances(), sorted; empty vectors when no candidates.
  const std::vector<int>& BonafideOf(int speaker) const;
  const std::vector<int>& SpoofedOf(int speaker) const;
  bool SpeakerIsAux(int speaker) const { return speaker_is_aux_[speaker]; }

  // Speakers eligible per role; see sampler.cpp for the exact rules.
  const std::vector<int>& t1_speakers() const { return t1_speakers_; }
  const std::vector<int>& t2_enrol_speakers() const { return t2_enrol_; }
  const std::vector<int>& t3_speakers() const { return t3_speakers_; }
  const std::vector<int>& t4_enrol_speakers() const { return t4_enrol_; }
  const std::vector<int>& spoof_speakers() const { return spoof_speakers_; }
  const std::vector<int>& bonafide_speakers() const {
    return bonafide_speakers_;
  }

 private:
  std::vector<PoolUtterance> utterances_;
  bool aux_in_t12_only_ = false;
  std::vector<std::string> speaker_ids_;
  std::vector<bool> speaker_is_aux_;
  std::vector<std::vector<int>> bonafide_by_speaker_;
  std::vector<std::vector<int>> spoofed_by_speaker_;
  std::vector<int> t1_speakers_, t2_enrol_, t3_speakers_, t4_enrol_;
  std::vector<int> bonafide_speakers_, spoof_speakers_;
};

// Draws `batch_size` trial pairs with exact per-type counts from
// TypeCounts(profile, batch_size).  Within the batch, an utterance is not
// reused in the same (type, role) slot while unused candidates remain;
// once a pool is exhausted, sampling falls back to replacement and a single
// warning is logged for the batch.  Deterministic given the generator state.
//
// Throws ConfigError naming the trial type when a type with nonzero weight
// has no candidates at all.
std::vector<TrialPair> SampleBatch(const TrialPool& pool,
                                   const ProportionProfile& profile,
                                   int batch_size, Rng* rng);

}  // namespace sasv::protocol
