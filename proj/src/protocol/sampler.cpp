// sasv/protocol/sampler.cpp

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

#include "sasv/protocol/sampler.hpp"

#include <algorithm>
#include <map>

namespace sasv::protocol {

TrialPool::TrialPool(std::vector<PoolUtterance> utterances,
                     bool aux_in_t12_only, bool allow_aux_enrolment)
    : utterances_(std::move(utterances)), aux_in_t12_only_(aux_in_t12_only) {
  std::map<std::string, int> speaker_index;
  for (std::size_t i = 0; i < utterances_.size(); ++i) {
    const PoolUtterance& u = utterances_[i];
    auto [it, inserted] =
        speaker_index.emplace(u.speaker_id, static_cast<int>(speaker_ids_.size()));
    if (inserted) {
      speaker_ids_.push_back(u.speaker_id);
      speaker_is_aux_.push_back(u.aux);
      bonafide_by_speaker_.emplace_back();
      spoofed_by_speaker_.emplace_back();
    }
    const int s = it->second;
    if (u.aux != speaker_is_aux_[s]) {
      throw ConfigError("speaker " + u.speaker_id +
                        " appears in both base and auxiliary corpora");
    }
    (u.spoofed ? spoofed_by_speaker_[s] : bonafide_by_speaker_[s])
        .push_back(static_cast<int>(i));
  }
  const int n = num_speakers();
  std::vector<int> t1_strict, t1_loose;
  for (int s = 0; s < n; ++s) {
    const bool has_bf = !bonafide_by_speaker_[s].empty();
    const bool has_spoof = !spoofed_by_speaker_[s].empty();
    const bool t34_ok = !(aux_in_t12_only_ && speaker_is_aux_[s]);
    const bool enrol_ok = allow_aux_enrolment || !speaker_is_aux_[s];
    if (has_bf) {
      bonafide_speakers_.push_back(s);
      if (enrol_ok) {
        t2_enrol_.push_back(s);
        t1_loose.push_back(s);
        if (bonafide_by_speaker_[s].size() >= 2) t1_strict.push_back(s);
        if (t34_ok) t4_enrol_.push_back(s);
      }
    }
    if (has_spoof && t34_ok) {
      spoof_speakers_.push_back(s);
      if (has_bf && enrol_ok) t3_speakers_.push_back(s);
    }
  }
  // T1 prefers speakers with two bona fide utterances so enrolment and test
  // can differ; a pool where nobody has two falls back to single-utterance
  // speakers (enrol == test).
  t1_speakers_ = t1_strict.empty() ? t1_loose : t1_strict;
}

const std::vector<int>& TrialPool::BonafideOf(int speaker) const {
  return bonafide_by_speaker_.at(speaker);
}

const std::vector<int>& TrialPool::SpoofedOf(int speaker) const {
  return spoofed_by_speaker_.at(speaker);
}

namespace {

struct RoleState {
  std::vector<char> used;  // per utterance index
  int reuse_count = 0;

  explicit RoleState(std::size_t n) : used(n, 0) {}

  // Uniform over the unused candidates; falls back to replacement once all
  // candidates have been used.
  int Draw(const std::vector<int>& candidates, Rng* rng) {
    scratch.clear();
    for (int c : candidates) {
      if (!used[static_cast<std::size_t>(c)]) scratch.push_back(c);
    }
    if (!scratch.empty()) {
      int pick = scratch[rng->Below(scratch.size())];
      used[static_cast<std::size_t>(pick)] = 1;
      return pick;
    }
    ++reuse_count;
    return candidates[rng->Below(candidates.size())];
  }

  std::vector<int> scratch;
};

int PickSpeaker(const std::vector<int>& speakers, Rng* rng) {
  return speakers[rng->Below(speakers.size())];
}

int PickSpeakerExcluding(const std::vector<int>& speakers, int excluded,
                         Rng* rng) {
  std::vector<int> filtered;
  filtered.reserve(speakers.size());
  for (int s : speakers) {
    if (s != excluded) filtered.push_back(s);
  }
  return filtered[rng->Below(filtered.size())];
}

std::vector<int> Excluding(const std::vector<int>& items, int excluded) {
  std::vector<int> out;
  out.reserve(items.size());
  for (int v : items) {
    if (v != excluded) out.push_back(v);
  }
  return out;
}

void RequireCandidates(bool ok, TrialType type) {
  if (!ok) {
    throw ConfigError("no candidate pairs for trial type " + ToString(type) +
                      " with nonzero proportion");
  }
}

}  // namespace

std::vector<TrialPair> SampleBatch(const TrialPool& pool,
                                   const ProportionProfile& profile,
                                   int batch_size, Rng* rng) {
  const auto counts = TypeCounts(profile, batch_size);
  const std::size_t n_utt = pool.utterances().size();

  if (counts[0] > 0) RequireCandidates(!pool.t1_speakers().empty(), TrialType::kT1);
  if (counts[1] > 0) {
    RequireCandidates(pool.bonafide_speakers().size() >= 2, TrialType::kT2);
  }
  if (counts[2] > 0) RequireCandidates(!pool.t3_speakers().empty(), TrialType::kT3);
  std::vector<int> t4_enrol = pool.t4_enrol_speakers();
  if (counts[3] > 0) {
    if (pool.spoof_speakers().size() == 1) {
      t4_enrol = Excluding(t4_enrol, pool.spoof_speakers().front());
    }
    RequireCandidates(!pool.spoof_speakers().empty() && !t4_enrol.empty(),
                      TrialType::kT4);
  }

  std::array<RoleState, kNumTrialTypes> enrol_state{
      RoleState(n_utt), RoleState(n_utt), RoleState(n_utt), RoleState(n_utt)};
  std::array<RoleState, kNumTrialTypes> test_state{
      RoleState(n_utt), RoleState(n_utt), RoleState(n_utt), RoleState(n_utt)};

  std::vector<TrialPair> batch;
  batch.reserve(static_cast<std::size_t>(batch_size));
  const auto& utts = pool.utterances();
  auto emit = [&](TrialType type, int enrol_idx, int test_idx) {
    batch.push_back(TrialPair{utts[static_cast<std::size_t>(enrol_idx)].id,
                              utts[static_cast<std::size_t>(test_idx)].id,
                              type});
  };

  for (int k = 0; k < counts[0]; ++k) {
    const int spk = PickSpeaker(pool.t1_speakers(), rng);
    RoleState& es = enrol_state[0];
    RoleState& ts = test_state[0];
    const int enrol = es.Draw(pool.BonafideOf(spk), rng);
    std::vector<int> tests = Excluding(pool.BonafideOf(spk), enrol);
    if (tests.empty()) {
      tests = pool.BonafideOf(spk);  // single-utterance speaker
      ++ts.reuse_count;
    }
    emit(TrialType::kT1, enrol, ts.Draw(tests, rng));
  }
  for (int k = 0; k < counts[1]; ++k) {
    const int enrol_spk = PickSpeaker(pool.t2_enrol_speakers(), rng);
    const int test_spk =
        PickSpeakerExcluding(pool.bonafide_speakers(), enrol_spk, rng);
    emit(TrialType::kT2, enrol_state[1].Draw(pool.BonafideOf(enrol_spk), rng),
         test_state[1].Draw(pool.BonafideOf(test_spk), rng));
  }
  for (int k = 0; k < counts[2]; ++k) {
    const int spk = PickSpeaker(pool.t3_speakers(), rng);
    emit(TrialType::kT3, enrol_state[2].Draw(pool.BonafideOf(spk), rng),
         test_state[2].Draw(pool.SpoofedOf(spk), rng));
  }
  for (int k = 0; k < counts[3]; ++k) {
    const int enrol_spk = PickSpeaker(t4_enrol, rng);
    const int test_spk =
        PickSpeakerExcluding(pool.spoof_speakers(), enrol_spk, rng);
    emit(TrialType::kT4, enrol_state[3].Draw(pool.BonafideOf(enrol_spk), rng),
         test_state[3].Draw(pool.SpoofedOf(test_spk), rng));
  }

  int reused = 0;
  for (int i = 0; i < kNumTrialTypes; ++i) {
    reused += enrol_state[i].reuse_count + test_state[i].reuse_count;
  }
  if (reused > 0) {
    LogWarn("sample_batch: pool smaller than requested, reused " +
            std::to_string(reused) + " utterance slots");
  }
  return batch;
}

}  // namespace sasv::protocol
