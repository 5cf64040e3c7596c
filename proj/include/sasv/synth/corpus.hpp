// sasv/synth/corpus.hpp

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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sasv/core/common.hpp"
#include "sasv/core/rng.hpp"
#include "sasv/protocol/sampler.hpp"

namespace sasv::synth {

// Signal model shared by every corpus of an experiment.
//
// An utterance is a sum of sinusoids on a fixed bank of DFT bins plus white
// noise.  Speaker identity is the amplitude pattern over the speaker bins;
// spoofed utterances blend that pattern toward the attack's own pattern and
// add low-level tones in a separate artefact band.  All bins are integer DFT
// bins of the analysis window, so speaker content and attack artefacts are
// exactly orthogonal over a full utterance.
struct SignalModel {
  int speaker_bin_start = 64;
  int speaker_bin_step = 32;
  int speaker_bin_count = 16;
  int artefact_bin_start = 600;
  int artefact_bin_step = 10;
  int artefact_bin_count = 12;
  int artefact_tones = 3;         // tones per attack signature
  double tone_amp_l1 = 0.45;      // L1 budget of the speaker tone amplitudes
  double amp_jitter = 0.15;       // per-utterance relative amplitude jitter
  double noise_sigma = 0.06;      // white excitation level
  double artefact_amp0 = 0.14;    // artefact level of a quality-0 spoof
  double artefact_qslope = 0.93;  // artefact level decay per unit quality
  double latent_lo = 0.2;         // raw latent entries ~ U(lo, hi)
  double latent_hi = 1.0;
  double min_latent_dist = 0.06;  // min pairwise L2 distance between latents
  double tilt_per_shift = 0.35;   // domain colouring: low-pass mix per shift
  double tilt_max = 0.9;
  double floor_sigma_per_shift = 0.04;  // domain noise floor per unit shift

  std::vector<int> SpeakerBins() const;
  std::vector<int> ArtefactBins() const;
  void Validate() const;
};

struct CorpusSpec {
  std::string name;
  int n_speakers = 0;
  int n_bonafide = 0;
  int n_spoofed = 0;  // 0 gives a bona-fide-only corpus (no attacks)
  int n_attacks = 0;
  double domain_shift = 0.0;  // 0 = in-domain
  double quality_lo = 0.3;    // per-utterance attack quality ~ U(lo, hi)
  double quality_hi = 1.0;
  int signal_length = 1600;
  std::uint64_t seed = 1;
  // Attack signatures derive from this seed, independently of the utterance
  // seed, so two corpora can share attacks (seen attacks) or not (unseen).
  // Unset: derived from `seed`.
  std::optional<std::uint64_t> attack_seed;

  std::uint64_t EffectiveAttackSeed() const;
  void Validate() const;  // throws ConfigError
};

struct SpeakerLatent {
  std::string speaker_id;
  Vec resonance;  // nonnegative, L1-normalised amplitude pattern
};

struct AttackSignature {
  std::string attack_id;
  Vec resonance;            // blend target in speaker-bin space
  std::vector<int> bins;    // artefact tone bins, sorted
  Vec pattern;              // nonnegative, L1-normalised tone weights
};

struct Utterance {
  std::string id;
  std::string speaker_id;
  Vec signal;  // finite, clamped to [-1, 1], float32-quantised values
  bool is_spoofed = false;
  std::optional<std::string> attack_id;
  std::string domain_id;
};

struct Corpus {
  CorpusSpec spec;
  SignalModel model;
  std::vector<SpeakerLatent> speakers;
  std::vector<AttackSignature> attacks;
  std::vector<Utterance> utterances;

  // Trial-type candidacy index.
  std::vector<std::vector<int>> bonafide_by_speaker;
  std::vector<std::vector<int>> spoofed_by_speaker;
  std::map<std::string, int> index_by_id;

  const Utterance& ById(const std::string& id) const;  // throws DataError
  void RebuildIndex();
};

// Deterministic synthesis of one utterance.  Streams are derived from `rng`
// by tag, so a bona fide call and a spoofed call with the same generator
// seed share phases ("phase"), amplitude jitter ("jitter") and excitation
// ("noise"); spoofed utterances additionally consume "artefact_phase", and
// domain-shifted ones "domain_floor".
//
// Pipeline: resonance blend (quality q keeps q of the speaker pattern),
// jittered bank tones + artefact tones + white noise, then the domain
// colouring of ColourSignal, then clamping and float32 quantisation.
Vec SynthUtterance(const SignalModel& model, int signal_length,
                   const SpeakerLatent& latent, const AttackSignature* attack,
                   double quality, double domain_shift, const Rng& rng);

// The documented domain colouring: a one-pole low-pass tilt
//   y[t] = (1 - rho) x[t] + rho x[t-1],  rho = min(tilt_max,
//   tilt_per_shift * shift), x[-1] = 0,
// plus an additive noise floor  shift * floor_sigma_per_shift * floor[t].
// `floor` must hold standard normals (stream tag "domain_floor").
Vec ColourSignal(const SignalModel& model, const Vec& x, double shift,
                 const Vec& floor_noise);

// Magnitudes of the signal at the speaker bins: the speaker-feature
// projection.  Equals the effective tone amplitudes up to noise leakage.
Vec SpeakerFeatureProjection(const SignalModel& model, const Vec& signal);

// Total energy in the artefact band; the fixed spoof-detectability
// statistic used by diagnostics and tests.
double ArtefactBandEnergy(const SignalModel& model, const Vec& signal);

// Generates the full corpus: latents, attack signatures, balanced
// per-speaker allocation (counts differ by at most one), attacks assigned
// round-robin over spoofed utterances in generation order.
Corpus GenerateCorpus(const CorpusSpec& spec, const SignalModel& model);

// Corpus persistence: `<stem>.meta` holds one utterance per line as
// `id speaker_id is_spoofed attack_id domain_id` (is_spoofed 0/1, attack_id
// `-` when absent); `<stem>.f32` holds the signals as little-endian 32-bit
// floats concatenated in metadata order, with offsets implied by the fixed
// signal length.
void WriteCorpus(const Corpus& corpus, const std::string& stem);
Corpus LoadCorpus(const std::string& stem);  // speakers/attacks stay empty

// Sampler view of one or more corpora.
std::vector<protocol::PoolUtterance> AsPoolUtterances(const Corpus& corpus,
                                                      bool aux,
                                                      bool bonafide_only);

}  // namespace sasv::synth
