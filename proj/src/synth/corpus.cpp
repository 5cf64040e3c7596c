// sasv/synth/corpus.cpp

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

#include "sasv/synth/corpus.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

namespace sasv::synth {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

std::string Format(const char* fmt, long long v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

// Adds amp * sin(2*pi*bin*t/n + phase) for t = 0..n-1 using a rotation
// recurrence instead of per-sample trig.
void AddTone(Vec* x, int bin, double amp, double phase) {
  const auto n = x->size();
  const double delta = kTwoPi * bin / static_cast<double>(n);
  const double cd = std::cos(delta), sd = std::sin(delta);
  double s = std::sin(phase), c = std::cos(phase);
  for (Eigen::Index t = 0; t < n; ++t) {
    (*x)[t] += amp * s;
    const double s_next = s * cd + c * sd;
    c = c * cd - s * sd;
    s = s_next;
  }
}

// Correlates the signal with the exact DFT bin; returns the tone magnitude
// (2/n scaling so a unit-amplitude tone measures 1).
double BinMagnitude(const Vec& x, int bin) {
  const auto n = x.size();
  const double delta = kTwoPi * bin / static_cast<double>(n);
  const double cd = std::cos(delta), sd = std::sin(delta);
  double s = 0.0, c = 1.0;
  double acc_s = 0.0, acc_c = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    acc_s += x[t] * s;
    acc_c += x[t] * c;
    const double s_next = s * cd + c * sd;
    c = c * cd - s * sd;
    s = s_next;
  }
  return 2.0 / static_cast<double>(n) * std::hypot(acc_s, acc_c);
}

Vec DrawLatentVector(const SignalModel& model, Rng* rng) {
  Vec v(model.speaker_bin_count);
  for (int i = 0; i < model.speaker_bin_count; ++i) {
    v[i] = rng->Uniform(model.latent_lo, model.latent_hi);
  }
  return v / v.lpNorm<1>();
}

}  // namespace

std::vector<int> SignalModel::SpeakerBins() const {
  std::vector<int> bins(static_cast<std::size_t>(speaker_bin_count));
  for (int i = 0; i < speaker_bin_count; ++i) {
    bins[static_cast<std::size_t>(i)] = speaker_bin_start + i * speaker_bin_step;
  }
  return bins;
}

std::vector<int> SignalModel::ArtefactBins() const {
  std::vector<int> bins(static_cast<std::size_t>(artefact_bin_count));
  for (int i = 0; i < artefact_bin_count; ++i) {
    bins[static_cast<std::size_t>(i)] =
        artefact_bin_start + i * artefact_bin_step;
  }
  return bins;
}

void SignalModel::Validate() const {
  if (speaker_bin_count < 2) throw ConfigError("need at least 2 speaker bins");
  if (artefact_bin_count < 1) throw ConfigError("need at least 1 artefact bin");
  if (artefact_tones < 1 || artefact_tones > artefact_bin_count) {
    throw ConfigError("artefact_tones out of range");
  }
  if (latent_lo <= 0.0 || latent_hi <= latent_lo) {
    throw ConfigError("latent range must satisfy 0 < lo < hi");
  }
  const auto spk = SpeakerBins();
  const auto art = ArtefactBins();
  for (int b : art) {
    if (std::find(spk.begin(), spk.end(), b) != spk.end()) {
      throw ConfigError("speaker and artefact banks overlap at bin " +
                        std::to_string(b));
    }
  }
}

std::uint64_t CorpusSpec::EffectiveAttackSeed() const {
  return attack_seed ? *attack_seed : Rng::Mix(seed, Rng::Fnv1a("attacks"));
}

void CorpusSpec::Validate() const {
  if (name.empty()) throw ConfigError("corpus name must not be empty");
  if (n_speakers < 2) {
    throw ConfigError("corpus " + name +
                      ": need at least 2 speakers (type T2 pairs are "
                      "impossible otherwise)");
  }
  if (n_bonafide < n_speakers) {
    throw ConfigError("corpus " + name +
                      ": every speaker needs a bona fide utterance");
  }
  if (n_spoofed < 0) throw ConfigError("corpus " + name + ": n_spoofed < 0");
  if (n_spoofed > 0) {
    if (n_attacks < 1) {
      throw ConfigError("corpus " + name + ": spoofed data needs attacks");
    }
    if (n_spoofed < n_speakers) {
      throw ConfigError("corpus " + name +
                        ": every speaker needs a spoofed utterance");
    }
  }
  if (!(quality_lo >= 0.0 && quality_lo <= quality_hi && quality_hi <= 1.0)) {
    throw ConfigError("corpus " + name + ": quality range must be in [0,1]");
  }
  if (signal_length < 64) {
    throw ConfigError("corpus " + name + ": signal_length too small");
  }
  if (domain_shift < 0.0) {
    throw ConfigError("corpus " + name + ": domain_shift must be >= 0");
  }
}

const Utterance& Corpus::ById(const std::string& id) const {
  auto it = index_by_id.find(id);
  if (it == index_by_id.end()) throw DataError("unknown utterance id: " + id);
  return utterances[static_cast<std::size_t>(it->second)];
}

void Corpus::RebuildIndex() {
  index_by_id.clear();
  std::map<std::string, int> speaker_index;
  bonafide_by_speaker.clear();
  spoofed_by_speaker.clear();
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    const Utterance& u = utterances[i];
    if (!index_by_id.emplace(u.id, static_cast<int>(i)).second) {
      throw DataError("duplicate utterance id: " + u.id);
    }
    auto [it, inserted] = speaker_index.emplace(
        u.speaker_id, static_cast<int>(bonafide_by_speaker.size()));
    if (inserted) {
      bonafide_by_speaker.emplace_back();
      spoofed_by_speaker.emplace_back();
    }
    (u.is_spoofed ? spoofed_by_speaker : bonafide_by_speaker)[it->second]
        .push_back(static_cast<int>(i));
  }
}

Vec ColourSignal(const SignalModel& model, const Vec& x, double shift,
                 const Vec& floor_noise) {
  if (shift <= 0.0) return x;
  const double rho = std::min(model.tilt_max, model.tilt_per_shift * shift);
  Vec y(x.size());
  double prev = 0.0;
  for (Eigen::Index t = 0; t < x.size(); ++t) {
    y[t] = (1.0 - rho) * x[t] + rho * prev;
    prev = x[t];
  }
  y += (shift * model.floor_sigma_per_shift) * floor_noise;
  return y;
}

Vec SynthUtterance(const SignalModel& model, int signal_length,
                   const SpeakerLatent& latent, const AttackSignature* attack,
                   double quality, double domain_shift, const Rng& rng) {
  if (quality < 0.0 || quality > 1.0) {
    throw ConfigError("attack quality must lie in [0,1]");
  }
  const int n_bins = model.speaker_bin_count;
  Vec resonance = latent.resonance;
  if (attack != nullptr) {
    resonance =
        quality * latent.resonance + (1.0 - quality) * attack->resonance;
  }

  Rng jitter_rng = rng.Derive("jitter");
  Vec amps(n_bins);
  for (int k = 0; k < n_bins; ++k) {
    amps[k] = std::abs(resonance[k] * model.tone_amp_l1 *
                       (1.0 + model.amp_jitter * jitter_rng.Normal()));
  }

  Vec x = Vec::Zero(signal_length);
  const auto bins = model.SpeakerBins();
  Rng phase_rng = rng.Derive("phase");
  for (int k = 0; k < n_bins; ++k) {
    AddTone(&x, bins[static_cast<std::size_t>(k)], amps[k],
            phase_rng.Uniform(0.0, kTwoPi));
  }

  if (attack != nullptr) {
    const double amp = std::max(
        0.0, model.artefact_amp0 * (1.0 - model.artefact_qslope * quality));
    Rng art_rng = rng.Derive("artefact_phase");
    for (std::size_t j = 0; j < attack->bins.size(); ++j) {
      AddTone(&x, attack->bins[j],
              amp * attack->pattern[static_cast<Eigen::Index>(j)],
              art_rng.Uniform(0.0, kTwoPi));
    }
  }

  Rng noise_rng = rng.Derive("noise");
  for (Eigen::Index t = 0; t < x.size(); ++t) {
    x[t] += model.noise_sigma * noise_rng.Normal();
  }

  if (domain_shift > 0.0) {
    Rng floor_rng = rng.Derive("domain_floor");
    Vec floor_noise(x.size());
    for (Eigen::Index t = 0; t < x.size(); ++t) {
      floor_noise[t] = floor_rng.Normal();
    }
    x = ColourSignal(model, x, domain_shift, floor_noise);
  }

  // Clamp, then snap to the float32 grid so in-memory corpora match the
  // persisted form exactly.
  for (Eigen::Index t = 0; t < x.size(); ++t) {
    x[t] = static_cast<double>(
        static_cast<float>(std::clamp(x[t], -1.0, 1.0)));
  }
  return x;
}

Vec SpeakerFeatureProjection(const SignalModel& model, const Vec& signal) {
  const auto bins = model.SpeakerBins();
  Vec proj(static_cast<Eigen::Index>(bins.size()));
  for (std::size_t k = 0; k < bins.size(); ++k) {
    proj[static_cast<Eigen::Index>(k)] = BinMagnitude(signal, bins[k]);
  }
  return proj;
}

double ArtefactBandEnergy(const SignalModel& model, const Vec& signal) {
  double energy = 0.0;
  for (int bin : model.ArtefactBins()) {
    const double m = BinMagnitude(signal, bin);
    energy += m * m;
  }
  return energy;
}

Corpus GenerateCorpus(const CorpusSpec& spec, const SignalModel& model) {
  spec.Validate();
  model.Validate();
  Corpus corpus;
  corpus.spec = spec;
  corpus.model = model;

  // Speaker latents, rejection-sampled for pairwise distinctness.
  Rng speakers_rng = Rng(spec.seed).Derive("speakers");
  const long max_tries = 1000L * spec.n_speakers + 1000L;
  long tries = 0;
  while (static_cast<int>(corpus.speakers.size()) < spec.n_speakers) {
    if (++tries > max_tries) {
      throw ConfigError("corpus " + spec.name + ": cannot place " +
                        std::to_string(spec.n_speakers) +
                        " speaker latents at min distance " +
                        std::to_string(model.min_latent_dist));
    }
    Vec candidate = DrawLatentVector(model, &speakers_rng);
    bool ok = true;
    for (const SpeakerLatent& s : corpus.speakers) {
      if ((s.resonance - candidate).norm() <= model.min_latent_dist) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    SpeakerLatent latent;
    latent.speaker_id =
        spec.name + "-s" + Format("%03lld", static_cast<long long>(
                                                corpus.speakers.size()));
    latent.resonance = std::move(candidate);
    corpus.speakers.push_back(std::move(latent));
  }

  // Attack signatures from the attack seed: blend-target resonance, a few
  // distinct artefact bins, and a tone weight pattern.
  if (spec.n_spoofed > 0) {
    Rng attack_root(spec.EffectiveAttackSeed());
    const auto art_bins = model.ArtefactBins();
    for (int a = 0; a < spec.n_attacks; ++a) {
      Rng arng = attack_root.Derive("attack", static_cast<std::uint64_t>(a));
      AttackSignature sig;
      sig.attack_id = spec.name + "-a" + Format("%02lld", a);
      sig.resonance = DrawLatentVector(model, &arng);
      std::vector<int> order(art_bins.begin(), art_bins.end());
      arng.Shuffle(&order);
      sig.bins.assign(order.begin(), order.begin() + model.artefact_tones);
      std::sort(sig.bins.begin(), sig.bins.end());
      sig.pattern = Vec(model.artefact_tones);
      for (int j = 0; j < model.artefact_tones; ++j) {
        sig.pattern[j] = arng.Uniform(model.latent_lo, model.latent_hi);
      }
      sig.pattern /= sig.pattern.lpNorm<1>();
      corpus.attacks.push_back(std::move(sig));
    }
  }

  // Balanced per-speaker allocation: the first (count % n_speakers)
  // speakers take the extra utterance.
  auto allocation = [&](int total) {
    std::vector<int> counts(static_cast<std::size_t>(spec.n_speakers),
                            total / spec.n_speakers);
    for (int s = 0; s < total % spec.n_speakers; ++s) {
      ++counts[static_cast<std::size_t>(s)];
    }
    return counts;
  };

  const Rng corpus_rng(spec.seed);
  std::uint64_t ordinal = 0;
  auto make_utterance = [&](int speaker, const AttackSignature* attack) {
    Rng utt_rng = corpus_rng.Derive("utt", ordinal);
    double quality = 1.0;
    if (attack != nullptr) {
      quality = utt_rng.Derive("quality").Uniform(spec.quality_lo,
                                                  spec.quality_hi);
    }
    Utterance u;
    u.id = spec.name + "-u" + Format("%05llu", static_cast<long long>(ordinal));
    u.speaker_id = corpus.speakers[static_cast<std::size_t>(speaker)].speaker_id;
    u.signal = SynthUtterance(model, spec.signal_length,
                              corpus.speakers[static_cast<std::size_t>(speaker)],
                              attack, quality, spec.domain_shift, utt_rng);
    u.is_spoofed = attack != nullptr;
    if (attack != nullptr) u.attack_id = attack->attack_id;
    u.domain_id = spec.name;
    ++ordinal;
    return u;
  };

  const auto bona_counts = allocation(spec.n_bonafide);
  for (int s = 0; s < spec.n_speakers; ++s) {
    for (int k = 0; k < bona_counts[static_cast<std::size_t>(s)]; ++k) {
      corpus.utterances.push_back(make_utterance(s, nullptr));
    }
  }
  if (spec.n_spoofed > 0) {
    const auto spoof_counts = allocation(spec.n_spoofed);
    int spoof_ordinal = 0;
    for (int s = 0; s < spec.n_speakers; ++s) {
      for (int k = 0; k < spoof_counts[static_cast<std::size_t>(s)]; ++k) {
        const AttackSignature& attack =
            corpus.attacks[static_cast<std::size_t>(spoof_ordinal %
                                                    spec.n_attacks)];
        corpus.utterances.push_back(make_utterance(s, &attack));
        ++spoof_ordinal;
      }
    }
  }

  corpus.RebuildIndex();
  return corpus;
}

void WriteCorpus(const Corpus& corpus, const std::string& stem) {
  std::ofstream meta(stem + ".meta", std::ios::binary);
  if (!meta) throw DataError("cannot write corpus metadata: " + stem + ".meta");
  std::ofstream bin(stem + ".f32", std::ios::binary);
  if (!bin) throw DataError("cannot write corpus signals: " + stem + ".f32");
  static_assert(std::endian::native == std::endian::little,
                "corpus writer assumes a little-endian host");
  std::vector<float> buffer;
  for (const Utterance& u : corpus.utterances) {
    meta << u.id << ' ' << u.speaker_id << ' ' << (u.is_spoofed ? 1 : 0) << ' '
         << (u.attack_id ? *u.attack_id : std::string("-")) << ' '
         << u.domain_id << '\n';
    buffer.resize(static_cast<std::size_t>(u.signal.size()));
    Eigen::Map<Eigen::VectorXf>(buffer.data(), u.signal.size()) =
        u.signal.cast<float>();
    bin.write(reinterpret_cast<const char*>(buffer.data()),
              static_cast<std::streamsize>(buffer.size() * sizeof(float)));
  }
  if (!meta || !bin) throw DataError("short write persisting corpus " + stem);
}

Corpus LoadCorpus(const std::string& stem) {
  std::ifstream meta(stem + ".meta");
  if (!meta) throw DataError("cannot open corpus metadata: " + stem + ".meta");
  Corpus corpus;
  corpus.spec.name = std::filesystem::path(stem).filename().string();
  std::string line;
  int lineno = 0;
  while (std::getline(meta, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    Utterance u;
    std::string spoofed, attack;
    if (!(fields >> u.id >> u.speaker_id >> spoofed >> attack >> u.domain_id)) {
      throw ParseError(stem + ".meta: line " + std::to_string(lineno) +
                       ": expected 5 fields");
    }
    if (spoofed != "0" && spoofed != "1") {
      throw ParseError(stem + ".meta: line " + std::to_string(lineno) +
                       ": is_spoofed must be 0 or 1");
    }
    u.is_spoofed = spoofed == "1";
    if (attack != "-") u.attack_id = attack;
    if (u.is_spoofed != u.attack_id.has_value()) {
      throw ParseError(stem + ".meta: line " + std::to_string(lineno) +
                       ": is_spoofed and attack_id disagree");
    }
    corpus.utterances.push_back(std::move(u));
  }
  if (corpus.utterances.empty()) {
    throw DataError("corpus " + stem + " has no utterances");
  }

  std::ifstream bin(stem + ".f32", std::ios::binary);
  if (!bin) throw DataError("cannot open corpus signals: " + stem + ".f32");
  bin.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::uint64_t>(bin.tellg());
  bin.seekg(0, std::ios::beg);
  const std::uint64_t n = corpus.utterances.size();
  if (bytes % (n * sizeof(float)) != 0) {
    throw DataError("corpus " + stem +
                    ": signal file size is not a multiple of the utterance "
                    "count");
  }
  const auto length = static_cast<Eigen::Index>(bytes / (n * sizeof(float)));
  corpus.spec.signal_length = static_cast<int>(length);
  std::vector<float> buffer(static_cast<std::size_t>(length));
  for (Utterance& u : corpus.utterances) {
    bin.read(reinterpret_cast<char*>(buffer.data()),
             static_cast<std::streamsize>(buffer.size() * sizeof(float)));
    if (!bin) throw DataError("corpus " + stem + ": signal file truncated");
    u.signal =
        Eigen::Map<Eigen::VectorXf>(buffer.data(), length).cast<Real>();
  }
  corpus.RebuildIndex();
  return corpus;
}

std::vector<protocol::PoolUtterance> AsPoolUtterances(const Corpus& corpus,
                                                      bool aux,
                                                      bool bonafide_only) {
  std::vector<protocol::PoolUtterance> pool;
  pool.reserve(corpus.utterances.size());
  for (const Utterance& u : corpus.utterances) {
    if (bonafide_only && u.is_spoofed) continue;
    pool.push_back(protocol::PoolUtterance{u.id, u.speaker_id, u.is_spoofed,
                                           aux});
  }
  return pool;
}

}  // namespace sasv::synth
