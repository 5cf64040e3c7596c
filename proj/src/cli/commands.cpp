// sasv/cli/commands.cpp

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

#include "sasv/cli/commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "sasv/eval/score.hpp"
#include "sasv/plot/plots.hpp"
#include "sasv/train/trainer.hpp"

namespace sasv::cli {

namespace fs = std::filesystem;

std::string CorpusStem(const train::ExperimentConfig& cfg,
                       const std::string& name) {
  return (fs::path(cfg.out_dir) / "corpora" / name).string();
}

std::string RunsDir(const train::ExperimentConfig& cfg) {
  return (fs::path(cfg.out_dir) / "runs").string();
}

std::string SummaryDir(const train::ExperimentConfig& cfg) {
  return (fs::path(cfg.out_dir) / "summary").string();
}

namespace {

std::string ProtocolPath(const train::ExperimentConfig& cfg,
                         const std::string& name) {
  return (fs::path(cfg.out_dir) / "protocols" / (name + ".trials")).string();
}

std::string PretrainedPath(const train::ExperimentConfig& cfg,
                           const std::string& name) {
  return (fs::path(cfg.out_dir) / "pretrained" / (name + ".ckpt")).string();
}

synth::Corpus LoadCorpusOrExplain(const train::ExperimentConfig& cfg,
                                  const std::string& name) {
  const std::string stem = CorpusStem(cfg, name);
  if (!fs::exists(stem + ".meta")) {
    throw DataError("missing corpus '" + name + "' under " + cfg.out_dir +
                    " (run generate-data first)");
  }
  return synth::LoadCorpus(stem);
}

model::AsvConfig ResolvedAsvConfig(const train::ExperimentConfig& cfg) {
  model::AsvConfig asv = cfg.asv;
  asv.n_speakers = cfg.corpus_pretrain_asv.n_speakers;
  return asv;
}

model::AsvModel LoadPretrainedAsv(const train::ExperimentConfig& cfg) {
  const std::string path = PretrainedPath(cfg, "asv");
  if (!fs::exists(path)) {
    throw DataError("missing pre-trained ASV checkpoint " + path +
                    " (run pretrain first)");
  }
  return model::LoadAsv(ResolvedAsvConfig(cfg), path);
}

model::CmModel LoadPretrainedCm(const train::ExperimentConfig& cfg) {
  const std::string path = PretrainedPath(cfg, "cm");
  if (!fs::exists(path)) {
    throw DataError("missing pre-trained CM checkpoint " + path +
                    " (run pretrain first)");
  }
  return model::LoadCm(cfg.cm, path);
}

std::vector<std::pair<train::OptimisationMode, train::TrainingCondition>>
GridCells(const std::optional<std::string>& mode,
          const std::optional<std::string>& condition) {
  std::vector<train::OptimisationMode> modes;
  if (mode) {
    modes.push_back(train::ModeFromString(*mode));
  } else {
    modes = {train::OptimisationMode::kFixed, train::OptimisationMode::kJoint};
  }
  std::vector<train::TrainingCondition> conditions;
  if (condition) {
    conditions.push_back(train::ConditionFromString(*condition));
  } else {
    conditions = {train::TrainingCondition::kBaseOnly,
                  train::TrainingCondition::kBasePlusAux,
                  train::TrainingCondition::kBasePlusAuxBonafide};
  }
  std::vector<std::pair<train::OptimisationMode, train::TrainingCondition>>
      cells;
  for (auto c : conditions) {
    for (auto m : modes) cells.emplace_back(m, c);
  }
  return cells;
}

}  // namespace

void CmdGenerateData(const train::ExperimentConfig& cfg) {
  fs::create_directories(fs::path(cfg.out_dir) / "corpora");
  fs::create_directories(fs::path(cfg.out_dir) / "protocols");
  const std::vector<const synth::CorpusSpec*> specs = {
      &cfg.corpus_pretrain_asv, &cfg.corpus_base, &cfg.corpus_aux,
      &cfg.corpus_dev, &cfg.corpus_eval};
  for (const synth::CorpusSpec* spec : specs) {
    synth::Corpus corpus = synth::GenerateCorpus(*spec, cfg.signal);
    synth::WriteCorpus(corpus, CorpusStem(cfg, spec->name));
    LogInfo("generated corpus " + spec->name + ": " +
            std::to_string(corpus.utterances.size()) + " utterances");
    if (spec->name == cfg.corpus_dev.name) {
      protocol::WriteProtocol(
          train::MakeAssessmentProtocol(corpus, cfg.dev_trials_per_type,
                                        cfg.dev_protocol_seed),
          ProtocolPath(cfg, "dev"));
    } else if (spec->name == cfg.corpus_eval.name) {
      protocol::WriteProtocol(
          train::MakeAssessmentProtocol(corpus, cfg.eval_trials_per_type,
                                        cfg.eval_protocol_seed),
          ProtocolPath(cfg, "eval"));
    }
  }
}

void CmdPretrain(const train::ExperimentConfig& cfg) {
  fs::create_directories(fs::path(cfg.out_dir) / "pretrained");
  {
    const synth::Corpus corpus =
        LoadCorpusOrExplain(cfg, cfg.corpus_pretrain_asv.name);
    model::AsvModel asv =
        train::PretrainAsv(corpus, ResolvedAsvConfig(cfg), cfg.pretrain_asv);
    model::SaveAsv(&asv, PretrainedPath(cfg, "asv"));
    LogInfo("pre-trained ASV on " + cfg.corpus_pretrain_asv.name);
  }
  {
    const synth::Corpus corpus = LoadCorpusOrExplain(cfg, cfg.corpus_base.name);
    model::CmModel cm = train::PretrainCm(corpus, cfg.cm, cfg.pretrain_cm);
    model::SaveCm(&cm, PretrainedPath(cfg, "cm"));
    LogInfo("pre-trained CM on " + cfg.corpus_base.name);
  }
}

void CmdTrain(const train::ExperimentConfig& cfg,
              const std::optional<std::string>& mode,
              const std::optional<std::string>& condition) {
  const synth::Corpus base = LoadCorpusOrExplain(cfg, cfg.corpus_base.name);
  const synth::Corpus aux = LoadCorpusOrExplain(cfg, cfg.corpus_aux.name);
  const synth::Corpus dev = LoadCorpusOrExplain(cfg, cfg.corpus_dev.name);
  const synth::Corpus eval_corpus =
      LoadCorpusOrExplain(cfg, cfg.corpus_eval.name);
  const model::AsvModel asv = LoadPretrainedAsv(cfg);
  const model::CmModel cm = LoadPretrainedCm(cfg);

  train::ExperimentInputs inputs;
  inputs.data.base = &base;
  inputs.data.aux = &aux;
  inputs.data.dev = &dev;
  inputs.data.dev_trials = protocol::ParseProtocol(ProtocolPath(cfg, "dev"));
  inputs.data.allow_aux_enrolment = cfg.allow_aux_enrolment;
  inputs.eval = &eval_corpus;
  inputs.eval_trials = protocol::ParseProtocol(ProtocolPath(cfg, "eval"));
  inputs.backend_cfg = cfg.backend;
  inputs.train_cfg = cfg.train;
  inputs.seeds = cfg.seeds;
  inputs.workers = cfg.workers;
  inputs.runs_dir = RunsDir(cfg);
  inputs.config_snapshot = train::ExperimentConfigToMap(cfg);

  for (const auto& [m, c] : GridCells(mode, condition)) {
    const auto t0 = std::chrono::steady_clock::now();
    const eval::EvalReport report = train::RunExperiment(asv, cm, m, c, inputs);
    const auto seconds =
        std::chrono::duration_cast<std::chrono::duration<double>>(
            std::chrono::steady_clock::now() - t0)
            .count();
    char line[160];
    std::snprintf(line, sizeof(line),
                  "%s: full SASV-EER %.2f%% (SV %.2f%%, SPF %.2f%%) [%.1fs]",
                  train::ExperimentName(m, c).c_str(), report.full.sasv_eer,
                  report.full.sv_eer, report.full.spf_eer, seconds);
    LogInfo(line);
  }
}

void CmdEvaluate(const train::ExperimentConfig& cfg, const std::string& mode,
                 const std::string& condition,
                 std::optional<std::uint64_t> seed) {
  const auto m = train::ModeFromString(mode);
  const auto c = train::ConditionFromString(condition);
  std::vector<std::uint64_t> seeds = cfg.seeds;
  std::sort(seeds.begin(), seeds.end());
  const std::uint64_t chosen = seed ? *seed : seeds.front();

  const fs::path run_dir = fs::path(RunsDir(cfg)) /
                           train::ExperimentName(m, c) /
                           std::to_string(chosen);
  const model::ModelBundle bundle =
      model::LoadBundle((run_dir / "final").string());

  const synth::Corpus eval_corpus =
      LoadCorpusOrExplain(cfg, cfg.corpus_eval.name);
  const auto trials = protocol::ParseProtocol(ProtocolPath(cfg, "eval"));
  const auto records = eval::ScoreTrials(bundle, trials, eval_corpus, nullptr);
  eval::WriteScores(records, (run_dir / "eval_scores.txt").string());
  const eval::EvalReport report = eval::Evaluate(records);
  ConfigMap map;
  eval::ReportToConfig(report, "eval", &map);
  map.WriteFile((run_dir / "report.cfg").string());
  std::cout << "seed " << chosen << " full SASV/SV/SPF-EER[%]: "
            << report.full.sasv_eer << " " << report.full.sv_eer << " "
            << report.full.spf_eer << "\n";
}

void CmdReport(const train::ExperimentConfig& cfg) {
  eval::ReportGrid grid;
  ConfigMap merged;
  for (const std::string& condition : eval::kConditionOrder) {
    for (const std::string& mode : eval::kModeOrder) {
      const fs::path summary = fs::path(RunsDir(cfg)) /
                               (mode + "_" + condition) / "summary" /
                               "report.cfg";
      if (!fs::exists(summary)) {
        LogWarn("report: no summary for " + mode + "_" + condition +
                ", cell left blank");
        continue;
      }
      const ConfigMap map = ConfigMap::ParseFile(summary.string());
      const std::string prefix = mode + "." + condition;
      grid[{condition, mode}] = eval::ReportFromConfig(map, prefix);
      for (const auto& [key, value] : map.values()) {
        if (key != "seeds") merged.Set(key, value);
      }
    }
  }
  if (grid.empty()) {
    throw DataError("report: no experiment summaries under " + RunsDir(cfg) +
                    " (run train first)");
  }
  fs::create_directories(SummaryDir(cfg));
  const std::string table = eval::RenderTable(grid);
  {
    std::ofstream out(fs::path(SummaryDir(cfg)) / "table.txt",
                      std::ios::binary);
    out << table;
  }
  merged.WriteFile((fs::path(SummaryDir(cfg)) / "report.cfg").string());
  std::cout << table;
}

void CmdPlots(const train::ExperimentConfig& cfg,
              const std::vector<std::string>& score_files) {
  if (score_files.empty()) {
    throw ConfigError("plots: give at least one score file");
  }
  const std::string out_dir =
      (fs::path(SummaryDir(cfg)) / "plots").string();
  for (const std::string& file : score_files) {
    for (const std::string& path : plot::EmitPlotsForFile(file, out_dir)) {
      LogInfo("wrote " + path);
    }
  }
}

void CmdReproduceAll(const train::ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  CmdGenerateData(cfg);
  CmdPretrain(cfg);
  CmdTrain(cfg, std::nullopt, std::nullopt);
  CmdReport(cfg);
  const auto seconds =
      std::chrono::duration_cast<std::chrono::duration<double>>(
          std::chrono::steady_clock::now() - t0)
          .count();
  LogInfo("reproduce-all finished in " + std::to_string(seconds) + "s");
}

}  // namespace sasv::cli
