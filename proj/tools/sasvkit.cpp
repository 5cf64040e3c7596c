// tools/sasvkit.cpp

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

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "sasv/cli/commands.hpp"

namespace {

struct GlobalFlags {
  std::string config_path;
  std::string out_dir;
  std::string seeds;
  std::string mode;
  std::string condition;
};

sasv::train::ExperimentConfig ResolveConfig(const GlobalFlags& flags) {
  sasv::train::ExperimentConfig cfg =
      flags.config_path.empty()
          ? sasv::train::DefaultExperimentConfig()
          : sasv::train::LoadExperimentConfig(flags.config_path);
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (!flags.seeds.empty()) {
    sasv::ConfigMap map;
    map.Set("seeds", flags.seeds);
    cfg.seeds.clear();
    for (std::int64_t s : map.GetIntList("seeds")) {
      cfg.seeds.push_back(static_cast<std::uint64_t>(s));
    }
    cfg.train.n_seeds = static_cast<int>(cfg.seeds.size());
  }
  cfg.Validate();
  return cfg;
}

void AddCommonFlags(CLI::App* cmd, GlobalFlags* flags) {
  cmd->add_option("--config", flags->config_path,
                  "experiment config file (defaults apply when omitted)");
  cmd->add_option("--out", flags->out_dir, "output directory override");
  cmd->add_option("--seeds", flags->seeds,
                  "comma-separated seed list override");
}

std::optional<std::string> OptionalFlag(const std::string& value) {
  return value.empty() ? std::nullopt : std::make_optional(value);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale spoofing-aware speaker verification experiments"};
  app.require_subcommand(1);
  GlobalFlags flags;

  CLI::App* generate = app.add_subcommand(
      "generate-data", "synthesise the corpora and assessment protocols");
  AddCommonFlags(generate, &flags);

  CLI::App* pretrain =
      app.add_subcommand("pretrain", "pre-train the ASV and CM sub-systems");
  AddCommonFlags(pretrain, &flags);

  CLI::App* train = app.add_subcommand(
      "train", "run SASV training experiments (all cells unless narrowed)");
  AddCommonFlags(train, &flags);
  train->add_option("--mode", flags.mode, "fixed | joint");
  train->add_option("--condition", flags.condition,
                    "base | base_aux | base_aux_bf");

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "re-score the evaluation protocol with a trained bundle");
  AddCommonFlags(evaluate, &flags);
  std::uint64_t eval_seed = 0;
  bool eval_seed_set = false;
  evaluate->add_option("--mode", flags.mode, "fixed | joint")->required();
  evaluate->add_option("--condition", flags.condition,
                       "base | base_aux | base_aux_bf")
      ->required();
  evaluate->add_option("--seed", eval_seed, "run seed (default: lowest)")
      ->each([&](const std::string&) { eval_seed_set = true; });

  CLI::App* report = app.add_subcommand(
      "report", "render the summary table from experiment results");
  AddCommonFlags(report, &flags);

  CLI::App* plots = app.add_subcommand(
      "plots", "render score histograms and FAR/FRR curves from score files");
  AddCommonFlags(plots, &flags);
  std::vector<std::string> score_files;
  plots->add_option("files", score_files, "score files")->required();

  CLI::App* reproduce = app.add_subcommand(
      "reproduce-all", "data + pretrain + the 2x3 grid + summary report");
  AddCommonFlags(reproduce, &flags);

  CLI11_PARSE(app, argc, argv);

  try {
    const sasv::train::ExperimentConfig cfg = ResolveConfig(flags);
    if (generate->parsed()) {
      sasv::cli::CmdGenerateData(cfg);
    } else if (pretrain->parsed()) {
      sasv::cli::CmdPretrain(cfg);
    } else if (train->parsed()) {
      sasv::cli::CmdTrain(cfg, OptionalFlag(flags.mode),
                          OptionalFlag(flags.condition));
    } else if (evaluate->parsed()) {
      sasv::cli::CmdEvaluate(cfg, flags.mode, flags.condition,
                             eval_seed_set
                                 ? std::make_optional(eval_seed)
                                 : std::nullopt);
    } else if (report->parsed()) {
      sasv::cli::CmdReport(cfg);
    } else if (plots->parsed()) {
      sasv::cli::CmdPlots(cfg, score_files);
    } else if (reproduce->parsed()) {
      sasv::cli::CmdReproduceAll(cfg);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
