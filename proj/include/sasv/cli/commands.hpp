// sasv/cli/commands.hpp

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
#include <string>
#include <vector>

#include "sasv/train/experiment_config.hpp"

namespace sasv::cli {

// Output-directory layout used by every subcommand:
//   corpora/<name>.{meta,f32}        synthetic corpora
//   protocols/{dev,eval}.trials      assessment protocols
//   pretrained/{asv,cm}.ckpt         pre-trained sub-systems
//   runs/<mode>_<condition>/<seed>/  per-run artifacts
//   runs/<mode>_<condition>/summary/ seed-averaged report
//   summary/{table.txt,report.cfg}   the full grid
std::string CorpusStem(const train::ExperimentConfig& cfg,
                       const std::string& name);
std::string RunsDir(const train::ExperimentConfig& cfg);
std::string SummaryDir(const train::ExperimentConfig& cfg);

// Subcommand bodies; they throw on failure, the CLI wrapper maps that to a
// non-zero exit with a one-line diagnostic.
void CmdGenerateData(const train::ExperimentConfig& cfg);
void CmdPretrain(const train::ExperimentConfig& cfg);
void CmdTrain(const train::ExperimentConfig& cfg,
              const std::optional<std::string>& mode,
              const std::optional<std::string>& condition);
void CmdEvaluate(const train::ExperimentConfig& cfg, const std::string& mode,
                 const std::string& condition,
                 std::optional<std::uint64_t> seed);
void CmdReport(const train::ExperimentConfig& cfg);
void CmdPlots(const train::ExperimentConfig& cfg,
              const std::vector<std::string>& score_files);
void CmdReproduceAll(const train::ExperimentConfig& cfg);

}  // namespace sasv::cli
