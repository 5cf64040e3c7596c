// sasv/plot/plots.hpp

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

#include "sasv/eval/report.hpp"

namespace sasv::plot {

// For each score stream (full, asv, cm) renders a per-trial-type score
// histogram and a FAR/FRR-versus-threshold curve: six PNGs per score file,
// named <prefix>_<stream>_hist.png and <prefix>_<stream>_far_frr.png under
// out_dir.  Trial types with no records are omitted with a warning.
// Returns the written paths in a deterministic order.
//
// Colours: T1 green, T2 blue, T3 orange, T4 red; FAR red, FRR blue.
std::vector<std::string> EmitPlots(const std::vector<eval::ScoreRecord>& records,
                                   const std::string& prefix,
                                   const std::string& out_dir);

// Convenience wrapper over score files on disk.
std::vector<std::string> EmitPlotsForFile(const std::string& score_file,
                                          const std::string& out_dir);

}  // namespace sasv::plot
