// sasv/model/bundle.hpp

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

#include "sasv/model/asv.hpp"
#include "sasv/model/backend.hpp"
#include "sasv/model/cm.hpp"

namespace sasv::model {

// The combined SASV system.  The two sub-system embedding dimensions must
// agree; the constructor-time check is the only place that can guarantee it.
struct ModelBundle {
  AsvModel asv;
  CmModel cm;
  BackendModel backend;

  void Validate() const {
    if (asv.config().embed_dim != cm.config().embed_dim) {
      throw ConfigError("bundle: asv and cm embedding dimensions differ");
    }
  }
};

// Directory layout: manifest.json (hyperparameters + checkpoint names) next
// to asv.ckpt / cm.ckpt / backend.ckpt in the tensor-store format.
void SaveBundle(ModelBundle* bundle, const std::string& dir);
ModelBundle LoadBundle(const std::string& dir);

// Sub-system checkpoints only (pre-training artifacts).
void SaveAsv(AsvModel* asv, const std::string& path);
AsvModel LoadAsv(const AsvConfig& config, const std::string& path);
void SaveCm(CmModel* cm, const std::string& path);
CmModel LoadCm(const CmConfig& config, const std::string& path);

}  // namespace sasv::model
