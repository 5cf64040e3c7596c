// sasv/model/backend.cpp

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

#include "sasv/model/backend.hpp"

namespace sasv::model {

Mat StackEmbeddings(const EmbeddingTriple& triple) {
  const Eigen::Index d = triple.asv_enrol.size();
  if (triple.asv_test.size() != d || triple.cm_test.size() != d) {
    throw ConfigError("stack_embeddings: dimensions differ (" +
                      std::to_string(triple.asv_enrol.size()) + ", " +
                      std::to_string(triple.asv_test.size()) + ", " +
                      std::to_string(triple.cm_test.size()) + ")");
  }
  Mat stacked(3, d);
  stacked.row(0) = triple.asv_enrol.transpose();
  stacked.row(1) = triple.asv_test.transpose();
  stacked.row(2) = triple.cm_test.transpose();
  return stacked;
}

}  // namespace sasv::model
