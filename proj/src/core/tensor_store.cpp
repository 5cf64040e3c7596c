// sasv/core/tensor_store.cpp

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

#include "sasv/core/tensor_store.hpp"

#include <bit>
#include <fstream>

#include <json.hpp>

namespace sasv {

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

void SaveTensors(const ConstTensorRefs& tensors, const std::string& path) {
  nlohmann::json header;
  header["format"] = "sasv-tensors-v1";
  header["tensors"] = nlohmann::json::array();
  for (const Tensor* t : tensors) {
    header["tensors"].push_back({{"name", t->name},
                                 {"rows", t->value.rows()},
                                 {"cols", t->value.cols()}});
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out << header.dump() << "\n";
  std::vector<float> buffer;
  for (const Tensor* t : tensors) {
    buffer.resize(static_cast<std::size_t>(t->value.size()));
    Eigen::Map<Eigen::MatrixXf>(buffer.data(), t->value.rows(),
                                t->value.cols()) = t->value.cast<float>();
    out.write(reinterpret_cast<const char*>(buffer.data()),
              static_cast<std::streamsize>(buffer.size() * sizeof(float)));
  }
  if (!out) throw DataError("short write to checkpoint: " + path);
}

void LoadTensors(const TensorRefs& tensors, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  std::string header_line;
  if (!std::getline(in, header_line)) {
    throw DataError("checkpoint missing header: " + path);
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("checkpoint header is not valid JSON: " + path + ": " +
                    e.what());
  }
  if (header.value("format", "") != "sasv-tensors-v1") {
    throw DataError("unsupported checkpoint format in " + path);
  }
  const auto& entries = header.at("tensors");
  if (entries.size() != tensors.size()) {
    throw DataError("checkpoint " + path + " holds " +
                    std::to_string(entries.size()) + " tensors, expected " +
                    std::to_string(tensors.size()));
  }
  std::vector<float> buffer;
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    Tensor* t = tensors[i];
    const auto& e = entries[i];
    const std::string name = e.at("name").get<std::string>();
    const Eigen::Index rows = e.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = e.at("cols").get<Eigen::Index>();
    if (name != t->name || rows != t->value.rows() || cols != t->value.cols()) {
      throw DataError("checkpoint " + path + " tensor " + std::to_string(i) +
                      " is " + name + "(" + std::to_string(rows) + "x" +
                      std::to_string(cols) + "), expected " + t->name + "(" +
                      std::to_string(t->value.rows()) + "x" +
                      std::to_string(t->value.cols()) + ")");
    }
    buffer.resize(static_cast<std::size_t>(rows * cols));
    in.read(reinterpret_cast<char*>(buffer.data()),
            static_cast<std::streamsize>(buffer.size() * sizeof(float)));
    if (!in) throw DataError("checkpoint truncated: " + path);
    t->value = Eigen::Map<Eigen::MatrixXf>(buffer.data(), rows, cols)
                   .cast<Real>();
    t->grad = Mat::Zero(rows, cols);
  }
}

}  // namespace sasv
