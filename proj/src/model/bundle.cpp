// sasv/model/bundle.cpp

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

#include "sasv/model/bundle.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace sasv::model {

namespace {

using nlohmann::json;

json EncoderToJson(const EncoderConfig& cfg) {
  return json{{"channels", cfg.channels},
              {"kernels", cfg.kernels},
              {"strides", cfg.strides},
              {"pool_eps", cfg.pool_eps}};
}

EncoderConfig EncoderFromJson(const json& j) {
  EncoderConfig cfg;
  for (int i = 0; i < 3; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    cfg.channels[ui] = j.at("channels").at(ui).get<int>();
    cfg.kernels[ui] = j.at("kernels").at(ui).get<int>();
    cfg.strides[ui] = j.at("strides").at(ui).get<int>();
  }
  cfg.pool_eps = j.at("pool_eps").get<double>();
  return cfg;
}

json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("manifest " + path + " is not valid JSON: " + e.what());
  }
}

}  // namespace

void SaveAsv(AsvModel* asv, const std::string& path) {
  SaveTensors(AsConst(asv->Params()), path);
}

AsvModel LoadAsv(const AsvConfig& config, const std::string& path) {
  AsvModel asv(config, Rng(0));
  LoadTensors(asv.Params(), path);
  return asv;
}

void SaveCm(CmModel* cm, const std::string& path) {
  SaveTensors(AsConst(cm->Params()), path);
}

CmModel LoadCm(const CmConfig& config, const std::string& path) {
  CmModel cm(config, Rng(0));
  LoadTensors(cm.Params(), path);
  return cm;
}

void SaveBundle(ModelBundle* bundle, const std::string& dir) {
  bundle->Validate();
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const AsvConfig& asv_cfg = bundle->asv.config();
  const CmConfig& cm_cfg = bundle->cm.config();
  const BackendConfig& be_cfg = bundle->backend.config();
  json manifest;
  manifest["format"] = "sasv-bundle-v1";
  manifest["asv"] = {{"encoder", EncoderToJson(asv_cfg.encoder)},
                     {"embed_dim", asv_cfg.embed_dim},
                     {"n_speakers", asv_cfg.n_speakers},
                     {"proto_scale_init", asv_cfg.proto_scale_init},
                     {"proto_scale_min", asv_cfg.proto_scale_min}};
  manifest["cm"] = {{"encoder", EncoderToJson(cm_cfg.encoder)},
                    {"hidden_dim", cm_cfg.hidden_dim},
                    {"embed_dim", cm_cfg.embed_dim}};
  manifest["backend"] = {{"channels", be_cfg.channels},
                         {"kernel", be_cfg.kernel},
                         {"pool_len", be_cfg.pool_len},
                         {"hidden_dim", be_cfg.hidden_dim},
                         {"final_dim", be_cfg.final_dim},
                         {"alpha", be_cfg.alpha},
                         {"m_pos", be_cfg.m_pos},
                         {"m_neg", be_cfg.m_neg}};
  manifest["checkpoints"] = {
      {"asv", "asv.ckpt"}, {"cm", "cm.ckpt"}, {"backend", "backend.ckpt"}};
  std::ofstream out(fs::path(dir) / "manifest.json", std::ios::binary);
  if (!out) throw DataError("cannot write manifest under " + dir);
  out << manifest.dump(2) << "\n";
  SaveTensors(AsConst(bundle->asv.Params()),
              (fs::path(dir) / "asv.ckpt").string());
  SaveTensors(AsConst(bundle->cm.Params()),
              (fs::path(dir) / "cm.ckpt").string());
  SaveTensors(AsConst(bundle->backend.Params()),
              (fs::path(dir) / "backend.ckpt").string());
}

ModelBundle LoadBundle(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  if (!fs::exists(root / "manifest.json")) {
    throw DataError("missing model bundle: no manifest under " + dir);
  }
  const json manifest = ReadJsonFile((root / "manifest.json").string());
  if (manifest.value("format", "") != "sasv-bundle-v1") {
    throw DataError("unsupported bundle format under " + dir);
  }

  AsvConfig asv_cfg;
  asv_cfg.encoder = EncoderFromJson(manifest.at("asv").at("encoder"));
  asv_cfg.embed_dim = manifest.at("asv").at("embed_dim").get<int>();
  asv_cfg.n_speakers = manifest.at("asv").at("n_speakers").get<int>();
  asv_cfg.proto_scale_init =
      manifest.at("asv").at("proto_scale_init").get<double>();
  asv_cfg.proto_scale_min =
      manifest.at("asv").at("proto_scale_min").get<double>();

  CmConfig cm_cfg;
  cm_cfg.encoder = EncoderFromJson(manifest.at("cm").at("encoder"));
  cm_cfg.hidden_dim = manifest.at("cm").at("hidden_dim").get<int>();
  cm_cfg.embed_dim = manifest.at("cm").at("embed_dim").get<int>();

  BackendConfig be_cfg;
  const auto& bj = manifest.at("backend");
  for (int i = 0; i < 3; ++i) {
    be_cfg.channels[static_cast<std::size_t>(i)] =
        bj.at("channels").at(static_cast<std::size_t>(i)).get<int>();
  }
  be_cfg.kernel = bj.at("kernel").get<int>();
  be_cfg.pool_len = bj.at("pool_len").get<int>();
  be_cfg.hidden_dim = bj.at("hidden_dim").get<int>();
  be_cfg.final_dim = bj.at("final_dim").get<int>();
  be_cfg.alpha = bj.at("alpha").get<double>();
  be_cfg.m_pos = bj.at("m_pos").get<double>();
  be_cfg.m_neg = bj.at("m_neg").get<double>();

  ModelBundle bundle;
  bundle.asv = AsvModel(asv_cfg, Rng(0));
  bundle.cm = CmModel(cm_cfg, Rng(0));
  bundle.backend = BackendModel(be_cfg, Rng(0));
  const auto& ckpts = manifest.at("checkpoints");
  LoadTensors(bundle.asv.Params(),
              (root / ckpts.at("asv").get<std::string>()).string());
  LoadTensors(bundle.cm.Params(),
              (root / ckpts.at("cm").get<std::string>()).string());
  LoadTensors(bundle.backend.Params(),
              (root / ckpts.at("backend").get<std::string>()).string());
  bundle.Validate();
  return bundle;
}

}  // namespace sasv::model
