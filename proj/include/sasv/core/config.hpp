// sasv/core/config.hpp

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
#include <string>
#include <vector>

namespace sasv {

// Flat key-value configuration.  One `key = value` pair per line, `#` starts
// a comment, keys use dotted section prefixes (e.g. "corpus.base.seed").
// Serialisation is sorted by key so a written snapshot reparses to an equal
// map.
class ConfigMap {
 public:
  ConfigMap() = default;

  static ConfigMap ParseFile(const std::string& path);
  static ConfigMap ParseString(const std::string& text);

  std::string Serialize() const;
  void WriteFile(const std::string& path) const;

  bool Has(const std::string& key) const { return values_.count(key) > 0; }
  void Set(const std::string& key, const std::string& value) {
    values_[key] = value;
  }
  void SetInt(const std::string& key, std::int64_t v);
  void SetReal(const std::string& key, double v);

  // Typed getters throw ConfigError on missing keys or unparseable values.
  std::string GetStr(const std::string& key) const;
  std::string GetStr(const std::string& key, const std::string& fallback) const;
  std::int64_t GetInt(const std::string& key) const;
  std::int64_t GetInt(const std::string& key, std::int64_t fallback) const;
  double GetReal(const std::string& key) const;
  double GetReal(const std::string& key, double fallback) const;
  bool GetBool(const std::string& key, bool fallback) const;
  std::vector<std::int64_t> GetIntList(const std::string& key) const;
  std::vector<double> GetRealList(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

  // Keys present in the map but absent from `known`; used to reject typos.
  std::vector<std::string> UnknownKeys(
      const std::vector<std::string>& known) const;

  bool operator==(const ConfigMap& other) const {
    return values_ == other.values_;
  }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace sasv
