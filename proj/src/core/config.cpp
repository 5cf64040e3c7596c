// sasv/core/config.cpp

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

#include "sasv/core/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sasv/core/common.hpp"

namespace sasv {

namespace {

std::string Trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool ValidKey(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' ||
          c == '_' || c == '-')) {
      return false;
    }
  }
  return true;
}

std::vector<std::string> SplitCommas(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) out.push_back(Trim(item));
  if (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

}  // namespace

ConfigMap ConfigMap::ParseFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return ParseString(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

ConfigMap ConfigMap::ParseString(const std::string& text) {
  ConfigMap map;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("line " + std::to_string(lineno) +
                       ": expected 'key = value'");
    }
    std::string key = Trim(line.substr(0, eq));
    std::string value = Trim(line.substr(eq + 1));
    if (!ValidKey(key)) {
      throw ParseError("line " + std::to_string(lineno) + ": bad key '" + key +
                       "'");
    }
    map.values_[key] = value;
  }
  return map;
}

std::string ConfigMap::Serialize() const {
  std::string out;
  for (const auto& [key, value] : values_) {
    out += key;
    out += " = ";
    out += value;
    out += "\n";
  }
  return out;
}

void ConfigMap::WriteFile(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write config file: " + path);
  out << Serialize();
}

void ConfigMap::SetInt(const std::string& key, std::int64_t v) {
  values_[key] = std::to_string(v);
}

void ConfigMap::SetReal(const std::string& key, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  values_[key] = buf;
}

std::string ConfigMap::GetStr(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key: " + key);
  return it->second;
}

std::string ConfigMap::GetStr(const std::string& key,
                              const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::int64_t ConfigMap::GetInt(const std::string& key) const {
  const std::string s = GetStr(key);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("config key " + key + ": not an integer: '" + s + "'");
  }
  return v;
}

std::int64_t ConfigMap::GetInt(const std::string& key,
                               std::int64_t fallback) const {
  return Has(key) ? GetInt(key) : fallback;
}

double ConfigMap::GetReal(const std::string& key) const {
  const std::string s = GetStr(key);
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": not a number: '" + s + "'");
  }
}

double ConfigMap::GetReal(const std::string& key, double fallback) const {
  return Has(key) ? GetReal(key) : fallback;
}

bool ConfigMap::GetBool(const std::string& key, bool fallback) const {
  if (!Has(key)) return fallback;
  std::string s = GetStr(key);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("config key " + key + ": not a boolean: '" + s + "'");
}

std::vector<std::int64_t> ConfigMap::GetIntList(const std::string& key) const {
  std::vector<std::int64_t> out;
  for (const std::string& item : SplitCommas(GetStr(key))) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw ConfigError("config key " + key + ": bad integer list item '" +
                        item + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<double> ConfigMap::GetRealList(const std::string& key) const {
  std::vector<double> out;
  for (const std::string& item : SplitCommas(GetStr(key))) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("config key " + key + ": bad number list item '" +
                        item + "'");
    }
  }
  return out;
}

std::vector<std::string> ConfigMap::UnknownKeys(
    const std::vector<std::string>& known) const {
  std::vector<std::string> unknown;
  for (const auto& [key, value] : values_) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      unknown.push_back(key);
    }
  }
  return unknown;
}

}  // namespace sasv
