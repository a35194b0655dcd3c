#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace ncres::cli {

// Flat key-value job description with [sections], read with CLI11's INI reader.
// Every lookup records the effective value (default or given) so the record can
// echo the complete configuration.
class JobConfig {
 public:
  JobConfig() = default;
  static JobConfig load(const std::string& path);

  std::string base_dir() const { return base_dir_; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string text(const std::string& key, const std::string& def);
  std::string required(const std::string& key);
  double number(const std::string& key, double def);
  int integer(const std::string& key, int def);
  bool flag(const std::string& key, bool def);
  std::vector<double> numbers(const std::string& key, const std::vector<double>& def);
  std::vector<int> integers(const std::string& key, const std::vector<int>& def);
  // path relative to the config file; must exist
  std::string path(const std::string& key);

  std::vector<std::string> keys() const;
  // keys present in the file that nothing asked for
  std::vector<std::string> unused() const;
  const nlohmann::ordered_json& effective() const { return effective_; }

 private:
  void record(const std::string& key, const nlohmann::ordered_json& v);
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
  nlohmann::ordered_json effective_ = nlohmann::ordered_json::object();
  std::string base_dir_ = ".";
};

}  // namespace ncres::cli
