#include "job_config.hpp"

#include <filesystem>
#include <sstream>

#include "CLI11.hpp"
#include "ncres/error.hpp"

namespace ncres::cli {

namespace {

double to_number(const std::string& key, const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw InvalidInput("config " + key + ": '" + s + "' is not a number");
  return v;
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> w;
  std::string t;
  while (is >> t) w.push_back(t);
  return w;
}

}  // namespace

JobConfig JobConfig::load(const std::string& path) {
  if (!std::filesystem::exists(path)) throw InvalidInput("config file " + path + " does not exist");
  JobConfig c;
  auto dir = std::filesystem::path(path).parent_path();
  c.base_dir_ = dir.empty() ? "." : dir.string();
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_file(path);
  } catch (const CLI::Error& e) {
    throw InvalidInput("config file " + path + ": " + e.what());
  }
  for (const auto& it : items) {
    if (it.name == "++" || it.name == "--") continue;
    std::string v;
    for (const auto& in : it.inputs) v += (v.empty() ? "" : " ") + in;
    c.values_[it.fullname()] = v;
  }
  return c;
}

void JobConfig::record(const std::string& key, const nlohmann::ordered_json& v) {
  auto dot = key.find('.');
  std::string sec = dot == std::string::npos ? "" : key.substr(0, dot);
  std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
  effective_[sec][name] = v;
  used_.insert(key);
}

std::string JobConfig::text(const std::string& key, const std::string& def) {
  auto it = values_.find(key);
  std::string v = it == values_.end() ? def : it->second;
  record(key, v);
  return v;
}

std::string JobConfig::required(const std::string& key) {
  if (!has(key)) throw InvalidInput("config is missing " + key);
  return text(key, "");
}

double JobConfig::number(const std::string& key, double def) {
  auto it = values_.find(key);
  double v = it == values_.end() ? def : to_number(key, it->second);
  record(key, v);
  return v;
}

int JobConfig::integer(const std::string& key, int def) {
  double v = number(key, def);
  if (v != std::floor(v)) throw InvalidInput("config " + key + " must be an integer");
  record(key, static_cast<int>(v));
  return static_cast<int>(v);
}

bool JobConfig::flag(const std::string& key, bool def) {
  auto it = values_.find(key);
  bool v = def;
  if (it != values_.end()) {
    const std::string& s = it->second;
    if (s == "true" || s == "1" || s == "yes" || s == "on")
      v = true;
    else if (s == "false" || s == "0" || s == "no" || s == "off")
      v = false;
    else
      throw InvalidInput("config " + key + ": '" + s + "' is not a boolean");
  }
  record(key, v);
  return v;
}

std::vector<double> JobConfig::numbers(const std::string& key, const std::vector<double>& def) {
  auto it = values_.find(key);
  std::vector<double> v = def;
  if (it != values_.end()) {
    v.clear();
    for (const auto& w : words(it->second)) v.push_back(to_number(key, w));
  }
  record(key, v);
  return v;
}

std::vector<int> JobConfig::integers(const std::string& key, const std::vector<int>& def) {
  std::vector<double> d(def.begin(), def.end());
  std::vector<int> v;
  for (double x : numbers(key, d)) {
    if (x != std::floor(x)) throw InvalidInput("config " + key + " must hold integers");
    v.push_back(static_cast<int>(x));
  }
  record(key, v);
  return v;
}

std::string JobConfig::path(const std::string& key) {
  std::string rel = required(key);
  std::filesystem::path p(rel);
  if (p.is_relative()) p = std::filesystem::path(base_dir_) / p;
  if (!std::filesystem::exists(p)) throw InvalidInput("config " + key + ": file " + p.string() + " does not exist");
  return p.string();
}

std::vector<std::string> JobConfig::keys() const {
  std::vector<std::string> out;
  for (const auto& kv : values_) out.push_back(kv.first);
  return out;
}

std::vector<std::string> JobConfig::unused() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_)
    if (!used_.count(k)) out.push_back(k);
  return out;
}

}  // namespace ncres::cli
