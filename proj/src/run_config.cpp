#include "dvcm/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

namespace dvcm {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "input",     "output",   "distance", "k",        "R",         "r",
      "threshold", "polyball", "seed",     "threads",  "quality",   "orient",
      "shape",     "shape_params", "n",    "noise_eps", "outliers", "bbox",
      "res",       "margin",   "samples",  "field_out",
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open config file");
  RunConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line.substr(0, line.find('#')));
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected 'key = value'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (!known_keys().count(key)) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown key '" +
                               key + "'");
    }
    if (value.empty()) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty value for '" +
                               key + "'");
    }
    cfg.values[key] = value;
  }
  return cfg;
}

}  // namespace dvcm
