#pragma once

#include <map>
#include <string>

namespace dvcm {

// Flat `key = value` run configuration (# comments, blank lines allowed).
// Unknown keys are rejected at load time; CLI flags override config values.
struct RunConfig {
  std::map<std::string, std::string> values;

  static RunConfig load(const std::string& path);

  bool has(const std::string& key) const { return values.count(key) > 0; }
  const std::string& get(const std::string& key) const { return values.at(key); }
};

}  // namespace dvcm
