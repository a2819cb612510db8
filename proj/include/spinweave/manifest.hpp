#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "spinweave/version.hpp"

namespace spinweave {

// Record of one CLI run: enough to replay it and regenerate every listed
// artifact byte for byte.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> parameters;
  std::uint64_t rng_seed = 0;
  std::vector<std::string> artifact_paths;
  std::string tool_version = kVersion;
};

inline nlohmann::ordered_json manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["parameters"] = m.parameters;
  j["rng_seed"] = m.rng_seed;
  j["artifact_paths"] = m.artifact_paths;
  j["tool_version"] = m.tool_version;
  return j;
}

inline RunManifest manifest_from_json(const nlohmann::ordered_json& j) {
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.parameters =
      j.at("parameters").get<std::map<std::string, std::string>>();
  m.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  m.artifact_paths = j.at("artifact_paths").get<std::vector<std::string>>();
  m.tool_version = j.at("tool_version").get<std::string>();
  return m;
}

inline void write_manifest(const std::string& path, const RunManifest& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << manifest_to_json(m).dump(2) << "\n";
  if (!out.flush()) throw std::runtime_error("write to '" + path + "' failed");
}

inline RunManifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  nlohmann::ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed manifest '" + path + "': " + e.what());
  }
  return manifest_from_json(j);
}

}  // namespace spinweave
