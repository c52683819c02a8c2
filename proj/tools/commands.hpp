#pragma once

#include <json.hpp>
#include <string>
#include <vector>

namespace hdmr::cli {

using Json = nlohmann::ordered_json;

/// Command name plus every option value as typed (or its default). Replaying
/// it through `run` repeats the command.
struct RunConfig {
  std::string command;
  Json args = Json::object();

  Json to_json() const;
  std::string dump() const { return to_json().dump(); }
  static RunConfig from_json(const Json& j);
  std::vector<std::string> argv() const;
};

/// Extracts the embedded RunConfig from a model file, JSON report/config, or
/// a CSV artifact with a "# config=" line.
RunConfig read_run_config(const std::string& path);

/// Parses and executes one command line; returns the process exit code.
int run(const std::vector<std::string>& args);

}  // namespace hdmr::cli
