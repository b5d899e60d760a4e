#pragma once

#include <cstddef>
#include <string>

#include <json.hpp>

#include "rldt/config.hpp"

namespace rldt::cli {

// Everything that determines a command's outputs. `--jobs` and `--out` are
// deliberately absent: they never change file contents.
struct RunConfig {
  std::string data;
  std::string schema;
  AgentConfig agent;
  int runs = 10;
  int window = 200;
  std::size_t skip = 0;
  std::size_t terminal = 0;  // 0: last 20% of the stream
  bool ordered = false;      // keep file order instead of shuffling per run
};

nlohmann::ordered_json agent_to_json(const AgentConfig& cfg);
// Overlays the fields present in `j` onto `cfg`.
void agent_from_json(const nlohmann::json& j, AgentConfig& cfg);

nlohmann::ordered_json run_config_to_json(const RunConfig& rc);
void run_config_from_json(const nlohmann::json& j, RunConfig& rc);

// Rounds to 6 decimals so JSON output is fixed-precision text.
double round6(double v);

}  // namespace rldt::cli
