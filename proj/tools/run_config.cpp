#include "run_config.hpp"

#include <cmath>
#include <stdexcept>

namespace rldt::cli {

using nlohmann::json;
using nlohmann::ordered_json;

double round6(double v) {
  const double r = std::round(v * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;  // no "-0.0"
}

ordered_json agent_to_json(const AgentConfig& cfg) {
  ordered_json j;
  j["gamma"] = cfg.gamma;
  j["r_plus"] = cfg.r_plus;
  j["r_minus"] = cfg.r_minus;
  j["query_costs"] = cfg.query_costs;
  j["epsilon"] = cfg.epsilon;
  j["alpha"] = cfg.alpha;
  j["q_optimistic"] = cfg.q_optimistic;
  j["r_init"] = cfg.r_init;
  j["max_queries"] = cfg.max_queries;
  j["update_mode"] = update_mode_name(cfg.update_mode, cfg.num_paths);
  j["truncated_exploration"] = cfg.truncated_exploration;
  j["seed"] = cfg.seed;
  return j;
}

void agent_from_json(const json& j, AgentConfig& cfg) {
  if (!j.is_object()) throw std::invalid_argument("config: agent must be an object");
  auto list = [&](const char* key, std::vector<double>& out) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    out = v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
  };
  if (j.contains("gamma")) cfg.gamma = j.at("gamma").get<double>();
  list("r_plus", cfg.r_plus);
  list("r_minus", cfg.r_minus);
  list("query_costs", cfg.query_costs);
  if (j.contains("epsilon")) cfg.epsilon = j.at("epsilon").get<double>();
  list("alpha", cfg.alpha);
  if (j.contains("q_optimistic")) cfg.q_optimistic = j.at("q_optimistic").get<double>();
  if (j.contains("r_init")) cfg.r_init = j.at("r_init").get<double>();
  if (j.contains("max_queries")) cfg.max_queries = j.at("max_queries").get<int>();
  if (j.contains("update_mode")) {
    parse_update_mode(j.at("update_mode").get<std::string>(), cfg.update_mode, cfg.num_paths);
  }
  if (j.contains("truncated_exploration")) {
    cfg.truncated_exploration = j.at("truncated_exploration").get<bool>();
  }
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
}

ordered_json run_config_to_json(const RunConfig& rc) {
  ordered_json j;
  j["data"] = rc.data;
  j["schema"] = rc.schema;
  j["agent"] = agent_to_json(rc.agent);
  j["runs"] = rc.runs;
  j["window"] = rc.window;
  j["skip"] = rc.skip;
  j["terminal"] = rc.terminal;
  j["ordered"] = rc.ordered;
  return j;
}

void run_config_from_json(const json& j, RunConfig& rc) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  if (j.contains("data")) rc.data = j.at("data").get<std::string>();
  if (j.contains("schema")) rc.schema = j.at("schema").get<std::string>();
  if (j.contains("agent")) agent_from_json(j.at("agent"), rc.agent);
  if (j.contains("runs")) rc.runs = j.at("runs").get<int>();
  if (j.contains("window")) rc.window = j.at("window").get<int>();
  if (j.contains("skip")) rc.skip = j.at("skip").get<std::size_t>();
  if (j.contains("terminal")) rc.terminal = j.at("terminal").get<std::size_t>();
  if (j.contains("ordered")) rc.ordered = j.at("ordered").get<bool>();
}

}  // namespace rldt::cli
