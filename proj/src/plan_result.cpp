#include "ipp/plan_result.hpp"

#include <fstream>
#include <sstream>

#include "ipp/errors.hpp"
#include "json.hpp"

namespace ipp {

using nlohmann::json;

std::string to_json_line(const PlanResult& r) {
  json j;
  j["schema"] = kResultSchemaVersion;
  j["solver"] = r.solver;
  j["path"] = r.path;
  j["cost"] = r.cost;
  j["mi_total"] = r.mi_total;
  j["mi_gain_over_pilot"] = r.mi_gain_over_pilot;
  j["wall_time_s"] = r.wall_time_s;
  j["valid"] = r.valid;
  j["complete"] = r.complete;
  j["seed"] = r.seed;
  j["budget"] = r.budget;
  j["start"] = r.start;
  j["terminal"] = r.terminal;
  j["evaluations"] = r.evaluations;
  j["epoch_rewards"] = r.epoch_rewards;
  j["best_trace"] = r.best_trace;
  j["epoch_valid_fraction"] = r.epoch_valid_fraction;
  j["episodes_to_best"] = r.episodes_to_best;
  return j.dump();
}

PlanResult parse_result_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw LoadError(std::string("malformed result record: ") + e.what());
  }
  if (!j.is_object() || !j.contains("schema")) throw LoadError("result record has no schema field");
  if (j["schema"] != kResultSchemaVersion)
    throw LoadError("unknown result schema version " + j["schema"].dump() + " (expected " +
                    std::to_string(kResultSchemaVersion) + ")");
  PlanResult r;
  try {
    r.solver = j.at("solver").get<std::string>();
    r.path = j.at("path").get<std::vector<VertexId>>();
    r.cost = j.at("cost").get<double>();
    r.mi_total = j.at("mi_total").get<double>();
    r.mi_gain_over_pilot = j.at("mi_gain_over_pilot").get<double>();
    r.wall_time_s = j.at("wall_time_s").get<double>();
    r.valid = j.at("valid").get<bool>();
    r.complete = j.at("complete").get<bool>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.budget = j.at("budget").get<double>();
    r.start = j.at("start").get<VertexId>();
    r.terminal = j.at("terminal").get<VertexId>();
    r.evaluations = j.at("evaluations").get<long long>();
    r.epoch_rewards = j.at("epoch_rewards").get<std::vector<double>>();
    r.best_trace = j.at("best_trace").get<std::vector<double>>();
    r.epoch_valid_fraction = j.at("epoch_valid_fraction").get<std::vector<double>>();
    r.episodes_to_best = j.at("episodes_to_best").get<int>();
  } catch (const json::exception& e) {
    throw LoadError(std::string("bad result record: ") + e.what());
  }
  return r;
}

std::vector<PlanResult> parse_results(std::string_view text) {
  std::vector<PlanResult> out;
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const auto line = text.substr(pos, end - pos);
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      try {
        out.push_back(parse_result_line(line));
      } catch (const LoadError& e) {
        throw LoadError(e.what(), static_cast<int>(line_no));
      }
    }
    pos = end + 1;
  }
  return out;
}

std::vector<PlanResult> load_results_file(const std::string& filename) {
  std::ifstream f(filename);
  if (!f) throw LoadError("cannot open results file '" + filename + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_results(ss.str());
}

}  // namespace ipp
