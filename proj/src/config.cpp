#include "hrlda/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>

#include "hrlda/error.hpp"

namespace hrlda {

void CorpusConfig::validate() const {
  if (!(alpha > 0.0)) throw DataError("config: alpha must be > 0");
  if (!(eta > 0.0)) throw DataError("config: eta must be > 0");
  if (!(gamma > 0.0 && gamma < 1.0)) throw DataError("config: gamma must lie in (0, 1)");
  if (max_depth && *max_depth < 1) throw DataError("config: max_depth must be a positive integer");
  if (gibbs_iterations < 0) throw DataError("config: gibbs_iterations must be non-negative");
  if (acrp_max_passes < 1) throw DataError("config: acrp_max_passes must be a positive integer");
}

nlohmann::json to_json(const CorpusConfig& config) {
  nlohmann::json j;
  j["alpha"] = config.alpha;
  j["eta"] = config.eta;
  j["gamma"] = config.gamma;
  j["max_depth"] = config.max_depth ? nlohmann::json(*config.max_depth) : nlohmann::json(nullptr);
  j["gibbs_iterations"] = config.gibbs_iterations;
  j["acrp_max_passes"] = config.acrp_max_passes;
  j["rng_seed"] = config.rng_seed;
  return j;
}

CorpusConfig config_from_json(const nlohmann::json& j, CorpusConfig base) {
  if (!j.is_object()) throw DataError("config: expected a JSON object");
  if (j.contains("config") && j["config"].is_object()) return config_from_json(j["config"], base);
  try {
    if (j.contains("alpha")) base.alpha = j["alpha"].get<double>();
    if (j.contains("eta")) base.eta = j["eta"].get<double>();
    if (j.contains("gamma")) base.gamma = j["gamma"].get<double>();
    if (j.contains("max_depth")) {
      if (j["max_depth"].is_null()) {
        base.max_depth.reset();
      } else {
        base.max_depth = j["max_depth"].get<int>();
      }
    }
    if (j.contains("gibbs_iterations")) base.gibbs_iterations = j["gibbs_iterations"].get<int>();
    if (j.contains("acrp_max_passes")) base.acrp_max_passes = j["acrp_max_passes"].get<int>();
    if (j.contains("rng_seed")) base.rng_seed = j["rng_seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  base.validate();
  return base;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Flat `key = value` lines only; values are numbers or quoted strings.
nlohmann::json parse_flat_toml(std::istream& in, const std::string& origin) {
  nlohmann::json j = nlohmann::json::object();
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DataError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      j[key] = nlohmann::json::parse(value);
    } catch (const nlohmann::json::exception&) {
      throw DataError(origin + ":" + std::to_string(line_no) + ": cannot parse value for '" + key + "'");
    }
  }
  return j;
}

}  // namespace

CorpusConfig load_config(const std::filesystem::path& path, CorpusConfig base) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path.string());
  if (path.extension() == ".toml") return config_from_json(parse_flat_toml(in, path.string()), base);
  try {
    return config_from_json(nlohmann::json::parse(in), base);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace hrlda
