#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include <json.hpp>

namespace hrlda {

struct CorpusConfig {
  double alpha = 1.0;   // document-topic Dirichlet prior
  double eta = 0.1;     // topic-relation Dirichlet prior
  double gamma = 0.01;  // ACRP penalty factor
  std::optional<int> max_depth;
  int gibbs_iterations = 2000;
  int acrp_max_passes = 100;
  std::uint64_t rng_seed = 0;

  /// Throws DataError naming the first offending field.
  void validate() const;

  bool operator==(const CorpusConfig&) const = default;
};

nlohmann::json to_json(const CorpusConfig& config);

/// Overlays the keys present in `j` onto `base`. Accepts a run manifest too,
/// in which case its "config" object is used.
CorpusConfig config_from_json(const nlohmann::json& j, CorpusConfig base = {});

/// Reads a JSON file, or a flat `key = value` TOML file when the extension is .toml.
CorpusConfig load_config(const std::filesystem::path& path, CorpusConfig base = {});

}  // namespace hrlda
