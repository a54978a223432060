#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "hrlda/hierarchy.hpp"
#include "hrlda/ontology.hpp"
#include "hrlda/rlda.hpp"

namespace hrlda {

/// exp(-mean log p) over per-token probabilities. Throws DataError on p <= 0.
double perplexity(std::span<const double> token_probabilities);
double perplexity_from_logs(std::span<const double> token_log_probabilities);

/// Perplexity of a fitted node under its own final assignments.
double node_perplexity(const NodeFit& fit);

struct LevelPerplexity {
  int level = 0;  // level of the nodes that were split
  std::size_t tokens = 0;
  double perplexity = 0.0;
};

/// Token-weighted perplexity of every split, grouped by level.
std::vector<LevelPerplexity> level_perplexities(const TopicTree& tree);
/// Token-weighted over every split in the tree.
double aggregate_perplexity(const TopicTree& tree);

/// Perplexity after each sweep of the root split (index 0 = ACRP initialization),
/// seeded exactly as build_tree seeds the root.
std::vector<double> root_perplexity_trace(const Corpus& corpus, const CorpusConfig& config,
                                          const SynonymLexicon* lexicon = nullptr);

inline constexpr std::string_view kSubclassPredicate = "subclass-of";

using Rule = std::array<std::string, 3>;

struct GoldRuleSet {
  std::set<Rule> rules;
};

/// JSON array of 3-string tuples; every component is normalized on load.
GoldRuleSet load_gold(const std::filesystem::path& path);
GoldRuleSet gold_from_json(std::string_view text);

/// Subclass edges as (child, subclass-of, parent) plus assertions.
std::set<Rule> ontology_rules(const Ontology& ontology);

struct PrfReport {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
};

PrfReport compare_rules(const std::set<Rule>& extracted, const std::set<Rule>& gold);
PrfReport compare_gold(const Ontology& extracted, const GoldRuleSet& gold);

/// Sum over clusters of the largest domain overlap, divided by the token count.
/// Throws DataError if the two maps do not cover the same tokens.
double cluster_purity(const std::map<std::size_t, std::size_t>& assignment,
                      const std::map<std::size_t, std::string>& truth);

}  // namespace hrlda
