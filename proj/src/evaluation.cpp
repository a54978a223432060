#include "hrlda/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "hrlda/acrp.hpp"
#include "hrlda/error.hpp"
#include "hrlda/random.hpp"

namespace hrlda {

double perplexity_from_logs(std::span<const double> token_log_probabilities) {
  if (token_log_probabilities.empty()) throw DataError("perplexity of an empty token set");
  double sum = 0.0;
  for (double lp : token_log_probabilities) {
    if (!std::isfinite(lp)) throw DataError("perplexity: token with zero probability");
    sum += lp;
  }
  return std::exp(-sum / static_cast<double>(token_log_probabilities.size()));
}

double perplexity(std::span<const double> token_probabilities) {
  std::vector<double> logs;
  logs.reserve(token_probabilities.size());
  for (double p : token_probabilities) {
    if (!(p > 0.0)) throw DataError("perplexity: token with zero probability");
    logs.push_back(std::log(p));
  }
  return perplexity_from_logs(logs);
}

double node_perplexity(const NodeFit& fit) {
  std::vector<double> logs(fit.state.token_count());
  for (std::size_t t = 0; t < logs.size(); ++t) logs[t] = token_log_probability(fit.state, fit.estimates, t);
  return perplexity_from_logs(logs);
}

namespace {

void accumulate_splits(const TopicNode& node, std::map<int, std::pair<double, std::size_t>>& by_level) {
  if (node.split) {
    const auto& fit = node.split->fit;
    auto& [log_sum, count] = by_level[node.level];
    for (std::size_t t = 0; t < fit.state.token_count(); ++t) log_sum += token_log_probability(fit.state, fit.estimates, t);
    count += fit.state.token_count();
  }
  for (const auto& child : node.children) accumulate_splits(child, by_level);
}

}  // namespace

std::vector<LevelPerplexity> level_perplexities(const TopicTree& tree) {
  std::map<int, std::pair<double, std::size_t>> by_level;
  accumulate_splits(tree.root, by_level);
  std::vector<LevelPerplexity> out;
  for (const auto& [level, entry] : by_level) {
    out.push_back({level, entry.second, std::exp(-entry.first / static_cast<double>(entry.second))});
  }
  return out;
}

double aggregate_perplexity(const TopicTree& tree) {
  std::map<int, std::pair<double, std::size_t>> by_level;
  accumulate_splits(tree.root, by_level);
  double log_sum = 0.0;
  std::size_t count = 0;
  for (const auto& [level, entry] : by_level) {
    log_sum += entry.first;
    count += entry.second;
  }
  if (count == 0) throw DataError("tree has no fitted splits");
  return std::exp(-log_sum / static_cast<double>(count));
}

std::vector<double> root_perplexity_trace(const Corpus& corpus, const CorpusConfig& config,
                                          const SynonymLexicon* lexicon) {
  if (corpus.empty()) throw DataError("perplexity trace of an empty corpus");
  std::vector<AcrpToken> acrp_tokens;
  std::vector<RldaToken> rlda_tokens;
  for (const auto& token : corpus.tokens()) {
    acrp_tokens.push_back(AcrpToken::from(token));
    rlda_tokens.push_back({token.doc_index, token.triplet_ids});
  }
  Rng rng(derive_seed(config.rng_seed, {}));
  const auto estimate = estimate_k(acrp_tokens, config, rng, lexicon);
  const auto init = estimate.init.dense_assignments();
  std::vector<double> trace;
  train_node(rlda_tokens, estimate.k, init, config, rng, [&](int, const GibbsState& state) {
    const auto estimates = posterior_estimates(state, config.alpha, config.eta);
    std::vector<double> logs(state.token_count());
    for (std::size_t t = 0; t < logs.size(); ++t) logs[t] = token_log_probability(state, estimates, t);
    trace.push_back(perplexity_from_logs(logs));
  });
  return trace;
}

// ---------------------------------------------------------------------------

GoldRuleSet gold_from_json(std::string_view text) {
  GoldRuleSet gold;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("gold rules: ") + e.what());
  }
  if (!j.is_array()) throw DataError("gold rules must be a JSON array of 3-string tuples");
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& r = j[i];
    if (!r.is_array() || r.size() != 3 || !r[0].is_string() || !r[1].is_string() || !r[2].is_string()) {
      throw DataError("gold rule " + std::to_string(i) + " is not a 3-string tuple");
    }
    gold.rules.insert({normalize_phrase(r[0].get<std::string>()), normalize_phrase(r[1].get<std::string>()),
                       normalize_phrase(r[2].get<std::string>())});
  }
  return gold;
}

GoldRuleSet load_gold(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open gold rules file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return gold_from_json(buffer.str());
}

std::set<Rule> ontology_rules(const Ontology& ontology) {
  std::set<Rule> rules;
  for (const auto& [child, parent] : ontology.subclass_edges) rules.insert({child, std::string(kSubclassPredicate), parent});
  for (const auto& a : ontology.assertions) rules.insert({a.subject, a.verb, a.object});
  return rules;
}

PrfReport compare_rules(const std::set<Rule>& extracted, const std::set<Rule>& gold) {
  std::vector<Rule> common;
  std::set_intersection(extracted.begin(), extracted.end(), gold.begin(), gold.end(), std::back_inserter(common));
  PrfReport r;
  r.true_positives = common.size();
  r.false_positives = extracted.size() - common.size();
  r.false_negatives = gold.size() - common.size();
  auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  r.precision = ratio(r.true_positives, r.true_positives + r.false_positives);
  r.recall = ratio(r.true_positives, r.true_positives + r.false_negatives);
  r.f_measure = r.precision + r.recall == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

PrfReport compare_gold(const Ontology& extracted, const GoldRuleSet& gold) {
  return compare_rules(ontology_rules(extracted), gold.rules);
}

double cluster_purity(const std::map<std::size_t, std::size_t>& assignment,
                      const std::map<std::size_t, std::string>& truth) {
  if (assignment.size() != truth.size()) throw DataError("cluster purity: assignment and truth cover different tokens");
  if (assignment.empty()) throw DataError("cluster purity of an empty token set");
  std::map<std::size_t, std::map<std::string, std::size_t>> overlap;
  for (const auto& [token, cluster] : assignment) {
    auto it = truth.find(token);
    if (it == truth.end()) throw DataError("cluster purity: token " + std::to_string(token) + " has no domain");
    ++overlap[cluster][it->second];
  }
  std::size_t hits = 0;
  for (const auto& [cluster, domains] : overlap) {
    std::size_t best = 0;
    for (const auto& [domain, count] : domains) best = std::max(best, count);
    hits += best;
  }
  return static_cast<double>(hits) / static_cast<double>(assignment.size());
}

}  // namespace hrlda
