#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "hrlda/config.hpp"
#include "hrlda/corpus.hpp"
#include "hrlda/rlda.hpp"

namespace hrlda {

/// How a node's unlabeled members were split into its children.
struct NodeSplit {
  std::vector<TokenIndex> tokens;  // rLDA token order (reading order)
  NodeFit fit;
  std::vector<std::size_t> child_topics;  // child i was built from topic child_topics[i]
  std::size_t acrp_k = 0;
  int acrp_passes = 0;
};

struct TopicNode {
  std::vector<int> path;  // child indices from the root
  std::optional<std::string> label;
  int level = 0;
  std::vector<TopicNode> children;
  std::vector<TokenIndex> members;       // this subtree's tokens when the node was created
  std::vector<TokenIndex> label_tokens;  // occurrences of the label phrase
  std::vector<TokenIndex> residual;      // left unsplit by the depth cap
  std::shared_ptr<const NodeSplit> split;

  std::string node_id() const;
};

struct TopicTree {
  TopicNode root;
  std::map<std::string, std::set<std::string>> leaves;  // doc_id -> node ids of leaves holding its tokens
  int depth = 0;
};

struct BuildOptions {
  unsigned threads = 1;
  const SynonymLexicon* lexicon = nullptr;
};

TopicTree build_tree(const Corpus& corpus, const CorpusConfig& config, const BuildOptions& options = {});

struct LabelCandidate {
  std::string phrase;
  double mass = 0.0;  // summed topic-triplet posterior mass of the phrase's triplets
  std::size_t count = 0;
};

/// Highest mass, then higher count, then lexicographically smallest phrase,
/// skipping excluded phrases (falls back to the best excluded one if nothing else is left).
std::string select_topic_label(const std::vector<LabelCandidate>& candidates,
                               const std::set<std::string, std::less<>>& excluded = {});

/// Label candidates for `topic` of a fitted split, over the given member tokens.
std::vector<LabelCandidate> label_candidates(const Corpus& corpus, const NodeSplit& split, std::size_t topic,
                                             const std::vector<TokenIndex>& members);

/// Root-to-node label paths of every node holding a token of the document.
std::vector<std::vector<std::string>> topic_paths(const TopicTree& tree, const Corpus& corpus,
                                                  const std::string& doc_id);

/// Every corpus token sits exactly once as a label token or residual token.
bool tokens_conserved(const TopicTree& tree, std::size_t corpus_size);

/// Level-1 cluster of every token (index into root.children), or nullopt for
/// tokens that never left the root.
std::vector<std::optional<std::size_t>> level1_clusters(const TopicTree& tree, std::size_t corpus_size);

/// Canonical JSON: sorted keys, children in path order.
nlohmann::json tree_to_json(const TopicTree& tree, const Corpus& corpus);
std::string tree_to_string(const TopicTree& tree, const Corpus& corpus);

/// Rebuilds labels and structure (no tokens or fits) from tree_to_json output.
TopicTree tree_from_json(const nlohmann::json& j);

}  // namespace hrlda
