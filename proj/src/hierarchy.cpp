#include "hrlda/hierarchy.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <tuple>

#include "hrlda/acrp.hpp"
#include "hrlda/error.hpp"
#include "hrlda/random.hpp"

namespace hrlda {

std::string TopicNode::node_id() const {
  std::string id;
  for (int step : path) {
    if (!id.empty()) id.push_back('.');
    id += std::to_string(step);
  }
  return id;
}

std::string select_topic_label(const std::vector<LabelCandidate>& candidates,
                               const std::set<std::string, std::less<>>& excluded) {
  if (candidates.empty()) throw InvariantError("select_topic_label on an empty topic");
  auto better = [](const LabelCandidate& a, const LabelCandidate& b) {
    if (a.mass != b.mass) return a.mass > b.mass;
    if (a.count != b.count) return a.count > b.count;
    return a.phrase < b.phrase;
  };
  const LabelCandidate* best = nullptr;
  const LabelCandidate* best_excluded = nullptr;
  for (const auto& c : candidates) {
    const LabelCandidate*& slot = excluded.contains(c.phrase) ? best_excluded : best;
    if (slot == nullptr || better(c, *slot)) slot = &c;
  }
  return best != nullptr ? best->phrase : best_excluded->phrase;
}

std::vector<LabelCandidate> label_candidates(const Corpus& corpus, const NodeSplit& split, std::size_t topic,
                                             const std::vector<TokenIndex>& members) {
  const auto& state = split.fit.state;
  const auto& beta = split.fit.estimates.beta.at(topic);
  std::map<TripletId, std::uint32_t> local;
  for (std::uint32_t w = 0; w < state.vocabulary().size(); ++w) local.emplace(state.vocabulary()[w], w);

  std::map<std::string, std::pair<std::set<std::uint32_t>, std::size_t>> by_phrase;
  for (TokenIndex t : members) {
    const auto& token = corpus.token(t);
    auto& [words, count] = by_phrase[token.content];
    ++count;
    for (TripletId id : token.triplet_ids) {
      if (auto it = local.find(id); it != local.end()) words.insert(it->second);
    }
  }
  std::vector<LabelCandidate> out;
  for (const auto& [phrase, entry] : by_phrase) {
    double mass = 0.0;
    for (std::uint32_t w : entry.first) mass += beta[w];
    out.push_back({phrase, mass, entry.second});
  }
  return out;
}

namespace {

struct ChildSpec {
  std::string label;
  std::vector<TokenIndex> members;
  std::vector<TokenIndex> label_tokens;
  std::vector<TokenIndex> pending;
};

struct Expansion {
  std::vector<ChildSpec> children;
  std::vector<TokenIndex> residual;
  std::shared_ptr<const NodeSplit> split;
};

struct Job {
  TopicNode* node;
  std::vector<TokenIndex> pending;  // members not yet labeled, reading order
  std::set<std::string, std::less<>> ancestors;
};

ChildSpec make_child(const Corpus& corpus, std::string label, std::vector<TokenIndex> members) {
  ChildSpec child;
  child.label = std::move(label);
  for (TokenIndex t : members) {
    (corpus.token(t).content == child.label ? child.label_tokens : child.pending).push_back(t);
  }
  child.members = std::move(members);
  return child;
}

Expansion expand(const Corpus& corpus, const CorpusConfig& config, const BuildOptions& options, const Job& job) {
  Expansion out;
  const auto& tokens = job.pending;
  if (tokens.empty()) return out;
  if (config.max_depth && job.node->level >= *config.max_depth) {
    out.residual = tokens;
    return out;
  }

  std::set<std::string, std::less<>> distinct;
  for (TokenIndex t : tokens) distinct.insert(corpus.token(t).content);
  if (distinct.size() == 1) {
    out.children.push_back(make_child(corpus, *distinct.begin(), tokens));
    return out;
  }

  Rng rng(derive_seed(config.rng_seed, job.node->path));
  std::vector<AcrpToken> acrp_tokens;
  std::vector<RldaToken> rlda_tokens;
  acrp_tokens.reserve(tokens.size());
  rlda_tokens.reserve(tokens.size());
  for (TokenIndex t : tokens) {
    const auto& token = corpus.token(t);
    acrp_tokens.push_back(AcrpToken::from(token));
    rlda_tokens.push_back({token.doc_index, token.triplet_ids});
  }
  auto estimate = estimate_k(acrp_tokens, config, rng, options.lexicon);
  const auto init = estimate.init.dense_assignments();
  CorpusConfig node_config = config;
  if (estimate.k == 1) node_config.gibbs_iterations = 0;  // a single topic has nothing to resample
  auto split = std::make_shared<NodeSplit>(
      NodeSplit{tokens, train_node(rlda_tokens, estimate.k, init, node_config, rng), {}, estimate.k, estimate.passes});

  // Every occurrence of a phrase follows the topic holding most of its
  // occurrences (lowest topic on ties), so a phrase labels at most one branch.
  std::map<std::string, std::vector<std::size_t>, std::less<>> phrase_topics;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto& counts = phrase_topics[corpus.token(tokens[i]).content];
    counts.resize(estimate.k, 0);
    ++counts[split->fit.state.topic_of(i)];
  }
  std::vector<std::vector<TokenIndex>> groups(estimate.k);
  for (TokenIndex t : tokens) {
    const auto& counts = phrase_topics.at(corpus.token(t).content);
    const auto topic = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    groups[topic].push_back(t);
  }

  for (std::size_t k = 0; k < groups.size(); ++k) {
    if (groups[k].empty()) continue;
    const auto candidates = label_candidates(corpus, *split, k, groups[k]);
    split->child_topics.push_back(k);
    out.children.push_back(make_child(corpus, select_topic_label(candidates, job.ancestors), std::move(groups[k])));
  }
  out.split = std::move(split);
  return out;
}

void collect_leaves(const TopicNode& node, const Corpus& corpus, TopicTree& tree) {
  tree.depth = std::max(tree.depth, node.level);
  if (node.children.empty() && node.label) {
    for (TokenIndex t : node.label_tokens) tree.leaves[corpus.token(t).doc_id].insert(node.node_id());
  }
  if (node.children.empty()) {
    for (TokenIndex t : node.residual) tree.leaves[corpus.token(t).doc_id].insert(node.node_id());
  }
  for (const auto& child : node.children) collect_leaves(child, corpus, tree);
}

}  // namespace

TopicTree build_tree(const Corpus& corpus, const CorpusConfig& config, const BuildOptions& options) {
  config.validate();
  TopicTree tree;
  tree.root.level = 0;
  tree.root.members.resize(corpus.size());
  for (TokenIndex t = 0; t < corpus.size(); ++t) tree.root.members[t] = t;

  std::vector<Job> frontier;
  if (!corpus.empty()) frontier.push_back({&tree.root, tree.root.members, {}});

  while (!frontier.empty()) {
    std::vector<Expansion> results(frontier.size());
    const unsigned workers = std::max(1U, std::min<unsigned>(options.threads, static_cast<unsigned>(frontier.size())));
    if (workers == 1) {
      for (std::size_t i = 0; i < frontier.size(); ++i) results[i] = expand(corpus, config, options, frontier[i]);
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::exception_ptr> errors(frontier.size());
      {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
          pool.emplace_back([&] {
            for (std::size_t i = next++; i < frontier.size(); i = next++) {
              try {
                results[i] = expand(corpus, config, options, frontier[i]);
              } catch (...) {
                errors[i] = std::current_exception();
              }
            }
          });
        }
      }
      for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }

    // Single-writer merge, in frontier order.
    std::vector<Job> next_frontier;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      TopicNode& parent = *frontier[i].node;
      Expansion& result = results[i];
      parent.residual = std::move(result.residual);
      parent.split = std::move(result.split);
      parent.children.reserve(result.children.size());
      for (std::size_t c = 0; c < result.children.size(); ++c) {
        ChildSpec& spec = result.children[c];
        TopicNode child;
        child.path = parent.path;
        child.path.push_back(static_cast<int>(c));
        child.level = parent.level + 1;
        child.label = spec.label;
        child.members = std::move(spec.members);
        child.label_tokens = std::move(spec.label_tokens);
        parent.children.push_back(std::move(child));
      }
      for (std::size_t c = 0; c < result.children.size(); ++c) {
        if (result.children[c].pending.empty()) continue;
        auto ancestors = frontier[i].ancestors;
        ancestors.insert(result.children[c].label);
        next_frontier.push_back({&parent.children[c], std::move(result.children[c].pending), std::move(ancestors)});
      }
    }
    frontier = std::move(next_frontier);
  }

  collect_leaves(tree.root, corpus, tree);
  return tree;
}

// ---------------------------------------------------------------------------

namespace {

template <typename Visit>
void walk(const TopicNode& node, std::vector<std::string>& labels, Visit&& visit) {
  if (node.label) labels.push_back(*node.label);
  visit(node, labels);
  for (const auto& child : node.children) walk(child, labels, visit);
  if (node.label) labels.pop_back();
}

}  // namespace

std::vector<std::vector<std::string>> topic_paths(const TopicTree& tree, const Corpus& corpus,
                                                  const std::string& doc_id) {
  corpus.document_index(doc_id);  // throws on unknown ids
  std::vector<std::vector<std::string>> paths;
  std::vector<std::string> labels;
  walk(tree.root, labels, [&](const TopicNode& node, const std::vector<std::string>& current) {
    auto holds = [&](const std::vector<TokenIndex>& list) {
      return std::any_of(list.begin(), list.end(), [&](TokenIndex t) { return corpus.token(t).doc_id == doc_id; });
    };
    if (holds(node.label_tokens) || holds(node.residual)) paths.push_back(current);
  });
  return paths;
}

bool tokens_conserved(const TopicTree& tree, std::size_t corpus_size) {
  std::vector<int> seen(corpus_size, 0);
  bool ok = true;
  std::vector<std::string> labels;
  walk(tree.root, labels, [&](const TopicNode& node, const std::vector<std::string>&) {
    for (const auto* list : {&node.label_tokens, &node.residual}) {
      for (TokenIndex t : *list) {
        if (t >= corpus_size) {
          ok = false;
        } else {
          ++seen[t];
        }
      }
    }
  });
  return ok && std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
}

std::vector<std::optional<std::size_t>> level1_clusters(const TopicTree& tree, std::size_t corpus_size) {
  std::vector<std::optional<std::size_t>> out(corpus_size);
  for (std::size_t c = 0; c < tree.root.children.size(); ++c) {
    for (TokenIndex t : tree.root.children[c].members) out.at(t) = c;
  }
  return out;
}

namespace {

using nlohmann::json;

std::vector<std::string> distinct_phrases(const Corpus& corpus, const std::vector<TokenIndex>& tokens) {
  std::set<std::string> phrases;
  for (TokenIndex t : tokens) phrases.insert(corpus.token(t).content);
  return {phrases.begin(), phrases.end()};
}

json split_to_json(const NodeSplit& split, const Corpus& corpus) {
  constexpr std::size_t kTop = 5;
  const auto& state = split.fit.state;
  json topics = json::array();
  for (std::size_t topic : split.child_topics) {
    const auto& beta = split.fit.estimates.beta[topic];
    std::vector<std::uint32_t> order(beta.size());
    for (std::uint32_t w = 0; w < order.size(); ++w) order[w] = w;
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      if (beta[a] != beta[b]) return beta[a] > beta[b];
      return corpus.vocabulary().at(state.vocabulary()[a]) < corpus.vocabulary().at(state.vocabulary()[b]);
    });
    json top = json::array();
    for (std::size_t i = 0; i < std::min(kTop, order.size()); ++i) {
      const auto& key = corpus.vocabulary().at(state.vocabulary()[order[i]]);
      top.push_back({{"subject", key.subject}, {"verb", key.verb}, {"object", key.object}, {"beta", beta[order[i]]}});
    }
    topics.push_back({{"topic", topic}, {"tokens", state.topic_tokens(topic)}, {"top_triplets", std::move(top)}});
  }
  return {{"k", split.acrp_k}, {"acrp_passes", split.acrp_passes}, {"topics", std::move(topics)}};
}

json node_to_json(const TopicNode& node, const Corpus& corpus) {
  json j;
  j["node_id"] = node.node_id();
  j["label"] = node.label ? json(*node.label) : json(nullptr);
  j["level"] = node.level;
  j["label_count"] = node.label_tokens.size();
  j["members"] = distinct_phrases(corpus, node.members);
  j["residual"] = distinct_phrases(corpus, node.residual);
  j["split"] = node.split ? split_to_json(*node.split, corpus) : json(nullptr);
  json children = json::array();
  for (const auto& child : node.children) children.push_back(node_to_json(child, corpus));
  j["children"] = std::move(children);
  return j;
}

void node_from_json(const json& j, TopicNode& node, std::vector<int> path) {
  node.path = std::move(path);
  node.level = j.at("level").get<int>();
  if (!j.at("label").is_null()) node.label = j.at("label").get<std::string>();
  const auto& children = j.at("children");
  node.children.resize(children.size());
  for (std::size_t c = 0; c < children.size(); ++c) {
    auto child_path = node.path;
    child_path.push_back(static_cast<int>(c));
    node_from_json(children[c], node.children[c], std::move(child_path));
  }
}

int max_level(const TopicNode& node) {
  int depth = node.level;
  for (const auto& child : node.children) depth = std::max(depth, max_level(child));
  return depth;
}

}  // namespace

json tree_to_json(const TopicTree& tree, const Corpus& corpus) {
  json leaves = json::object();
  for (const auto& [doc, ids] : tree.leaves) leaves[doc] = std::vector<std::string>(ids.begin(), ids.end());
  return {{"depth", tree.depth}, {"leaves", std::move(leaves)}, {"root", node_to_json(tree.root, corpus)}};
}

std::string tree_to_string(const TopicTree& tree, const Corpus& corpus) {
  return tree_to_json(tree, corpus).dump(1) + "\n";
}

TopicTree tree_from_json(const json& j) {
  TopicTree tree;
  try {
    node_from_json(j.at("root"), tree.root, {});
    for (const auto& [doc, ids] : j.at("leaves").items()) {
      for (const auto& id : ids) tree.leaves[doc].insert(id.get<std::string>());
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed tree JSON: ") + e.what());
  }
  tree.depth = max_level(tree.root);
  return tree;
}

}  // namespace hrlda
