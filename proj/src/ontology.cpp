#include "hrlda/ontology.hpp"

#include <cctype>
#include <deque>
#include <sstream>

#include <json.hpp>

#include "hrlda/error.hpp"
#include "hrlda/triplets.hpp"

namespace hrlda {

namespace {

void collect(const TopicNode& node, const std::optional<std::string>& parent, Ontology& out) {
  std::optional<std::string> here = parent;
  if (node.label) {
    out.classes.insert(*node.label);
    out.provenance.try_emplace(*node.label, node.node_id());
    if (parent) out.subclass_edges.emplace(*node.label, *parent);
    here = node.label;
  }
  for (const auto& child : node.children) collect(child, here, out);
}

}  // namespace

Ontology link_relations(const TopicTree& tree, const Corpus& corpus, const LinkOptions& options, LinkReport* report) {
  Ontology out;
  collect(tree.root, std::nullopt, out);
  LinkReport counts;
  for (const auto& key : corpus.vocabulary().keys()) {
    if (out.classes.contains(key.subject)) {
      out.assertions.insert(key);
      ++counts.attached;
      continue;
    }
    std::optional<std::string> match;
    if (options.synonym_subjects) {
      for (const auto& label : out.classes) {
        if (is_synonym_or_acronym(key.subject, label, options.lexicon)) {
          match = label;
          break;
        }
      }
    }
    if (match) {
      out.assertions.insert(TripletKey{*match, key.verb, key.object});
      ++counts.attached;
    } else {
      ++counts.dropped;
    }
  }
  if (report != nullptr) *report = counts;
  return out;
}

// ---------------------------------------------------------------------------

const std::set<std::string>& TripletGraph::neighbours(const std::string& node) const {
  static const std::set<std::string> none;
  auto it = adjacency_.find(node);
  return it == adjacency_.end() ? none : it->second;
}

void TripletGraph::add(const TripletKey& triplet) {
  nodes_.insert(triplet.subject);
  if (triplet.object.empty()) return;
  nodes_.insert(triplet.object);
  Edge edge = triplet.subject < triplet.object ? Edge{triplet.subject, triplet.object}
                                               : Edge{triplet.object, triplet.subject};
  auto& list = edges_[edge];
  if (std::find(list.begin(), list.end(), triplet) == list.end()) list.push_back(triplet);
  adjacency_[triplet.subject].insert(triplet.object);
  adjacency_[triplet.object].insert(triplet.subject);
}

TripletGraph build_triplet_graph(std::span<const TripletKey> triplets) {
  TripletGraph graph;
  for (const auto& t : triplets) graph.add(t);
  return graph;
}

TripletGraph build_triplet_graph(const Corpus& corpus) { return build_triplet_graph(corpus.vocabulary().keys()); }

PruneResult prune(const TripletGraph& graph, const std::set<std::string>& seeds, std::optional<int> steps) {
  if (seeds.empty()) throw DataError("prune needs at least one seed");
  if (steps && *steps < 0) throw DataError("prune steps must be non-negative");
  std::string missing;
  for (const auto& seed : seeds) {
    if (!graph.contains(seed)) missing += (missing.empty() ? "" : ", ") + seed;
  }
  if (!missing.empty()) throw DataError("seed phrase(s) not in the triplet graph: " + missing);

  PruneResult result;
  result.phrases = seeds;
  std::vector<std::string> frontier(seeds.begin(), seeds.end());
  for (int step = 0; !frontier.empty() && (!steps || step < *steps); ++step) {
    std::vector<std::string> next;
    for (const auto& node : frontier) {
      for (const auto& neighbour : graph.neighbours(node)) {
        if (result.phrases.insert(neighbour).second) next.push_back(neighbour);
      }
    }
    frontier = std::move(next);
  }
  for (const auto& [edge, triplets] : graph.edges()) {
    if (result.phrases.contains(edge.first) && result.phrases.contains(edge.second)) {
      result.triplets.insert(triplets.begin(), triplets.end());
    }
  }
  return result;
}

Corpus prune_corpus(const Corpus& corpus, const PruneResult& kept) {
  return filter_corpus(corpus, [&](const RelationTriplet& t) { return kept.triplets.contains(t.key); });
}

Ontology filter_ontology(const Ontology& ontology, const std::set<std::string>& phrases) {
  Ontology out;
  for (const auto& c : ontology.classes) {
    if (!phrases.contains(c)) continue;
    out.classes.insert(c);
    if (auto it = ontology.provenance.find(c); it != ontology.provenance.end()) out.provenance.insert(*it);
  }
  for (const auto& edge : ontology.subclass_edges) {
    if (phrases.contains(edge.first) && phrases.contains(edge.second)) out.subclass_edges.insert(edge);
  }
  for (const auto& a : ontology.assertions) {
    if (phrases.contains(a.subject) && phrases.contains(a.object)) out.assertions.insert(a);
  }
  return out;
}

// ---------------------------------------------------------------------------

ExportFormat export_format_from_string(std::string_view text) {
  if (text == "json") return ExportFormat::json;
  if (text == "turtle") return ExportFormat::turtle;
  throw DataError("unknown export format '" + std::string(text) + "'");
}

std::string percent_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c) && c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c == '-' || c == '.' || c == '_' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

namespace {

std::string iri(std::string_view label) { return "<" + percent_encode(label) + ">"; }

std::string object_term(const std::string& object) {
  if (is_literal(object)) return nlohmann::json(object).dump();
  return iri(object);
}

}  // namespace

std::string export_ontology(const Ontology& ontology, ExportFormat format) {
  if (format == ExportFormat::json) {
    nlohmann::ordered_json j;
    j["classes"] = nlohmann::ordered_json::array();
    for (const auto& c : ontology.classes) j["classes"].push_back(c);
    j["subclass_edges"] = nlohmann::ordered_json::array();
    for (const auto& [child, parent] : ontology.subclass_edges) j["subclass_edges"].push_back({child, parent});
    j["assertions"] = nlohmann::ordered_json::array();
    for (const auto& a : ontology.assertions) j["assertions"].push_back({a.subject, a.verb, a.object});
    if (!ontology.provenance.empty()) {
      j["provenance"] = nlohmann::ordered_json::object();
      for (const auto& [label, node] : ontology.provenance) j["provenance"][label] = node;
    }
    return j.dump();
  }
  std::ostringstream out;
  for (const auto& c : ontology.classes) out << iri(c) << " a Class .\n";
  for (const auto& [child, parent] : ontology.subclass_edges) out << iri(child) << " subClassOf " << iri(parent) << " .\n";
  for (const auto& a : ontology.assertions) {
    out << iri(a.subject) << ' ' << iri(a.verb) << ' ' << object_term(a.object) << " .\n";
  }
  return out.str();
}

Ontology ontology_from_json(std::string_view text) {
  Ontology out;
  try {
    const auto j = nlohmann::json::parse(text);
    for (const auto& c : j.at("classes")) out.classes.insert(c.get<std::string>());
    for (const auto& e : j.at("subclass_edges")) {
      out.subclass_edges.emplace(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    }
    for (const auto& a : j.at("assertions")) {
      out.assertions.insert({a.at(0).get<std::string>(), a.at(1).get<std::string>(), a.at(2).get<std::string>()});
    }
    if (j.contains("provenance")) {
      for (const auto& [label, node] : j["provenance"].items()) out.provenance[label] = node.get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed ontology JSON: ") + e.what());
  }
  return out;
}

}  // namespace hrlda
