#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hrlda/corpus.hpp"
#include "hrlda/hierarchy.hpp"

namespace hrlda {

struct Ontology {
  std::set<std::string> classes;
  std::set<std::pair<std::string, std::string>> subclass_edges;  // (child, parent)
  std::set<TripletKey> assertions;
  std::map<std::string, std::string> provenance;  // label -> node id

  bool empty() const { return classes.empty() && subclass_edges.empty() && assertions.empty(); }
  bool operator==(const Ontology&) const = default;
};

struct LinkOptions {
  /// Also attach triplets whose subject is a synonym or acronym of a label.
  bool synonym_subjects = false;
  const SynonymLexicon* lexicon = nullptr;
};

struct LinkReport {
  std::size_t attached = 0;
  std::size_t dropped = 0;  // distinct triplets whose subject matched no label
};

Ontology link_relations(const TopicTree& tree, const Corpus& corpus, const LinkOptions& options = {},
                        LinkReport* report = nullptr);

/// Undirected subject-object graph; parallel triplets share one edge.
class TripletGraph {
 public:
  using Edge = std::pair<std::string, std::string>;  // ordered (min, max)

  const std::set<std::string>& nodes() const { return nodes_; }
  const std::map<Edge, std::vector<TripletKey>>& edges() const { return edges_; }
  const std::set<std::string>& neighbours(const std::string& node) const;
  bool contains(const std::string& node) const { return nodes_.contains(node); }

  void add(const TripletKey& triplet);

 private:
  std::set<std::string> nodes_;
  std::map<Edge, std::vector<TripletKey>> edges_;
  std::map<std::string, std::set<std::string>> adjacency_;
};

/// Objects that are empty strings do not become nodes.
TripletGraph build_triplet_graph(std::span<const TripletKey> triplets);
TripletGraph build_triplet_graph(const Corpus& corpus);

struct PruneResult {
  std::set<std::string> phrases;
  std::set<TripletKey> triplets;  // triplets with both endpoints reached
};

/// Breadth-first expansion from the seeds; each step adds every neighbour of
/// the current frontier. `steps` unset means until exhaustion. Throws
/// DataError naming any seed missing from the graph.
PruneResult prune(const TripletGraph& graph, const std::set<std::string>& seeds, std::optional<int> steps);

/// Corpus restricted to the surviving triplets (tokens left without triplets are dropped).
Corpus prune_corpus(const Corpus& corpus, const PruneResult& kept);

/// Post-hoc variant: keeps classes, edges and assertions among reached phrases.
Ontology filter_ontology(const Ontology& ontology, const std::set<std::string>& phrases);

enum class ExportFormat { json, turtle };

ExportFormat export_format_from_string(std::string_view text);
std::string export_ontology(const Ontology& ontology, ExportFormat format);
Ontology ontology_from_json(std::string_view text);

/// Percent-encodes everything except RFC 3986 unreserved characters.
std::string percent_encode(std::string_view text);

}  // namespace hrlda
