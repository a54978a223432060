#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hrlda/corpus.hpp"

namespace hrlda {

/// Predicate used for every indentation-derived relation.
inline constexpr std::string_view kSubtopicPredicate = "be a subtopic of";

struct ItemizedLine {
  int indent_level = 0;
  std::string text;

  bool operator==(const ItemizedLine&) const = default;
};

struct ItemizedDoc {
  std::string doc_id;
  std::vector<ItemizedLine> lines;
};

/// One indent level per leading tab, or per `spaces_per_level` leading spaces.
/// Blank lines and leading bullet glyphs (- * + o and the UTF-8 bullets) are dropped.
ItemizedDoc parse_itemized(std::istream& in, std::string doc_id, int spaces_per_level = 2);

struct StructuralExtraction {
  std::vector<RelationTriplet> triplets;  // input line order
  Corpus document;                        // one document, one chunk, one sentence per kept line
};

/// Each line is linked to the nearest preceding line with a smaller indent level.
StructuralExtraction extract_structural_triplets(const ItemizedDoc& doc);

struct PatternOptions {
  std::set<std::string, std::less<>> titles = default_titles();
  static std::set<std::string, std::less<>> default_titles();
};

/// Shallow surface patterns: `X <verb> Y` over a closed verb list, and
/// `<Title> <ProperName>` for titles in the lexicon.
std::vector<RelationTriplet> extract_pattern_triplets(std::string_view sentence, const PatternOptions& options = {},
                                                      const std::string& doc_id = {});

/// Literal objects (empty or numeric) cannot become subjects.
bool is_literal(std::string_view object);

/// (s, v, o) -> (o, "be <participle of v> by", s). Throws DataError for
/// copula verbs and literal objects.
RelationTriplet passive_inverse(const RelationTriplet& triplet);

/// Past participle for the closed verb table, "-ed" rule otherwise.
std::string past_participle(std::string_view verb_lemma);

/// Corpus built from sentences (one chunk, one sentence per input line), one
/// token per distinct subject in each sentence. With `with_passive`, passive
/// inversions of invertible triplets are attached to their new subjects.
Corpus pattern_document(const std::vector<std::string>& sentences, const std::string& doc_id,
                        const PatternOptions& options = {}, bool with_passive = false);

}  // namespace hrlda
