#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hrlda/config.hpp"

namespace hrlda {

using TripletId = std::uint32_t;
using TokenIndex = std::size_t;

/// Lowercase, collapse whitespace, strip leading/trailing ASCII punctuation.
/// Idempotent; bytes >= 0x80 are left untouched.
std::string normalize_phrase(std::string_view raw);

/// Identity of a relation triplet: the normalized (subject, verb, object) tuple.
struct TripletKey {
  std::string subject;
  std::string verb;
  std::string object;

  auto operator<=>(const TripletKey&) const = default;
  bool operator==(const TripletKey&) const = default;
};

struct TripletKeyHash {
  std::size_t operator()(const TripletKey& key) const noexcept;
};

enum class TripletSource { ingested, structural, pattern, passive_inverse };

std::string_view to_string(TripletSource source);
TripletSource triplet_source_from_string(std::string_view text);

struct RelationTriplet {
  TripletKey key;
  TripletSource source = TripletSource::ingested;
  std::string doc_id;

  const std::string& subject() const { return key.subject; }
  const std::string& verb() const { return key.verb; }
  const std::string& object() const { return key.object; }

  bool operator==(const RelationTriplet&) const = default;
};

/// Builds a triplet with normalized fields. Throws DataError if subject or verb
/// normalizes to empty.
RelationTriplet make_triplet(std::string_view subject, std::string_view verb, std::string_view object,
                             TripletSource source = TripletSource::ingested, std::string doc_id = {});

struct NounPhraseToken {
  std::string content;  // normalized
  std::string raw;
  std::string doc_id;
  std::size_t doc_index = 0;
  std::size_t chunk_index = 0;
  std::size_t sentence_index = 0;  // within the chunk
  std::vector<RelationTriplet> triplets;
  std::vector<TripletId> triplet_ids;  // parallel to `triplets`

  bool operator==(const NounPhraseToken&) const = default;
};

/// Chunks -> sentences -> token indices into Corpus::tokens.
struct Document {
  std::string doc_id;
  std::vector<std::vector<std::vector<TokenIndex>>> chunks;

  std::size_t token_count() const;
  bool operator==(const Document&) const = default;
};

/// Dense bijection between triplet tuples and ids 0..W-1, in first-seen order.
class Vocabulary {
 public:
  TripletId intern(const TripletKey& key);
  std::optional<TripletId> find(const TripletKey& key) const;
  const TripletKey& at(TripletId id) const { return keys_.at(id); }
  std::size_t size() const { return keys_.size(); }
  const std::vector<TripletKey>& keys() const { return keys_; }

  bool operator==(const Vocabulary& other) const { return keys_ == other.keys_; }

 private:
  std::vector<TripletKey> keys_;
  std::unordered_map<TripletKey, TripletId, TripletKeyHash> ids_;
};

/// Immutable after construction. Tokens are stored flat in reading order
/// (document, chunk, sentence, position).
class Corpus {
 public:
  Corpus() = default;

  const std::vector<Document>& documents() const { return documents_; }
  const std::vector<NounPhraseToken>& tokens() const { return tokens_; }
  const NounPhraseToken& token(TokenIndex i) const { return tokens_.at(i); }
  const Vocabulary& vocabulary() const { return vocabulary_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }

  /// Index of the document with this id, or throws DataError.
  std::size_t document_index(std::string_view doc_id) const;

  bool operator==(const Corpus& other) const {
    return documents_ == other.documents_ && tokens_ == other.tokens_ && vocabulary_ == other.vocabulary_;
  }

  friend class CorpusBuilder;

 private:
  std::vector<Document> documents_;
  std::vector<NounPhraseToken> tokens_;
  Vocabulary vocabulary_;
};

/// Incremental construction of a Corpus in reading order.
class CorpusBuilder {
 public:
  /// Starts a new document; throws DataError on a duplicate id.
  void begin_document(std::string doc_id);
  void begin_chunk();
  void begin_sentence();
  /// Appends a token to the current sentence. Throws DataError on an empty
  /// triplet list.
  void add_token(std::string_view raw, std::vector<RelationTriplet> triplets);

  Corpus finish() &&;

 private:
  Corpus corpus_;
  std::set<std::string, std::less<>> seen_ids_;
};

/// Parses the JSONL corpus format. `origin` prefixes diagnostics.
Corpus parse_corpus(std::istream& in, const std::string& origin = "<stream>");
Corpus load_corpus(const std::filesystem::path& path, const CorpusConfig& config = {});

/// Canonical JSONL (sorted keys), one document per line.
void write_corpus(std::ostream& out, const Corpus& corpus);
std::string corpus_to_jsonl(const Corpus& corpus);

/// Builds a corpus keeping only tokens accepted by `keep_triplet` on at least one
/// of their triplets; rejected triplets are dropped from surviving tokens.
/// Empty sentences, chunks and documents are removed.
template <typename Pred>
Corpus filter_corpus(const Corpus& corpus, Pred keep_triplet);

/// Symmetric user-supplied synonym table (not transitive).
class SynonymLexicon {
 public:
  SynonymLexicon() = default;
  void add(std::string_view a, std::string_view b);
  bool related(std::string_view a, std::string_view b) const;
  /// Synonyms of `phrase`, empty when none.
  const std::set<std::string, std::less<>>& synonyms(std::string_view phrase) const;
  bool empty() const { return table_.empty(); }

 private:
  std::map<std::string, std::set<std::string, std::less<>>, std::less<>> table_;
};

/// JSON array of string pairs.
SynonymLexicon load_lexicon(const std::filesystem::path& path);

/// Concatenated first letters of the words of a phrase with at least two
/// words; empty otherwise.
std::string acronym_of(std::string_view phrase);

bool is_synonym_or_acronym(std::string_view a, std::string_view b, const SynonymLexicon* lexicon = nullptr);

// ---------------------------------------------------------------------------

template <typename Pred>
Corpus filter_corpus(const Corpus& corpus, Pred keep_triplet) {
  CorpusBuilder builder;
  for (const auto& doc : corpus.documents()) {
    bool doc_open = false;
    for (const auto& chunk : doc.chunks) {
      bool chunk_open = false;
      for (const auto& sentence : chunk) {
        bool sentence_open = false;
        for (TokenIndex t : sentence) {
          const auto& token = corpus.token(t);
          std::vector<RelationTriplet> kept;
          for (const auto& triplet : token.triplets) {
            if (keep_triplet(triplet)) kept.push_back(triplet);
          }
          if (kept.empty()) continue;
          if (!doc_open) {
            builder.begin_document(doc.doc_id);
            doc_open = true;
          }
          if (!chunk_open) {
            builder.begin_chunk();
            chunk_open = true;
          }
          if (!sentence_open) {
            builder.begin_sentence();
            sentence_open = true;
          }
          builder.add_token(token.raw, std::move(kept));
        }
      }
    }
  }
  return std::move(builder).finish();
}

}  // namespace hrlda
