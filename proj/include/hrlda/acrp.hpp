#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hrlda/config.hpp"
#include "hrlda/corpus.hpp"
#include "hrlda/random.hpp"

namespace hrlda {

/// The per-token attributes ACRP looks at.
struct AcrpToken {
  std::string content;
  std::size_t doc = 0;  // any stable document key
  std::size_t chunk = 0;
  std::size_t sentence = 0;

  static AcrpToken from(const NounPhraseToken& token) {
    return {token.content, token.doc_index, token.chunk_index, token.sentence_index};
  }
};

/// Partition built by sequential ACRP seating. Token positions refer to the
/// token list the state was built for.
class AcrpState {
 public:
  explicit AcrpState(std::size_t token_count = 0) : assignments_(token_count) {}

  std::size_t topic_count() const { return topics_.size(); }
  std::size_t assigned_count() const { return assigned_; }
  std::size_t token_count() const { return assignments_.size(); }
  const std::vector<std::optional<std::size_t>>& assignments() const { return assignments_; }
  const std::vector<std::size_t>& members(std::size_t topic) const { return topics_.at(topic).members; }
  const std::set<std::size_t>& doc_ids(std::size_t topic) const { return topics_.at(topic).docs; }

  /// Seats token `position` at `topic` (== topic_count() opens a new topic).
  void assign(std::size_t position, const AcrpToken& token, std::size_t topic);

  struct Closeness {
    std::size_t min_chunk_gap;
    std::size_t min_sentence_gap;
  };
  /// Minimum |chunk| and |sentence| differences to members in the token's
  /// document; nullopt when the topic holds no member from that document.
  std::optional<Closeness> closeness(std::size_t topic, const AcrpToken& token) const;

  bool has_related_member(std::size_t topic, const std::string& content, const SynonymLexicon* lexicon) const;

  /// Dense topic index per position; every token must be assigned.
  std::vector<std::size_t> dense_assignments() const;

 private:
  struct Topic {
    std::vector<std::size_t> members;
    std::set<std::size_t> docs;
    std::map<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>> locations;  // doc -> (chunk, sentence)
    std::set<std::string, std::less<>> contents;
    std::set<std::string, std::less<>> member_acronyms;
  };
  std::vector<std::optional<std::size_t>> assignments_;
  std::vector<Topic> topics_;
  std::size_t assigned_ = 0;
};

struct AcrpScores {
  std::vector<double> raw;         // k existing topics, then the new topic
  std::vector<double> normalized;  // same layout, sums to 1
};

/// Raw closeness score for an existing topic that shares the candidate's
/// document. min_chunk_gap is clamped to >= 1; the numerator is clamped at 0.
double closeness_score(std::size_t topic_size, std::size_t min_chunk_gap, std::size_t min_sentence_gap,
                       std::size_t n, double gamma);

/// Seating scores for `candidate` given `n` previously seated tokens.
/// Throws InvariantError when n disagrees with the state.
AcrpScores acrp_scores(const AcrpToken& candidate, const AcrpState& state, std::size_t n, double gamma,
                       const SynonymLexicon* lexicon = nullptr);

/// Zero-based index into scores.normalized; the last index is the new topic.
std::size_t sample_assignment(const AcrpScores& scores, Rng& rng);

/// Seats every token in the order given by `order` (positions into `tokens`).
AcrpState acrp_pass(std::span<const AcrpToken> tokens, std::span<const std::size_t> order, double gamma, Rng& rng,
                    const SynonymLexicon* lexicon = nullptr);

/// Reading-order pass.
AcrpState acrp_pass(std::span<const AcrpToken> tokens, double gamma, Rng& rng, const SynonymLexicon* lexicon = nullptr);

struct KEstimate {
  std::size_t k = 0;
  AcrpState init;
  int passes = 0;
};

/// Repeats ACRP passes, shuffling document order (never token order within a
/// document) between passes, until K repeats on consecutive passes or the pass
/// cap is hit. Tokens must be in reading order.
KEstimate estimate_k(std::span<const AcrpToken> tokens, const CorpusConfig& config, Rng& rng,
                     const SynonymLexicon* lexicon = nullptr);

}  // namespace hrlda
