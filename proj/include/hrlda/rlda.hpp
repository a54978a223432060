#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hrlda/config.hpp"
#include "hrlda/corpus.hpp"
#include "hrlda/random.hpp"

namespace hrlda {

/// One rLDA observation: a noun-phrase occurrence and the relation triplets it
/// emits. All of a token's triplets share its topic.
struct RldaToken {
  std::size_t doc = 0;              // any stable document key
  std::vector<TripletId> triplets;  // non-empty, global vocabulary ids
};

/// Collapsed Gibbs state for one tree node. Documents and triplets are
/// re-indexed densely over the tokens present at the node.
class GibbsState {
 public:
  GibbsState(std::span<const RldaToken> tokens, std::size_t topics, std::span<const std::size_t> init);

  std::size_t topic_count() const { return topics_; }
  std::size_t token_count() const { return z_.size(); }
  std::size_t doc_count() const { return doc_keys_.size(); }
  std::size_t vocab_size() const { return vocab_.size(); }

  std::size_t topic_of(std::size_t token) const { return z_.at(token); }
  const std::vector<std::size_t>& assignments() const { return z_; }
  std::size_t doc_of(std::size_t token) const { return token_doc_.at(token); }
  /// Local triplet ids of a token.
  std::span<const std::uint32_t> words_of(std::size_t token) const;
  /// Local id -> global TripletId.
  const std::vector<TripletId>& vocabulary() const { return vocab_; }
  /// Local document index -> caller's document key.
  const std::vector<std::size_t>& doc_keys() const { return doc_keys_; }

  std::int64_t topic_word(std::size_t k, std::size_t w) const { return topic_word_[k * vocab_.size() + w]; }
  std::int64_t doc_topic(std::size_t d, std::size_t k) const { return doc_topic_[d * topics_ + k]; }
  std::int64_t topic_total(std::size_t k) const { return topic_total_[k]; }    // triplet occurrences
  std::int64_t topic_tokens(std::size_t k) const { return topic_tokens_[k]; }  // tokens
  std::int64_t doc_total(std::size_t d) const { return doc_total_[d]; }        // tokens in d at this node

  /// Takes a token's current assignment out of the counts.
  void detach(std::size_t token);
  /// Puts a detached token back under topic k.
  void attach(std::size_t token, std::size_t k);
  std::optional<std::size_t> detached() const { return detached_; }

  /// Recomputes every count from z and compares with the cached ones.
  bool counts_consistent() const;

 private:
  std::size_t topics_;
  std::vector<std::size_t> doc_keys_;
  std::vector<TripletId> vocab_;
  std::vector<std::size_t> token_doc_;
  std::vector<std::uint32_t> word_offsets_;
  std::vector<std::uint32_t> words_;
  std::vector<std::size_t> z_;
  std::vector<std::int64_t> topic_word_;
  std::vector<std::int64_t> doc_topic_;
  std::vector<std::int64_t> topic_total_;
  std::vector<std::int64_t> topic_tokens_;
  std::vector<std::int64_t> doc_total_;
  std::optional<std::size_t> detached_;
};

/// Normalized full conditional of the detached token over the K topics.
std::vector<double> gibbs_conditional(std::size_t token, const GibbsState& state, double alpha, double eta);

/// One systematic-scan sweep in token order.
void gibbs_sweep(GibbsState& state, double alpha, double eta, Rng& rng);

struct PosteriorEstimates {
  std::vector<std::vector<double>> theta;  // [local doc][topic]
  std::vector<std::vector<double>> beta;   // [topic][local word]
};

PosteriorEstimates posterior_estimates(const GibbsState& state, double alpha, double eta);

/// log(theta[d][z]) + sum over the token's triplets of log(beta[z][w]).
double token_log_probability(const GibbsState& state, const PosteriorEstimates& estimates, std::size_t token);

struct NodeFit {
  GibbsState state;
  PosteriorEstimates estimates;
};

using SweepObserver = std::function<void(int sweep, const GibbsState&)>;

/// Seeds the counts from `init`, runs config.gibbs_iterations sweeps and
/// returns the final state with smoothed estimates.
NodeFit train_node(std::span<const RldaToken> tokens, std::size_t topics, std::span<const std::size_t> init,
                   const CorpusConfig& config, Rng& rng, const SweepObserver& observer = {});

}  // namespace hrlda
