#pragma once

// Randomized and synthetic fixtures shared by the unit tests and the
// acceptance runner.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "hrlda/acrp.hpp"
#include "hrlda/corpus.hpp"
#include "hrlda/evaluation.hpp"
#include "hrlda/hierarchy.hpp"
#include "hrlda/random.hpp"
#include "hrlda/rlda.hpp"
#include "support/oracles.hpp"

namespace fixtures {

inline const std::vector<std::string>& acrp_phrases() {
  static const std::vector<std::string> phrases{"integrated circuit", "ic",          "berlin",  "london",
                                                "flip chip",          "fc",          "wafer",   "silicon",
                                                "capital city",       "cc",          "capital", "semiconductor"};
  return phrases;
}

inline const hrlda::SynonymLexicon& acrp_lexicon() {
  static const hrlda::SynonymLexicon lexicon = [] {
    hrlda::SynonymLexicon l;
    l.add("capital", "capital city");
    l.add("wafer", "silicon");
    return l;
  }();
  return lexicon;
}

inline hrlda::AcrpToken random_acrp_token(hrlda::Rng& rng) {
  const auto& phrases = acrp_phrases();
  return {phrases[hrlda::uniform_below(rng, phrases.size())], hrlda::uniform_below(rng, 4),
          hrlda::uniform_below(rng, 6), hrlda::uniform_below(rng, 6)};
}

/// A random seating of up to 40 tokens, a random candidate and gamma in [1e-6, 1).
inline std::tuple<hrlda::AcrpState, hrlda::AcrpToken, double> random_acrp_case(hrlda::Rng& rng) {
  const std::size_t m = hrlda::uniform_below(rng, 41);
  hrlda::AcrpState state(m);
  for (std::size_t i = 0; i < m; ++i) {
    state.assign(i, random_acrp_token(rng), hrlda::uniform_below(rng, state.topic_count() + 1));
  }
  const double gamma = std::exp(std::log(1e-6) * (1.0 - hrlda::uniform01(rng)));
  return {std::move(state), random_acrp_token(rng), gamma};
}

// ---------------------------------------------------------------------------

/// Every instance up to relabeling: n <= max_tokens, single-word tokens,
/// documents and words as restricted growth strings, K in 1..max_topics.
inline std::vector<oracle::Instance> small_instances(std::size_t max_tokens, std::size_t max_docs,
                                                     std::size_t max_vocab, std::size_t max_topics) {
  std::vector<oracle::Instance> out;
  for (std::size_t n = 1; n <= max_tokens; ++n) {
    for (const auto& docs : oracle::restricted_growth(n, max_docs)) {
      for (const auto& words : oracle::restricted_growth(n, max_vocab)) {
        for (std::size_t k = 1; k <= max_topics; ++k) {
          oracle::Instance in;
          in.docs = docs;
          for (std::size_t w : words) in.words.push_back({w});
          in.doc_count = *std::max_element(docs.begin(), docs.end()) + 1;
          in.vocab = *std::max_element(words.begin(), words.end()) + 1;
          in.topics = k;
          out.push_back(std::move(in));
        }
      }
    }
  }
  return out;
}

inline std::vector<hrlda::RldaToken> to_rlda(const oracle::Instance& in) {
  std::vector<hrlda::RldaToken> tokens;
  for (std::size_t t = 0; t < in.docs.size(); ++t) {
    hrlda::RldaToken token{in.docs[t], {}};
    for (std::size_t w : in.words[t]) token.triplets.push_back(static_cast<hrlda::TripletId>(w));
    tokens.push_back(std::move(token));
  }
  return tokens;
}

/// Total-variation distance between the empirical distribution of the state
/// after each of `sweeps` sweeps (started from all-zero) and the exact posterior.
inline double sampler_tv_distance(const oracle::Instance& in, double alpha, double eta, int sweeps,
                                  std::uint64_t seed) {
  const auto tokens = to_rlda(in);
  const std::vector<std::size_t> init(tokens.size(), 0);
  hrlda::GibbsState state(tokens, in.topics, init);
  hrlda::Rng rng(seed);
  std::vector<double> counts(oracle::all_assignments(tokens.size(), in.topics).size(), 0.0);
  for (int s = 0; s < sweeps; ++s) {
    hrlda::gibbs_sweep(state, alpha, eta, rng);
    counts[oracle::assignment_index(state.assignments(), in.topics)] += 1.0;
  }
  const auto exact = oracle::exact_posterior(in, alpha, eta);
  double tv = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) tv += std::abs(counts[i] / sweeps - exact[i]);
  return tv / 2.0;
}

// ---------------------------------------------------------------------------

struct RldaFixture {
  std::vector<hrlda::RldaToken> tokens;
  std::size_t topics = 1;
  std::vector<std::size_t> init;
};

/// Random documents, one to three triplets per token, K in 1..8, random init.
inline RldaFixture random_rlda_fixture(std::size_t size, hrlda::Rng& rng) {
  RldaFixture f;
  const std::size_t docs = 1 + hrlda::uniform_below(rng, 1 + size / 20);
  const std::size_t vocab = 1 + hrlda::uniform_below(rng, std::min<std::size_t>(2000, 1 + size / 5));
  f.topics = 1 + hrlda::uniform_below(rng, 8);
  for (std::size_t t = 0; t < size; ++t) {
    hrlda::RldaToken token{hrlda::uniform_below(rng, docs) * 7 + 3, {}};
    const std::size_t count = 1 + hrlda::uniform_below(rng, 3);
    for (std::size_t i = 0; i < count; ++i) {
      token.triplets.push_back(static_cast<hrlda::TripletId>(hrlda::uniform_below(rng, vocab) * 5 + 1));
    }
    f.tokens.push_back(std::move(token));
    f.init.push_back(hrlda::uniform_below(rng, f.topics));
  }
  return f;
}

/// Quantities no sweep may change: token count, per-document totals, and
/// the summed topic token and triplet counts.
inline std::vector<std::int64_t> count_snapshot(const hrlda::GibbsState& state) {
  std::vector<std::int64_t> snap{static_cast<std::int64_t>(state.token_count())};
  std::int64_t tokens = 0, triplets = 0;
  for (std::size_t k = 0; k < state.topic_count(); ++k) {
    tokens += state.topic_tokens(k);
    triplets += state.topic_total(k);
  }
  snap.push_back(tokens);
  snap.push_back(triplets);
  for (std::size_t d = 0; d < state.doc_count(); ++d) snap.push_back(state.doc_total(d));
  return snap;
}

/// Recounts every matrix from the assignments and the caller's tokens.
inline bool counts_match_recount(const hrlda::GibbsState& state, const std::vector<hrlda::RldaToken>& tokens) {
  std::map<hrlda::TripletId, std::size_t> local_word;
  for (std::size_t w = 0; w < state.vocabulary().size(); ++w) local_word[state.vocabulary()[w]] = w;
  std::map<std::size_t, std::size_t> local_doc;
  for (std::size_t d = 0; d < state.doc_keys().size(); ++d) local_doc[state.doc_keys()[d]] = d;

  const std::size_t K = state.topic_count(), W = state.vocab_size(), D = state.doc_count();
  std::vector<std::int64_t> topic_word(K * W, 0), doc_topic(D * K, 0), topic_total(K, 0), topic_tokens(K, 0),
      doc_total(D, 0);
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const std::size_t k = state.assignments()[t];
    const std::size_t d = local_doc.at(tokens[t].doc);
    ++doc_topic[d * K + k];
    ++doc_total[d];
    ++topic_tokens[k];
    for (auto id : tokens[t].triplets) {
      ++topic_word[k * W + local_word.at(id)];
      ++topic_total[k];
    }
  }
  for (std::size_t k = 0; k < K; ++k) {
    if (state.topic_total(k) != topic_total[k] || state.topic_tokens(k) != topic_tokens[k]) return false;
    for (std::size_t w = 0; w < W; ++w) {
      if (state.topic_word(k, w) != topic_word[k * W + w]) return false;
    }
  }
  for (std::size_t d = 0; d < D; ++d) {
    if (state.doc_total(d) != doc_total[d]) return false;
    std::int64_t row = 0;
    for (std::size_t k = 0; k < K; ++k) {
      if (state.doc_topic(d, k) != doc_topic[d * K + k]) return false;
      row += doc_topic[d * K + k];
    }
    if (row != doc_total[d]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

/// Purity of the level-1 partition against per-document domain labels. Tokens
/// that never left the root count as one extra cluster.
inline double level1_purity(const hrlda::TopicTree& tree, const hrlda::Corpus& corpus,
                            const std::filesystem::path& domains_path) {
  std::ifstream in(domains_path);
  const auto domains = nlohmann::json::parse(in);
  const auto clusters = hrlda::level1_clusters(tree, corpus.size());
  std::map<std::size_t, std::size_t> assignment;
  std::map<std::size_t, std::string> truth;
  for (std::size_t t = 0; t < corpus.size(); ++t) {
    assignment[t] = clusters[t].value_or(std::numeric_limits<std::size_t>::max());
    truth[t] = domains.at(corpus.token(t).doc_id).get<std::string>();
  }
  return hrlda::cluster_purity(assignment, truth);
}

// ---------------------------------------------------------------------------

struct GraphCase {
  std::vector<hrlda::TripletKey> triplets;
  std::vector<std::pair<std::string, std::string>> edges;  // subject-object pairs with a non-empty object
  std::set<std::string> seeds;
};

/// Random triplet graph on up to max_nodes phrases; phrases without an edge
/// appear through an object-less triplet.
inline GraphCase random_graph(hrlda::Rng& rng, std::size_t max_nodes) {
  GraphCase g;
  const std::size_t nodes = 1 + hrlda::uniform_below(rng, max_nodes);
  auto name = [](std::size_t i) { return "phrase " + std::to_string(i); };
  const std::size_t edge_count = hrlda::uniform_below(rng, 2 * nodes + 1);
  std::set<std::size_t> touched;
  for (std::size_t e = 0; e < edge_count; ++e) {
    const std::size_t a = hrlda::uniform_below(rng, nodes), b = hrlda::uniform_below(rng, nodes);
    const std::string verb = "relates " + std::to_string(hrlda::uniform_below(rng, 3));
    g.triplets.push_back({name(a), verb, name(b)});
    g.edges.emplace_back(name(a), name(b));
    touched.insert(a);
    touched.insert(b);
  }
  for (std::size_t i = 0; i < nodes; ++i) {
    if (!touched.contains(i)) g.triplets.push_back({name(i), "exists", ""});
  }
  const std::size_t seeds = 1 + hrlda::uniform_below(rng, 3);
  for (std::size_t s = 0; s < seeds; ++s) g.seeds.insert(name(hrlda::uniform_below(rng, nodes)));
  return g;
}

// ---------------------------------------------------------------------------

/// Four-domain synthetic corpus with `tokens` tokens in documents of 50.
inline hrlda::Corpus scaling_corpus(std::size_t tokens, std::uint64_t seed) {
  hrlda::Rng rng(seed);
  hrlda::CorpusBuilder builder;
  std::size_t made = 0;
  for (std::size_t doc = 0; made < tokens; ++doc) {
    const std::size_t domain = hrlda::uniform_below(rng, 4);
    builder.begin_document("doc-" + std::to_string(doc));
    for (std::size_t c = 0; c < 5 && made < tokens; ++c) {
      builder.begin_chunk();
      for (std::size_t s = 0; s < 5 && made < tokens; ++s) {
        builder.begin_sentence();
        for (std::size_t i = 0; i < 2 && made < tokens; ++i, ++made) {
          const std::size_t subject = hrlda::uniform_below(rng, 30);
          const std::string phrase = "term " + std::to_string(domain) + "-" + std::to_string(subject);
          std::vector<hrlda::RelationTriplet> triplets;
          const std::size_t fact = hrlda::uniform_below(rng, 3);
          triplets.push_back(hrlda::make_triplet(phrase, "relates to", "object " + std::to_string(domain) + "-" +
                                                                          std::to_string(subject * 3 + fact)));
          builder.add_token(phrase, std::move(triplets));
        }
      }
    }
  }
  return std::move(builder).finish();
}

}  // namespace fixtures
