#include "hrlda/rlda.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hrlda/error.hpp"

namespace hrlda {

GibbsState::GibbsState(std::span<const RldaToken> tokens, std::size_t topics, std::span<const std::size_t> init)
    : topics_(topics) {
  if (topics == 0) throw InvariantError("rLDA needs at least one topic");
  if (tokens.empty()) throw InvariantError("rLDA needs at least one token");
  if (init.size() != tokens.size()) throw InvariantError("rLDA initial assignment has the wrong length");

  std::map<std::size_t, std::size_t> doc_index;
  std::map<TripletId, std::uint32_t> word_index;
  token_doc_.reserve(tokens.size());
  word_offsets_.reserve(tokens.size() + 1);
  word_offsets_.push_back(0);
  for (const auto& token : tokens) {
    if (token.triplets.empty()) throw InvariantError("rLDA token without triplets");
    auto [d, new_doc] = doc_index.try_emplace(token.doc, doc_keys_.size());
    if (new_doc) doc_keys_.push_back(token.doc);
    token_doc_.push_back(d->second);
    for (TripletId id : token.triplets) {
      auto [w, new_word] = word_index.try_emplace(id, static_cast<std::uint32_t>(vocab_.size()));
      if (new_word) vocab_.push_back(id);
      words_.push_back(w->second);
    }
    word_offsets_.push_back(static_cast<std::uint32_t>(words_.size()));
  }

  topic_word_.assign(topics_ * vocab_.size(), 0);
  doc_topic_.assign(doc_keys_.size() * topics_, 0);
  topic_total_.assign(topics_, 0);
  topic_tokens_.assign(topics_, 0);
  doc_total_.assign(doc_keys_.size(), 0);
  z_.assign(tokens.size(), 0);
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (init[t] >= topics_) throw InvariantError("rLDA initial topic out of range");
    detached_ = t;
    attach(t, init[t]);
  }
}

std::span<const std::uint32_t> GibbsState::words_of(std::size_t token) const {
  return std::span(words_).subspan(word_offsets_[token], word_offsets_[token + 1] - word_offsets_[token]);
}

void GibbsState::detach(std::size_t token) {
  if (detached_) throw InvariantError("rLDA: another token is already detached");
  const std::size_t k = z_.at(token);
  const std::size_t d = token_doc_[token];
  for (std::uint32_t w : words_of(token)) {
    if (--topic_word_[k * vocab_.size() + w] < 0) throw InvariantError("rLDA: negative topic-triplet count");
  }
  topic_total_[k] -= static_cast<std::int64_t>(words_of(token).size());
  --topic_tokens_[k];
  --doc_topic_[d * topics_ + k];
  --doc_total_[d];
  if (topic_total_[k] < 0 || topic_tokens_[k] < 0 || doc_topic_[d * topics_ + k] < 0 || doc_total_[d] < 0) {
    throw InvariantError("rLDA: negative count after decrement");
  }
  detached_ = token;
}

void GibbsState::attach(std::size_t token, std::size_t k) {
  if (detached_ != token) throw InvariantError("rLDA: attaching a token that is not detached");
  if (k >= topics_) throw InvariantError("rLDA: topic out of range");
  const std::size_t d = token_doc_[token];
  for (std::uint32_t w : words_of(token)) ++topic_word_[k * vocab_.size() + w];
  topic_total_[k] += static_cast<std::int64_t>(words_of(token).size());
  ++topic_tokens_[k];
  ++doc_topic_[d * topics_ + k];
  ++doc_total_[d];
  z_[token] = k;
  detached_.reset();
}

bool GibbsState::counts_consistent() const {
  std::vector<std::int64_t> tw(topic_word_.size(), 0);
  std::vector<std::int64_t> dt(doc_topic_.size(), 0);
  std::vector<std::int64_t> tt(topics_, 0);
  std::vector<std::int64_t> tk(topics_, 0);
  std::vector<std::int64_t> dl(doc_keys_.size(), 0);
  for (std::size_t t = 0; t < z_.size(); ++t) {
    if (detached_ == t) continue;
    const std::size_t k = z_[t];
    const std::size_t d = token_doc_[t];
    for (std::uint32_t w : words_of(t)) ++tw[k * vocab_.size() + w];
    tt[k] += static_cast<std::int64_t>(words_of(t).size());
    ++tk[k];
    ++dt[d * topics_ + k];
    ++dl[d];
  }
  // Row sums of the matrices must also agree with the cached totals.
  for (std::size_t k = 0; k < topics_; ++k) {
    std::int64_t row = 0;
    for (std::size_t w = 0; w < vocab_.size(); ++w) row += topic_word_[k * vocab_.size() + w];
    if (row != topic_total_[k]) return false;
  }
  for (std::size_t d = 0; d < doc_keys_.size(); ++d) {
    std::int64_t row = 0;
    for (std::size_t k = 0; k < topics_; ++k) row += doc_topic_[d * topics_ + k];
    if (row != doc_total_[d]) return false;
  }
  return tw == topic_word_ && dt == doc_topic_ && tt == topic_total_ && tk == topic_tokens_ && dl == doc_total_;
}

namespace {

// Unnormalized unless `normalize`; sampling does not need the division.
void conditional_into(std::size_t token, const GibbsState& state, double alpha, double eta, std::vector<double>& p,
                      bool normalize) {
  if (state.detached() != token) throw InvariantError("gibbs_conditional: token has not been detached");
  const std::size_t topics = state.topic_count();
  const std::size_t d = state.doc_of(token);
  const double vocab_mass = static_cast<double>(state.vocab_size()) * eta;
  const double doc_norm = static_cast<double>(state.doc_total(d)) + static_cast<double>(topics) * alpha;
  const auto words = state.words_of(token);
  p.resize(topics);

  if (words.size() == 1) {
    const std::uint32_t w = words[0];
    double total = 0.0;
    for (std::size_t k = 0; k < topics; ++k) {
      const double word_term =
          (static_cast<double>(state.topic_word(k, w)) + eta) / (static_cast<double>(state.topic_total(k)) + vocab_mass);
      const double doc_term = (static_cast<double>(state.doc_topic(d, k)) + alpha) / doc_norm;
      p[k] = word_term * doc_term;
      total += p[k];
    }
    if (normalize) {
      for (double& x : p) x /= total;
    }
    return;
  }

  // Several triplets: exact Dirichlet-multinomial ratio for the whole block.
  double max_log = -INFINITY;
  for (std::size_t k = 0; k < topics; ++k) {
    double log_p = std::log((static_cast<double>(state.doc_topic(d, k)) + alpha) / doc_norm);
    for (std::size_t j = 0; j < words.size(); ++j) {
      const auto repeats = std::count(words.begin(), words.begin() + static_cast<std::ptrdiff_t>(j), words[j]);
      log_p += std::log(static_cast<double>(state.topic_word(k, words[j])) + eta + static_cast<double>(repeats));
      log_p -= std::log(static_cast<double>(state.topic_total(k)) + vocab_mass + static_cast<double>(j));
    }
    p[k] = log_p;
    max_log = std::max(max_log, log_p);
  }
  double total = 0.0;
  for (double& x : p) {
    x = std::exp(x - max_log);
    total += x;
  }
  if (normalize) {
    for (double& x : p) x /= total;
  }
}

}  // namespace

std::vector<double> gibbs_conditional(std::size_t token, const GibbsState& state, double alpha, double eta) {
  std::vector<double> p;
  conditional_into(token, state, alpha, eta, p, true);
  return p;
}

void gibbs_sweep(GibbsState& state, double alpha, double eta, Rng& rng) {
  std::vector<double> p;
  for (std::size_t t = 0; t < state.token_count(); ++t) {
    state.detach(t);
    conditional_into(t, state, alpha, eta, p, false);
    state.attach(t, sample_categorical(p, rng));
  }
}

PosteriorEstimates posterior_estimates(const GibbsState& state, double alpha, double eta) {
  const std::size_t topics = state.topic_count();
  const std::size_t vocab = state.vocab_size();
  PosteriorEstimates est;
  est.theta.assign(state.doc_count(), std::vector<double>(topics));
  for (std::size_t d = 0; d < state.doc_count(); ++d) {
    const double norm = static_cast<double>(state.doc_total(d)) + static_cast<double>(topics) * alpha;
    for (std::size_t k = 0; k < topics; ++k) {
      est.theta[d][k] = (static_cast<double>(state.doc_topic(d, k)) + alpha) / norm;
    }
  }
  est.beta.assign(topics, std::vector<double>(vocab));
  for (std::size_t k = 0; k < topics; ++k) {
    const double norm = static_cast<double>(state.topic_total(k)) + static_cast<double>(vocab) * eta;
    for (std::size_t w = 0; w < vocab; ++w) {
      est.beta[k][w] = (static_cast<double>(state.topic_word(k, w)) + eta) / norm;
    }
  }
  return est;
}

double token_log_probability(const GibbsState& state, const PosteriorEstimates& estimates, std::size_t token) {
  const std::size_t k = state.topic_of(token);
  double lp = std::log(estimates.theta[state.doc_of(token)][k]);
  for (std::uint32_t w : state.words_of(token)) lp += std::log(estimates.beta[k][w]);
  return lp;
}

NodeFit train_node(std::span<const RldaToken> tokens, std::size_t topics, std::span<const std::size_t> init,
                   const CorpusConfig& config, Rng& rng, const SweepObserver& observer) {
  GibbsState state(tokens, topics, init);
  if (observer) observer(0, state);
  for (int sweep = 1; sweep <= config.gibbs_iterations; ++sweep) {
    gibbs_sweep(state, config.alpha, config.eta, rng);
    if (observer) observer(sweep, state);
  }
  auto estimates = posterior_estimates(state, config.alpha, config.eta);
  return NodeFit{std::move(state), std::move(estimates)};
}

}  // namespace hrlda
