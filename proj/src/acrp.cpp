#include "hrlda/acrp.hpp"

#include <algorithm>
#include <limits>

#include "hrlda/error.hpp"

namespace hrlda {

namespace {

std::size_t gap(std::size_t a, std::size_t b) { return a > b ? a - b : b - a; }

}  // namespace

void AcrpState::assign(std::size_t position, const AcrpToken& token, std::size_t topic) {
  if (position >= assignments_.size()) throw InvariantError("ACRP token position out of range");
  if (assignments_[position]) throw InvariantError("ACRP token seated twice");
  if (topic > topics_.size()) throw InvariantError("ACRP topic index out of range");
  if (topic == topics_.size()) topics_.emplace_back();
  Topic& t = topics_[topic];
  t.members.push_back(position);
  t.docs.insert(token.doc);
  t.locations[token.doc].emplace_back(token.chunk, token.sentence);
  if (t.contents.insert(token.content).second) {
    if (auto acronym = acronym_of(token.content); !acronym.empty()) t.member_acronyms.insert(std::move(acronym));
  }
  assignments_[position] = topic;
  ++assigned_;
}

std::optional<AcrpState::Closeness> AcrpState::closeness(std::size_t topic, const AcrpToken& token) const {
  const Topic& t = topics_.at(topic);
  auto it = t.locations.find(token.doc);
  if (it == t.locations.end()) return std::nullopt;
  Closeness c{std::numeric_limits<std::size_t>::max(), std::numeric_limits<std::size_t>::max()};
  for (const auto& [chunk, sentence] : it->second) {
    c.min_chunk_gap = std::min(c.min_chunk_gap, gap(chunk, token.chunk));
    c.min_sentence_gap = std::min(c.min_sentence_gap, gap(sentence, token.sentence));
  }
  return c;
}

bool AcrpState::has_related_member(std::size_t topic, const std::string& content, const SynonymLexicon* lexicon) const {
  const Topic& t = topics_.at(topic);
  if (t.contents.contains(content)) return true;
  // candidate is the acronym of a member, or a member is the acronym of the candidate
  if (t.member_acronyms.contains(content)) return true;
  if (auto acronym = acronym_of(content); !acronym.empty() && t.contents.contains(acronym)) return true;
  if (lexicon != nullptr) {
    for (const auto& synonym : lexicon->synonyms(content)) {
      if (t.contents.contains(synonym)) return true;
    }
  }
  return false;
}

std::vector<std::size_t> AcrpState::dense_assignments() const {
  std::vector<std::size_t> out;
  out.reserve(assignments_.size());
  for (const auto& a : assignments_) {
    if (!a) throw InvariantError("ACRP state has unseated tokens");
    out.push_back(*a);
  }
  return out;
}

double closeness_score(std::size_t topic_size, std::size_t min_chunk_gap, std::size_t min_sentence_gap,
                       std::size_t n, double gamma) {
  const double q = static_cast<double>(std::max<std::size_t>(1, min_chunk_gap));
  const double numerator = std::max(0.0, static_cast<double>(topic_size) - (1.0 - 1.0 / q));
  const double denominator = (1.0 + static_cast<double>(min_sentence_gap)) * static_cast<double>(n) + gamma;
  return numerator / denominator;
}

AcrpScores acrp_scores(const AcrpToken& candidate, const AcrpState& state, std::size_t n, double gamma,
                       const SynonymLexicon* lexicon) {
  if (n != state.assigned_count()) throw InvariantError("ACRP: n does not match the number of seated tokens");
  if (n == 0 && state.topic_count() != 0) throw InvariantError("ACRP: n = 0 with non-empty topics");
  const std::size_t k = state.topic_count();
  AcrpScores scores;
  scores.raw.resize(k + 1);
  for (std::size_t i = 0; i < k; ++i) {
    if (state.has_related_member(i, candidate.content, lexicon)) {
      scores.raw[i] = 1.0 - gamma;
    } else if (auto c = state.closeness(i, candidate); !c) {
      scores.raw[i] = gamma;
    } else {
      scores.raw[i] = closeness_score(state.members(i).size(), c->min_chunk_gap, c->min_sentence_gap, n, gamma);
    }
  }
  scores.raw[k] = gamma / (static_cast<double>(n) + gamma);

  double total = 0.0;
  for (double r : scores.raw) total += r;
  scores.normalized.resize(k + 1);
  for (std::size_t i = 0; i <= k; ++i) scores.normalized[i] = scores.raw[i] / total;
  return scores;
}

std::size_t sample_assignment(const AcrpScores& scores, Rng& rng) {
  return sample_categorical(scores.normalized, rng);
}

AcrpState acrp_pass(std::span<const AcrpToken> tokens, std::span<const std::size_t> order, double gamma, Rng& rng,
                    const SynonymLexicon* lexicon) {
  AcrpState state(tokens.size());
  for (std::size_t position : order) {
    const AcrpToken& token = tokens[position];
    const auto scores = acrp_scores(token, state, state.assigned_count(), gamma, lexicon);
    state.assign(position, token, sample_assignment(scores, rng));
  }
  return state;
}

AcrpState acrp_pass(std::span<const AcrpToken> tokens, double gamma, Rng& rng, const SynonymLexicon* lexicon) {
  std::vector<std::size_t> order(tokens.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  return acrp_pass(tokens, order, gamma, rng, lexicon);
}

KEstimate estimate_k(std::span<const AcrpToken> tokens, const CorpusConfig& config, Rng& rng,
                     const SynonymLexicon* lexicon) {
  if (tokens.empty()) throw InvariantError("estimate_k on an empty token list");

  // Contiguous runs of the same document, in first-appearance order.
  std::vector<std::vector<std::size_t>> blocks;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i == 0 || tokens[i].doc != tokens[i - 1].doc) blocks.emplace_back();
    blocks.back().push_back(i);
  }

  KEstimate result;
  std::optional<std::size_t> previous_k;
  std::vector<std::size_t> order;
  order.reserve(tokens.size());
  for (int pass = 0; pass < config.acrp_max_passes; ++pass) {
    if (pass > 0) shuffle(std::span(blocks), rng);
    order.clear();
    for (const auto& block : blocks) order.insert(order.end(), block.begin(), block.end());
    result.init = acrp_pass(tokens, order, config.gamma, rng, lexicon);
    result.k = result.init.topic_count();
    result.passes = pass + 1;
    if (previous_k == result.k) break;
    previous_k = result.k;
  }
  return result;
}

}  // namespace hrlda
