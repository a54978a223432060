#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>

#include "hrlda/error.hpp"
#include "hrlda/rlda.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace hrlda;

namespace {

std::vector<double> conditional_at(GibbsState& state, std::size_t token, double alpha, double eta) {
  const std::size_t old = state.topic_of(token);
  state.detach(token);
  auto p = gibbs_conditional(token, state, alpha, eta);
  state.attach(token, old);
  return p;
}

// Random instance with multi-triplet tokens; words are renumbered so every id is used.
oracle::Instance random_multi_instance(Rng& rng) {
  oracle::Instance in;
  const std::size_t n = 2 + uniform_below(rng, 5);
  in.doc_count = 1 + uniform_below(rng, 3);
  in.topics = 2 + uniform_below(rng, 3);
  std::map<std::size_t, std::size_t> dense;
  for (std::size_t t = 0; t < n; ++t) {
    in.docs.push_back(uniform_below(rng, in.doc_count));
    std::vector<std::size_t> words;
    const std::size_t count = 1 + uniform_below(rng, 3);
    for (std::size_t i = 0; i < count; ++i) {
      const auto raw = uniform_below(rng, 5);
      auto [it, fresh] = dense.emplace(raw, dense.size());
      words.push_back(it->second);
    }
    in.words.push_back(words);
  }
  // Documents must be dense as well.
  std::map<std::size_t, std::size_t> docs;
  for (auto& d : in.docs) d = docs.emplace(d, docs.size()).first->second;
  in.doc_count = docs.size();
  in.vocab = dense.size();
  return in;
}

double best_permutation_accuracy(const std::vector<std::size_t>& found, const std::vector<std::size_t>& truth,
                                 std::size_t topics) {
  std::vector<std::size_t> perm(topics);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    std::size_t hits = 0;
    for (std::size_t t = 0; t < found.size(); ++t) hits += perm[found[t]] == truth[t];
    best = std::max(best, static_cast<double>(hits) / static_cast<double>(found.size()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_CASE("conditional edge cases") {
  const std::vector<RldaToken> one{{0, {7}}};
  const std::vector<std::size_t> zero{0};
  GibbsState single(one, 1, zero);
  CHECK(conditional_at(single, 0, 1.0, 0.1) == std::vector<double>{1.0});

  GibbsState symmetric(one, 2, zero);
  const auto half = conditional_at(symmetric, 0, 1.0, 0.1);
  CHECK(half[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(half[1] == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(gibbs_conditional(0, symmetric, 1.0, 0.1), InvariantError);
  symmetric.detach(0);
  CHECK_THROWS_AS(symmetric.detach(0), InvariantError);
  CHECK_THROWS_AS(symmetric.attach(0, 2), InvariantError);
  symmetric.attach(0, 1);
  CHECK(symmetric.topic_of(0) == 1);
}

TEST_CASE("state construction validates its inputs") {
  const std::vector<RldaToken> one{{0, {7}}};
  const std::vector<std::size_t> zero{0};
  CHECK_THROWS_AS(GibbsState(one, 0, zero), InvariantError);
  CHECK_THROWS_AS(GibbsState(one, 1, std::vector<std::size_t>{}), InvariantError);
  CHECK_THROWS_AS(GibbsState(one, 1, std::vector<std::size_t>{1}), InvariantError);
  CHECK_THROWS_AS(GibbsState(std::vector<RldaToken>{{0, {}}}, 1, zero), InvariantError);
}

TEST_CASE("two documents of three tokens match the brute-force conditional") {
  oracle::Instance in;
  in.docs = {0, 0, 0, 1, 1, 1};
  in.words = {{0}, {1}, {0}, {2}, {1}, {2}};
  in.doc_count = 2;
  in.vocab = 3;
  in.topics = 2;
  const std::vector<std::size_t> z{0, 1, 0, 1, 1, 0};
  GibbsState state(fixtures::to_rlda(in), 2, z);
  for (std::size_t t = 0; t < z.size(); ++t) {
    const auto ours = conditional_at(state, t, 1.0, 0.1);
    const auto exact = oracle::exact_conditional(in, z, t, 1.0, 0.1);
    for (std::size_t k = 0; k < 2; ++k) CHECK(ours[k] == doctest::Approx(exact[k]).epsilon(1e-12));
  }
}

TEST_CASE("multi-triplet tokens match the brute-force conditional") {
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    const auto in = random_multi_instance(rng);
    std::vector<std::size_t> z;
    for (std::size_t t = 0; t < in.docs.size(); ++t) z.push_back(uniform_below(rng, in.topics));
    const double alpha = 0.1 + uniform01(rng);
    const double eta = 0.01 + uniform01(rng);
    GibbsState state(fixtures::to_rlda(in), in.topics, z);
    for (std::size_t t = 0; t < z.size(); ++t) {
      const auto ours = conditional_at(state, t, alpha, eta);
      const auto exact = oracle::exact_conditional(in, z, t, alpha, eta);
      for (std::size_t k = 0; k < in.topics; ++k) CHECK(std::abs(ours[k] - exact[k]) <= 1e-10);
    }
  }
}

TEST_CASE("relabeling topics permutes the conditional") {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto fixture = fixtures::random_rlda_fixture(40, rng);
    std::vector<std::size_t> perm(fixture.topics);
    std::iota(perm.begin(), perm.end(), 0);
    shuffle(std::span<std::size_t>(perm), rng);
    std::vector<std::size_t> relabeled;
    for (std::size_t k : fixture.init) relabeled.push_back(perm[k]);
    GibbsState a(fixture.tokens, fixture.topics, fixture.init);
    GibbsState b(fixture.tokens, fixture.topics, relabeled);
    const std::size_t t = uniform_below(rng, fixture.tokens.size());
    const auto pa = conditional_at(a, t, 1.0, 0.1);
    const auto pb = conditional_at(b, t, 1.0, 0.1);
    for (std::size_t k = 0; k < fixture.topics; ++k) CHECK(std::abs(pa[k] - pb[perm[k]]) <= 1e-12);
  }
}

TEST_CASE("sweeps conserve counts") {
  Rng rng(23);
  const std::vector<RldaToken> one{{0, {7}}};
  GibbsState single(one, 1, std::vector<std::size_t>{0});
  gibbs_sweep(single, 1.0, 0.1, rng);
  CHECK(single.topic_of(0) == 0);

  for (int i = 0; i < 20; ++i) {
    const auto fixture = fixtures::random_rlda_fixture(50, rng);
    GibbsState state(fixture.tokens, fixture.topics, fixture.init);
    const auto before = fixtures::count_snapshot(state);
    for (int s = 0; s < 10; ++s) {
      gibbs_sweep(state, 1.0, 0.1, rng);
      CHECK(fixtures::count_snapshot(state) == before);
      CHECK(fixtures::counts_match_recount(state, fixture.tokens));
      CHECK(state.counts_consistent());
    }
  }
}

TEST_CASE("sweeps are deterministic per seed") {
  Rng source(8);
  const auto fixture = fixtures::random_rlda_fixture(80, source);
  GibbsState a(fixture.tokens, fixture.topics, fixture.init);
  GibbsState b(fixture.tokens, fixture.topics, fixture.init);
  Rng ra(77), rb(77);
  for (int s = 0; s < 3; ++s) {
    gibbs_sweep(a, 1.0, 0.1, ra);
    gibbs_sweep(b, 1.0, 0.1, rb);
  }
  CHECK(a.assignments() == b.assignments());
}

TEST_CASE("a tiny chain reaches the exact posterior") {
  oracle::Instance in;
  in.docs = {0, 0, 1};
  in.words = {{0}, {1}, {0}};
  in.doc_count = 2;
  in.vocab = 2;
  in.topics = 2;
  CHECK(fixtures::sampler_tv_distance(in, 1.0, 0.1, 200000, 3) <= 0.02);
}

TEST_CASE("train_node estimates") {
  const CorpusConfig config;
  Rng rng(1);
  const std::vector<RldaToken> one{{4, {9}}};
  const auto fit = train_node(one, 1, std::vector<std::size_t>{0}, config, rng);
  CHECK(fit.estimates.theta == std::vector<std::vector<double>>{{1.0}});
  CHECK(fit.estimates.beta == std::vector<std::vector<double>>{{1.0}});
  CHECK(fit.state.doc_keys() == std::vector<std::size_t>{4});
  CHECK(fit.state.vocabulary() == std::vector<TripletId>{9});

  const std::vector<RldaToken> pair{{0, {3, 5}}};
  const auto two = train_node(pair, 1, std::vector<std::size_t>{0}, config, rng);
  CHECK(two.estimates.beta[0][0] == doctest::Approx(0.5));
  CHECK(token_log_probability(two.state, two.estimates, 0) == doctest::Approx(2.0 * std::log(0.5)));

  auto zero = config;
  zero.gibbs_iterations = 0;
  const auto fixture = fixtures::random_rlda_fixture(60, rng);
  const auto unchanged = train_node(fixture.tokens, fixture.topics, fixture.init, zero, rng);
  CHECK(unchanged.state.assignments() == fixture.init);

  auto short_run = config;
  short_run.gibbs_iterations = 5;
  int observed = 0;
  const auto fitted = train_node(fixture.tokens, fixture.topics, fixture.init, short_run, rng,
                                 [&](int sweep, const GibbsState&) { CHECK(sweep == observed++); });
  CHECK(observed == 6);  // the initial state is reported as sweep 0
  for (const auto& row : fitted.estimates.theta) {
    CHECK(std::accumulate(row.begin(), row.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (const auto& row : fitted.estimates.beta) {
    CHECK(std::accumulate(row.begin(), row.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("planted topics are recovered") {
  Rng rng(2017);
  const auto planted = oracle::planted_corpus(20, 40, 2, 8, rng);
  const auto tokens = fixtures::to_rlda(planted.instance);
  std::vector<std::size_t> init;
  for (std::size_t t = 0; t < tokens.size(); ++t) init.push_back(uniform_below(rng, 2));
  CorpusConfig config;
  config.gibbs_iterations = 300;
  const auto fit = train_node(tokens, 2, init, config, rng);
  MESSAGE("recovered ", best_permutation_accuracy(fit.state.assignments(), planted.topic, 2));
  CHECK(best_permutation_accuracy(fit.state.assignments(), planted.topic, 2) >= 0.95);
}
