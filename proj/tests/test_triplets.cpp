#include <doctest.h>

#include <sstream>

#include "hrlda/error.hpp"
#include "hrlda/triplets.hpp"

using namespace hrlda;

namespace {

std::vector<TripletKey> keys(const std::vector<RelationTriplet>& triplets) {
  std::vector<TripletKey> out;
  for (const auto& t : triplets) out.push_back(t.key);
  return out;
}

ItemizedDoc doc(std::vector<ItemizedLine> lines) { return {"slides", std::move(lines)}; }

}  // namespace

TEST_CASE("structural extraction links each line to its parent") {
  const auto packaging = extract_structural_triplets(doc({{0, "Packaging"}, {1, "Wire bonding"}, {1, "Flip chip"}}));
  CHECK(keys(packaging.triplets) == std::vector<TripletKey>{{"wire bonding", "be a subtopic of", "packaging"},
                                                            {"flip chip", "be a subtopic of", "packaging"}});
  for (const auto& t : packaging.triplets) {
    CHECK(t.source == TripletSource::structural);
    CHECK(t.doc_id == "slides");
  }

  CHECK(extract_structural_triplets(doc({{0, "Packaging"}})).triplets.empty());
  CHECK(extract_structural_triplets(doc({})).triplets.empty());

  const auto chain = extract_structural_triplets(doc({{0, "A"}, {1, "B"}, {2, "C"}}));
  CHECK(keys(chain.triplets) ==
        std::vector<TripletKey>{{"b", "be a subtopic of", "a"}, {"c", "be a subtopic of", "b"}});
}

TEST_CASE("structural extraction tolerates indent jumps and orphans") {
  const auto jumps = extract_structural_triplets(doc({{1, "Orphan"}, {0, "Top"}, {3, "Deep"}, {1, "Mid"}, {2, "Low"}}));
  CHECK(keys(jumps.triplets) == std::vector<TripletKey>{{"deep", "be a subtopic of", "top"},
                                                        {"mid", "be a subtopic of", "top"},
                                                        {"low", "be a subtopic of", "mid"}});
  // One triplet per line with an ancestor, in line order.
  CHECK(jumps.triplets.size() == 3);
}

TEST_CASE("structural extraction also yields a one-chunk document") {
  const auto result = extract_structural_triplets(doc({{0, "Packaging"}, {1, "Wire bonding"}, {1, "Flip chip"}}));
  const auto& corpus = result.document;
  REQUIRE(corpus.documents().size() == 1);
  CHECK(corpus.documents()[0].doc_id == "slides");
  REQUIRE(corpus.documents()[0].chunks.size() == 1);
  for (const auto& token : corpus.tokens()) {
    CHECK_FALSE(token.triplets.empty());
    CHECK(token.chunk_index == 0);
  }
  std::set<TripletKey> carried;
  for (const auto& token : corpus.tokens()) {
    for (const auto& t : token.triplets) carried.insert(t.key);
  }
  for (const auto& t : result.triplets) CHECK(carried.contains(t.key));
}

TEST_CASE("parse_itemized reads tabs, spaces and bullets") {
  std::istringstream in("Packaging\n\t\xe2\x80\xa2 Wire bonding\n\n    - Ball bond\n  * Flip chip\r\n");
  const auto parsed = parse_itemized(in, "deck");
  CHECK(parsed.doc_id == "deck");
  CHECK(parsed.lines == std::vector<ItemizedLine>{{0, "Packaging"}, {1, "Wire bonding"}, {2, "Ball bond"}, {1, "Flip chip"}});

  std::istringstream four("A\n    B\n");
  CHECK(parse_itemized(four, "x", 4).lines == std::vector<ItemizedLine>{{0, "A"}, {1, "B"}});
  std::istringstream any("A\n");
  CHECK_THROWS_AS(parse_itemized(any, "x", 0), DataError);
}

TEST_CASE("pattern extraction reproduces the surface examples") {
  CHECK(keys(extract_pattern_triplets("New York is the largest city in the United States")) ==
        std::vector<TripletKey>{{"new york", "be the largest city in", "the united states"}});
  CHECK(keys(extract_pattern_triplets("Queen Elizabeth")) == std::vector<TripletKey>{{"elizabeth", "be", "queen"}});
  CHECK(extract_pattern_triplets("hello world").empty());
  CHECK(extract_pattern_triplets("").empty());
  CHECK(keys(extract_pattern_triplets("Berlin is the capital city of Germany.")) ==
        std::vector<TripletKey>{{"berlin", "be the capital city of", "germany"}});
  CHECK(keys(extract_pattern_triplets("The tiger gives a speech")) ==
        std::vector<TripletKey>{{"the tiger", "give", "a speech"}});
  for (const auto& t : extract_pattern_triplets("Queen Elizabeth")) CHECK(t.source == TripletSource::pattern);
}

TEST_CASE("title lexicon is configurable") {
  PatternOptions options;
  options.titles = {"professor"};
  CHECK(extract_pattern_triplets("Queen Elizabeth", options).empty());
  CHECK(keys(extract_pattern_triplets("Professor Ada Lovelace", options)) ==
        std::vector<TripletKey>{{"ada lovelace", "be", "professor"}});
}

TEST_CASE("passive inversion") {
  const auto inverse = passive_inverse(make_triplet("tiger", "give", "speech", TripletSource::pattern, "d"));
  CHECK(inverse.key == TripletKey{"speech", "be given by", "tiger"});
  CHECK(inverse.source == TripletSource::passive_inverse);
  CHECK(inverse.doc_id == "d");

  CHECK(passive_inverse(make_triplet("fab", "produce", "wafers")).key == TripletKey{"wafers", "be produced by", "fab"});
  CHECK(passive_inverse(make_triplet("river", "flow through", "city")).key ==
        TripletKey{"city", "be flowed through by", "river"});

  try {
    passive_inverse(make_triplet("a", "be", "b"));
    FAIL("copula inverted");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("not invertible") == 0);
  }
  CHECK_THROWS_WITH_AS(passive_inverse(make_triplet("wall", "fall in", "1989")), doctest::Contains("not invertible"),
                       DataError);
  CHECK_THROWS_AS(passive_inverse(make_triplet("x", "be located in", "y")), DataError);
}

TEST_CASE("literal objects and participles") {
  CHECK(is_literal(""));
  CHECK(is_literal("1989"));
  CHECK(is_literal("3.6"));
  CHECK(is_literal("-12 %"));
  CHECK_FALSE(is_literal("1989 revolution"));
  CHECK(past_participle("give") == "given");
  CHECK(past_participle("use") == "used");
  CHECK(past_participle("connect") == "connected");
}

TEST_CASE("pattern documents carry passive inversions on request") {
  const std::vector<std::string> sentences{"The tiger gives a speech", "Queen Elizabeth", "hello world"};
  const auto plain = pattern_document(sentences, "talk");
  CHECK(plain.size() == 2);
  CHECK(plain.vocabulary().size() == 2);
  const auto with_passive = pattern_document(sentences, "talk", {}, true);
  CHECK(with_passive.size() == 3);
  CHECK(with_passive.vocabulary().find({"a speech", "be given by", "the tiger"}).has_value());
  CHECK(with_passive.documents()[0].chunks.size() == 1);
}

TEST_CASE("extraction is a pure function") {
  const auto a = extract_structural_triplets(doc({{0, "A"}, {1, "B"}}));
  const auto b = extract_structural_triplets(doc({{0, "A"}, {1, "B"}}));
  CHECK(a.triplets == b.triplets);
  CHECK(a.document == b.document);
  CHECK(extract_pattern_triplets("Queen Elizabeth") == extract_pattern_triplets("Queen Elizabeth"));
}
