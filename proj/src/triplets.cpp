#include "hrlda/triplets.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <istream>
#include <map>
#include <optional>

#include "hrlda/error.hpp"

namespace hrlda {

namespace {

struct VerbEntry {
  std::string_view lemma;
  std::string_view participle;
  std::array<std::string_view, 5> forms;
};

// Closed verb list for surface extraction and passive inversion.
constexpr std::array<VerbEntry, 24> kVerbs{{
    {"be", "been", {"is", "are", "was", "were", "be"}},
    {"have", "had", {"has", "have", "had", "", ""}},
    {"give", "given", {"gives", "give", "gave", "", ""}},
    {"contain", "contained", {"contains", "contain", "contained", "", ""}},
    {"include", "included", {"includes", "include", "included", "", ""}},
    {"use", "used", {"uses", "use", "used", "", ""}},
    {"make", "made", {"makes", "make", "made", "", ""}},
    {"produce", "produced", {"produces", "produce", "produced", "", ""}},
    {"require", "required", {"requires", "require", "required", "", ""}},
    {"connect", "connected", {"connects", "connect", "connected", "", ""}},
    {"form", "formed", {"forms", "formed", "", "", ""}},
    {"build", "built", {"builds", "build", "built", "", ""}},
    {"write", "written", {"writes", "write", "wrote", "", ""}},
    {"take", "taken", {"takes", "take", "took", "", ""}},
    {"hold", "held", {"holds", "hold", "held", "", ""}},
    {"become", "become", {"becomes", "become", "became", "", ""}},
    {"find", "found", {"finds", "find", "found", "", ""}},
    {"protect", "protected", {"protects", "protect", "protected", "", ""}},
    {"attach", "attached", {"attaches", "attach", "attached", "", ""}},
    {"bond", "bonded", {"bonds", "bonded", "", "", ""}},
    {"cover", "covered", {"covers", "cover", "covered", "", ""}},
    {"host", "hosted", {"hosts", "host", "hosted", "", ""}},
    {"lead", "led", {"leads", "lead", "led", "", ""}},
    {"see", "seen", {"sees", "see", "saw", "", ""}},
}};

constexpr std::array<std::string_view, 17> kPrepositions{
    "in", "of", "on", "at", "for", "with", "by", "from", "to", "into", "onto", "over", "under", "between", "within",
    "across", "through"};

const VerbEntry* verb_for_form(std::string_view word) {
  for (const auto& entry : kVerbs) {
    for (auto form : entry.forms) {
      if (!form.empty() && form == word) return &entry;
    }
  }
  return nullptr;
}

const VerbEntry* verb_for_lemma(std::string_view lemma) {
  for (const auto& entry : kVerbs) {
    if (entry.lemma == lemma) return &entry;
  }
  return nullptr;
}

bool is_preposition(std::string_view word) {
  return std::find(kPrepositions.begin(), kPrepositions.end(), word) != kPrepositions.end();
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

std::string join(const std::vector<std::string>& words, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (!out.empty()) out.push_back(' ');
    out += words[i];
  }
  return out;
}

bool starts_upper(const std::string& word) {
  return !word.empty() && std::isupper(static_cast<unsigned char>(word.front()));
}

std::string strip_bullet(std::string_view text) {
  static constexpr std::array<std::string_view, 6> kBullets{"\xE2\x80\xA2", "\xE2\x97\xA6", "\xE2\x96\xAA", "-", "*",
                                                            "+"};
  for (auto bullet : kBullets) {
    if (text.starts_with(bullet)) {
      auto rest = text.substr(bullet.size());
      if (rest.empty() || rest.front() == ' ' || rest.front() == '\t') return std::string(rest);
    }
  }
  if (text.starts_with("o ")) return std::string(text.substr(2));
  return std::string(text);
}

}  // namespace

ItemizedDoc parse_itemized(std::istream& in, std::string doc_id, int spaces_per_level) {
  if (spaces_per_level < 1) throw DataError("spaces per indent level must be positive");
  ItemizedDoc doc{std::move(doc_id), {}};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t tabs = 0;
    while (tabs < line.size() && line[tabs] == '\t') ++tabs;
    int level = static_cast<int>(tabs);
    std::size_t pos = tabs;
    if (tabs == 0) {
      while (pos < line.size() && line[pos] == ' ') ++pos;
      level = static_cast<int>(pos) / spaces_per_level;
    }
    std::string text = strip_bullet(std::string_view(line).substr(pos));
    const auto first = text.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    text = text.substr(first, text.find_last_not_of(" \t") - first + 1);
    if (normalize_phrase(text).empty()) continue;
    doc.lines.push_back({level, std::move(text)});
  }
  return doc;
}

StructuralExtraction extract_structural_triplets(const ItemizedDoc& doc) {
  StructuralExtraction result;
  std::vector<std::string> contents;
  std::vector<std::optional<std::size_t>> parent_of;
  std::vector<std::pair<int, std::size_t>> open;  // (level, line index)
  for (const auto& line : doc.lines) {
    const std::size_t index = contents.size();
    contents.push_back(normalize_phrase(line.text));
    while (!open.empty() && open.back().first >= line.indent_level) open.pop_back();
    parent_of.push_back(open.empty() ? std::nullopt : std::optional(open.back().second));
    open.emplace_back(line.indent_level, index);
  }

  std::vector<std::vector<RelationTriplet>> attached(contents.size());
  std::vector<std::optional<RelationTriplet>> own(contents.size());
  for (std::size_t i = 0; i < contents.size(); ++i) {
    if (!parent_of[i] || contents[i].empty()) continue;
    auto t = make_triplet(contents[i], kSubtopicPredicate, contents[*parent_of[i]], TripletSource::structural,
                          doc.doc_id);
    result.triplets.push_back(t);
    own[i] = t;
    attached[*parent_of[i]].push_back(std::move(t));
  }

  CorpusBuilder builder;
  builder.begin_document(doc.doc_id.empty() ? std::string("itemized") : doc.doc_id);
  builder.begin_chunk();
  for (std::size_t i = 0; i < contents.size(); ++i) {
    std::vector<RelationTriplet> triplets;
    if (own[i]) triplets.push_back(*own[i]);
    triplets.insert(triplets.end(), attached[i].begin(), attached[i].end());
    if (triplets.empty()) continue;
    builder.begin_sentence();
    builder.add_token(doc.lines[i].text, std::move(triplets));
  }
  result.document = std::move(builder).finish();
  return result;
}

std::set<std::string, std::less<>> PatternOptions::default_titles() {
  return {"queen", "king",  "prince",  "princess", "president", "professor", "prof",  "doctor", "dr",
          "mr",    "mrs",   "ms",      "sir",      "lord",      "lady",      "pope",  "saint",  "senator",
          "mayor", "judge", "captain", "general",  "chancellor", "emperor",  "empress"};
}

std::vector<RelationTriplet> extract_pattern_triplets(std::string_view sentence, const PatternOptions& options,
                                                      const std::string& doc_id) {
  std::vector<RelationTriplet> out;
  const auto words = split_words(sentence);

  // Rule (a): first verb from the closed list splits subject from the rest; the
  // predicate runs up to the last preposition that still leaves an object.
  for (std::size_t i = 1; i < words.size(); ++i) {
    const VerbEntry* verb = verb_for_form(normalize_phrase(words[i]));
    if (verb == nullptr) continue;
    const std::string subject = normalize_phrase(join(words, 0, i));
    if (subject.empty() || i + 1 >= words.size()) break;
    std::size_t split = i;  // index of the last predicate word
    for (std::size_t p = words.size() - 1; p > i + 1; --p) {
      if (is_preposition(normalize_phrase(words[p - 1])) && !normalize_phrase(join(words, p, words.size())).empty()) {
        split = p - 1;
        break;
      }
    }
    std::string predicate(verb->lemma);
    if (split > i) predicate += " " + join(words, i + 1, split + 1);
    const std::string object = normalize_phrase(join(words, split + 1, words.size()));
    if (!object.empty()) out.push_back(make_triplet(subject, predicate, object, TripletSource::pattern, doc_id));
    break;
  }

  // Rule (b): <Title> <ProperName...>.
  for (std::size_t i = 0; i + 1 < words.size(); ++i) {
    const std::string title = normalize_phrase(words[i]);
    if (!options.titles.contains(title) || !starts_upper(words[i + 1])) continue;
    std::size_t end = i + 1;
    while (end < words.size() && starts_upper(words[end]) && !options.titles.contains(normalize_phrase(words[end]))) {
      ++end;
    }
    if (end == i + 1) continue;
    out.push_back(make_triplet(join(words, i + 1, end), "be", title, TripletSource::pattern, doc_id));
    i = end - 1;
  }
  return out;
}

bool is_literal(std::string_view object) {
  if (object.empty()) return true;
  bool digit = false;
  for (unsigned char c : object) {
    if (std::isdigit(c)) {
      digit = true;
    } else if (!(c == '.' || c == ',' || c == '-' || c == '+' || c == '%' || c == ' ')) {
      return false;
    }
  }
  return digit;
}

std::string past_participle(std::string_view verb_lemma) {
  if (const VerbEntry* entry = verb_for_lemma(verb_lemma)) return std::string(entry->participle);
  std::string out(verb_lemma);
  if (out.ends_with('e')) {
    out += 'd';
  } else {
    out += "ed";
  }
  return out;
}

RelationTriplet passive_inverse(const RelationTriplet& triplet) {
  const auto words = split_words(triplet.verb());
  if (words.empty() || words.front() == "be") {
    throw DataError("not invertible: copula relation (" + triplet.subject() + ", " + triplet.verb() + ", " +
                    triplet.object() + ")");
  }
  if (is_literal(triplet.object())) {
    throw DataError("not invertible: literal object in (" + triplet.subject() + ", " + triplet.verb() + ")");
  }
  std::string predicate = "be " + past_participle(words.front());
  if (words.size() > 1) predicate += " " + join(words, 1, words.size());
  predicate += " by";
  return make_triplet(triplet.object(), predicate, triplet.subject(), TripletSource::passive_inverse, triplet.doc_id);
}

Corpus pattern_document(const std::vector<std::string>& sentences, const std::string& doc_id,
                        const PatternOptions& options, bool with_passive) {
  CorpusBuilder builder;
  builder.begin_document(doc_id);
  builder.begin_chunk();
  for (const auto& sentence : sentences) {
    builder.begin_sentence();
    std::vector<std::string> order;
    std::map<std::string, std::vector<RelationTriplet>> by_subject;
    auto attach = [&](RelationTriplet t) {
      if (!by_subject.contains(t.subject())) order.push_back(t.subject());
      by_subject[t.subject()].push_back(std::move(t));
    };
    for (auto& t : extract_pattern_triplets(sentence, options, doc_id)) {
      std::optional<RelationTriplet> inverse;
      if (with_passive) {
        try {
          inverse = passive_inverse(t);
        } catch (const DataError&) {
        }
      }
      attach(std::move(t));
      if (inverse) attach(std::move(*inverse));
    }
    for (const auto& subject : order) builder.add_token(subject, std::move(by_subject[subject]));
  }
  return std::move(builder).finish();
}

}  // namespace hrlda
