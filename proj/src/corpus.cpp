#include "hrlda/corpus.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "hrlda/error.hpp"

namespace hrlda {

namespace {

bool is_ascii_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_ascii_punct(unsigned char c) { return c < 0x80 && std::ispunct(c); }

}  // namespace

std::string normalize_phrase(std::string_view raw) {
  std::string collapsed;
  collapsed.reserve(raw.size());
  bool pending_space = false;
  for (unsigned char c : raw) {
    if (is_ascii_space(c)) {
      pending_space = !collapsed.empty();
      continue;
    }
    if (pending_space) collapsed.push_back(' ');
    pending_space = false;
    collapsed.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
  }
  std::size_t begin = 0;
  std::size_t end = collapsed.size();
  auto strippable = [](unsigned char c) { return is_ascii_space(c) || is_ascii_punct(c); };
  while (begin < end && strippable(collapsed[begin])) ++begin;
  while (end > begin && strippable(collapsed[end - 1])) --end;
  return collapsed.substr(begin, end - begin);
}

std::size_t TripletKeyHash::operator()(const TripletKey& key) const noexcept {
  std::hash<std::string> h;
  std::size_t seed = h(key.subject);
  seed ^= h(key.verb) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
  seed ^= h(key.object) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
  return seed;
}

std::string_view to_string(TripletSource source) {
  switch (source) {
    case TripletSource::ingested: return "ingested";
    case TripletSource::structural: return "structural";
    case TripletSource::pattern: return "pattern";
    case TripletSource::passive_inverse: return "passive-inverse";
  }
  return "ingested";
}

TripletSource triplet_source_from_string(std::string_view text) {
  if (text == "ingested") return TripletSource::ingested;
  if (text == "structural") return TripletSource::structural;
  if (text == "pattern") return TripletSource::pattern;
  if (text == "passive-inverse") return TripletSource::passive_inverse;
  throw DataError("unknown triplet source '" + std::string(text) + "'");
}

RelationTriplet make_triplet(std::string_view subject, std::string_view verb, std::string_view object,
                             TripletSource source, std::string doc_id) {
  RelationTriplet t{{normalize_phrase(subject), normalize_phrase(verb), normalize_phrase(object)}, source,
                    std::move(doc_id)};
  if (t.key.subject.empty()) throw DataError("triplet subject is empty");
  if (t.key.verb.empty()) throw DataError("triplet verb is empty");
  return t;
}

std::size_t Document::token_count() const {
  std::size_t n = 0;
  for (const auto& chunk : chunks) {
    for (const auto& sentence : chunk) n += sentence.size();
  }
  return n;
}

TripletId Vocabulary::intern(const TripletKey& key) {
  auto [it, inserted] = ids_.try_emplace(key, static_cast<TripletId>(keys_.size()));
  if (inserted) keys_.push_back(key);
  return it->second;
}

std::optional<TripletId> Vocabulary::find(const TripletKey& key) const {
  if (auto it = ids_.find(key); it != ids_.end()) return it->second;
  return std::nullopt;
}

std::size_t Corpus::document_index(std::string_view doc_id) const {
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    if (documents_[i].doc_id == doc_id) return i;
  }
  throw DataError("unknown document id '" + std::string(doc_id) + "'");
}

// ---------------------------------------------------------------------------

void CorpusBuilder::begin_document(std::string doc_id) {
  if (doc_id.empty()) throw DataError("document id is empty");
  if (!seen_ids_.insert(doc_id).second) throw DataError("duplicate document id '" + doc_id + "'");
  corpus_.documents_.push_back(Document{std::move(doc_id), {}});
}

void CorpusBuilder::begin_chunk() {
  if (corpus_.documents_.empty()) throw InvariantError("begin_chunk before begin_document");
  corpus_.documents_.back().chunks.emplace_back();
}

void CorpusBuilder::begin_sentence() {
  if (corpus_.documents_.empty() || corpus_.documents_.back().chunks.empty()) {
    throw InvariantError("begin_sentence before begin_chunk");
  }
  corpus_.documents_.back().chunks.back().emplace_back();
}

void CorpusBuilder::add_token(std::string_view raw, std::vector<RelationTriplet> triplets) {
  if (corpus_.documents_.empty() || corpus_.documents_.back().chunks.empty() ||
      corpus_.documents_.back().chunks.back().empty()) {
    throw InvariantError("add_token before begin_sentence");
  }
  if (triplets.empty()) throw DataError("token '" + std::string(raw) + "' has an empty triplet list");
  auto& doc = corpus_.documents_.back();
  NounPhraseToken token;
  token.raw = std::string(raw);
  token.content = normalize_phrase(raw);
  if (token.content.empty()) throw DataError("token '" + std::string(raw) + "' normalizes to an empty phrase");
  token.doc_id = doc.doc_id;
  token.doc_index = corpus_.documents_.size() - 1;
  token.chunk_index = doc.chunks.size() - 1;
  token.sentence_index = doc.chunks.back().size() - 1;
  for (auto& t : triplets) {
    if (t.key.subject.empty() || t.key.verb.empty()) throw DataError("triplet with empty subject or verb");
    t.doc_id = doc.doc_id;
    token.triplet_ids.push_back(corpus_.vocabulary_.intern(t.key));
  }
  token.triplets = std::move(triplets);
  doc.chunks.back().back().push_back(corpus_.tokens_.size());
  corpus_.tokens_.push_back(std::move(token));
}

Corpus CorpusBuilder::finish() && { return std::move(corpus_); }

// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& origin, int line, const std::string& what) {
  throw DataError(origin + ":" + std::to_string(line) + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& origin, int line, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) schema_error(origin, line, where + ": missing field '" + key + "'");
  return obj[key];
}

std::string require_string(const json& obj, const char* key, const std::string& origin, int line,
                           const std::string& where) {
  const json& v = require(obj, key, origin, line, where);
  if (!v.is_string()) schema_error(origin, line, where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

void check_location(const json& tok, const char* key, std::size_t expected, const std::string& origin, int line,
                    const std::string& where) {
  if (!tok.contains(key)) return;
  const json& v = tok[key];
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    schema_error(origin, line, where + ": '" + key + "' must be a non-negative integer");
  }
  if (static_cast<std::size_t>(v.get<long long>()) != expected) {
    schema_error(origin, line, where + ": '" + key + "' disagrees with the token's position");
  }
}

}  // namespace

Corpus parse_corpus(std::istream& in, const std::string& origin) {
  CorpusBuilder builder;
  std::string line;
  int line_no = 0;
  bool any = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& e) {
      schema_error(origin, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) schema_error(origin, line_no, "document must be a JSON object");
    const std::string doc_id = require_string(doc, "doc_id", origin, line_no, "document");
    const json& chunks = require(doc, "chunks", origin, line_no, "document '" + doc_id + "'");
    if (!chunks.is_array()) schema_error(origin, line_no, "'chunks' must be an array");
    try {
      builder.begin_document(doc_id);
    } catch (const DataError& e) {
      schema_error(origin, line_no, e.what());
    }
    any = true;
    for (std::size_t c = 0; c < chunks.size(); ++c) {
      if (!chunks[c].is_array()) schema_error(origin, line_no, "chunk " + std::to_string(c) + " must be an array");
      builder.begin_chunk();
      for (std::size_t s = 0; s < chunks[c].size(); ++s) {
        const json& sentence = chunks[c][s];
        const std::string where_s = "chunk " + std::to_string(c) + " sentence " + std::to_string(s);
        if (!sentence.is_array()) schema_error(origin, line_no, where_s + " must be an array");
        builder.begin_sentence();
        for (std::size_t k = 0; k < sentence.size(); ++k) {
          const json& tok = sentence[k];
          const std::string where = where_s + " token " + std::to_string(k);
          if (!tok.is_object()) schema_error(origin, line_no, where + " must be an object");
          const std::string raw = require_string(tok, "raw", origin, line_no, where);
          check_location(tok, "chunk_index", c, origin, line_no, where);
          check_location(tok, "sentence_index", s, origin, line_no, where);
          const json& triplets = require(tok, "triplets", origin, line_no, where);
          if (!triplets.is_array() || triplets.empty()) {
            schema_error(origin, line_no, where + ": 'triplets' must be a non-empty array");
          }
          std::vector<RelationTriplet> parsed;
          for (std::size_t r = 0; r < triplets.size(); ++r) {
            const std::string where_r = where + " triplet " + std::to_string(r);
            const json& tr = triplets[r];
            try {
              auto source = TripletSource::ingested;
              if (tr.is_object() && tr.contains("source")) {
                source = triplet_source_from_string(require_string(tr, "source", origin, line_no, where_r));
              }
              parsed.push_back(make_triplet(require_string(tr, "subject", origin, line_no, where_r),
                                            require_string(tr, "verb", origin, line_no, where_r),
                                            require_string(tr, "object", origin, line_no, where_r), source, doc_id));
            } catch (const DataError& e) {
              const std::string msg = e.what();
              if (msg.rfind(origin + ":", 0) == 0) throw;
              schema_error(origin, line_no, where_r + ": " + msg);
            }
          }
          try {
            builder.add_token(raw, std::move(parsed));
          } catch (const DataError& e) {
            schema_error(origin, line_no, where + ": " + e.what());
          }
        }
      }
    }
  }
  if (!any) throw DataError(origin + ": empty corpus");
  return std::move(builder).finish();
}

Corpus load_corpus(const std::filesystem::path& path, const CorpusConfig& config) {
  config.validate();
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path.string());
  return parse_corpus(in, path.string());
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& doc : corpus.documents()) {
    json chunks = json::array();
    for (const auto& chunk : doc.chunks) {
      json jc = json::array();
      for (const auto& sentence : chunk) {
        json js = json::array();
        for (TokenIndex t : sentence) {
          const auto& token = corpus.token(t);
          json triplets = json::array();
          for (const auto& tr : token.triplets) {
            json jt = {{"subject", tr.subject()}, {"verb", tr.verb()}, {"object", tr.object()}};
            if (tr.source != TripletSource::ingested) jt["source"] = std::string(to_string(tr.source));
            triplets.push_back(std::move(jt));
          }
          js.push_back({{"raw", token.raw}, {"triplets", std::move(triplets)}});
        }
        jc.push_back(std::move(js));
      }
      chunks.push_back(std::move(jc));
    }
    out << json{{"doc_id", doc.doc_id}, {"chunks", std::move(chunks)}}.dump() << '\n';
  }
}

std::string corpus_to_jsonl(const Corpus& corpus) {
  std::ostringstream out;
  write_corpus(out, corpus);
  return out.str();
}

// ---------------------------------------------------------------------------

void SynonymLexicon::add(std::string_view a, std::string_view b) {
  const std::string na = normalize_phrase(a);
  const std::string nb = normalize_phrase(b);
  if (na.empty() || nb.empty() || na == nb) return;
  table_[na].insert(nb);
  table_[nb].insert(na);
}

bool SynonymLexicon::related(std::string_view a, std::string_view b) const {
  auto it = table_.find(a);
  return it != table_.end() && it->second.contains(b);
}

const std::set<std::string, std::less<>>& SynonymLexicon::synonyms(std::string_view phrase) const {
  static const std::set<std::string, std::less<>> none;
  auto it = table_.find(phrase);
  return it == table_.end() ? none : it->second;
}

SynonymLexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon file: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  if (!j.is_array()) throw DataError(path.string() + ": lexicon must be a JSON array of string pairs");
  SynonymLexicon lexicon;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& pair = j[i];
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
      throw DataError(path.string() + ": entry " + std::to_string(i) + " is not a pair of strings");
    }
    lexicon.add(pair[0].get<std::string>(), pair[1].get<std::string>());
  }
  return lexicon;
}

std::string acronym_of(std::string_view phrase) {
  std::string initials;
  bool at_word_start = true;
  for (char c : phrase) {
    if (c == ' ') {
      at_word_start = true;
    } else if (at_word_start) {
      initials.push_back(c);
      at_word_start = false;
    }
  }
  return initials.size() >= 2 ? initials : std::string{};
}

bool is_synonym_or_acronym(std::string_view a, std::string_view b, const SynonymLexicon* lexicon) {
  if (a == b) return true;
  if (lexicon != nullptr && lexicon->related(a, b)) return true;
  if (a.empty() || b.empty()) return false;
  return acronym_of(b) == a || acronym_of(a) == b;
}

}  // namespace hrlda
