#include "aave/tagger.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include "aave/error.hpp"
#include "builtin_pos_lexicon.inc"

namespace aave {

namespace {

enum class Section { none, closed, dialect, open, past, comparatives, er_nouns, markers };

Section parse_section(std::string_view name, std::size_t line) {
  if (name == "closed_class") return Section::closed;
  if (name == "dialect_terms") return Section::dialect;
  if (name == "open_class") return Section::open;
  if (name == "past_participles") return Section::past;
  if (name == "comparatives") return Section::comparatives;
  if (name == "er_nouns") return Section::er_nouns;
  if (name == "discourse_markers") return Section::markers;
  throw ParseError("lexicon: unknown section [" + std::string(name) + "]", line);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool all_punct(std::string_view s) {
  return std::none_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)); });
}

bool all_digits(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) || c == ',' || c == '.';
  }) && std::isdigit(static_cast<unsigned char>(s.front()));
}

}  // namespace

Lexicon Lexicon::parse(std::string_view text) {
  Lexicon lex;
  Section section = Section::none;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;

    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("lexicon: unterminated section header", lineno);
      section = parse_section(line.substr(1, line.size() - 2), lineno);
      continue;
    }
    const auto tab = line.find('\t');
    const std::string word(trim(line.substr(0, tab)));
    const std::string_view rest = tab == std::string_view::npos ? std::string_view{} : trim(line.substr(tab + 1));

    if (section == Section::none) {
      if (word == "version") {
        lex.version = std::stoi(std::string(rest));
        continue;
      }
      throw ParseError("lexicon: entry outside of a section", lineno);
    }

    auto insert_tagged = [&](std::unordered_map<std::string, Pos>& map) {
      if (rest.empty()) throw ParseError("lexicon: missing part of speech for '" + word + "'", lineno);
      Pos p;
      try {
        p = parse_pos(rest);
      } catch (const ArgumentError& e) {
        throw ParseError(std::string("lexicon: ") + e.what(), lineno);
      }
      auto [it, inserted] = map.emplace(word, p);
      if (!inserted && it->second != p) {
        throw ParseError("lexicon: '" + word + "' tagged both " + std::string(to_string(it->second)) +
                             " and " + std::string(to_string(p)),
                         lineno);
      }
    };

    switch (section) {
      case Section::closed: insert_tagged(lex.closed_class); break;
      case Section::dialect: insert_tagged(lex.dialect_terms); break;
      case Section::open: insert_tagged(lex.open_class); break;
      case Section::past: lex.past_participles.insert(word); break;
      case Section::comparatives: lex.comparatives.insert(word); break;
      case Section::er_nouns: lex.er_nouns.insert(word); break;
      case Section::markers: lex.discourse_markers.insert(word); break;
      case Section::none: break;
    }
  }
  return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read lexicon " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

const Lexicon& Lexicon::builtin() {
  static const Lexicon lex = parse(kBuiltinPosLexicon);
  return lex;
}

// ---------------------------------------------------------------------------

Pos LexiconTagger::tag_token(const Token& token, bool sentence_initial) const {
  const std::string& w = token.normalized;
  if (w.empty() || all_punct(token.surface)) return Pos::OTHER;
  if (all_digits(w)) return Pos::NUM;

  const Lexicon& lex = *lexicon_;
  if (auto it = lex.dialect_terms.find(w); it != lex.dialect_terms.end()) return it->second;
  if (auto it = lex.closed_class.find(w); it != lex.closed_class.end()) return it->second;
  if (lex.past_participles.count(w)) return Pos::VERB;
  if (auto it = lex.open_class.find(w); it != lex.open_class.end()) return it->second;
  if (lex.comparatives.count(w)) return Pos::ADJ;

  const auto n = w.size();
  if (n > 4 && w.ends_with("ing")) return Pos::VERB;
  if (n > 2 && token.surface.size() > 3 && token.surface.back() == '\'' &&
      (token.surface.ends_with("in'") || token.surface.ends_with("IN'"))) {
    return Pos::VERB;
  }
  if (n > 3 && w.ends_with("ed")) return Pos::VERB;
  if (n > 3 && w.ends_with("ly")) return Pos::ADV;

  if (!sentence_initial && std::isupper(static_cast<unsigned char>(token.surface.front()))) {
    return Pos::PROPN;
  }
  return Pos::NOUN;
}

namespace {
constexpr std::array<std::string_view, 7> kPossessives = {"my", "your", "his", "her", "our", "their", "its"};

bool in_list(const std::string& w, const std::array<std::string_view, 7>& list) {
  return std::find(list.begin(), list.end(), w) != list.end();
}
}  // namespace

bool LexiconTagger::known(const std::string& w) const {
  const Lexicon& lex = *lexicon_;
  return lex.dialect_terms.count(w) || lex.closed_class.count(w) || lex.past_participles.count(w) ||
         lex.open_class.count(w) || lex.comparatives.count(w);
}

void LexiconTagger::tag(Sentence& sentence) const {
  auto& toks = sentence.tokens;
  bool initial = true;
  for (auto& t : toks) {
    t.pos = tag_token(t, initial);
    // A capital right after a quote or bracket still starts the sentence.
    if (t.pos != Pos::OTHER) initial = false;
  }

  // Third-person -s verbs look like plural nouns to the suffix rules. An
  // unknown -s word right after "the/my/... noun", a proper noun (or a
  // sentence-initial capitalized unknown) or he/she/it is taken as the verb
  // ("my mother cooks"), unless a verb follows, in which case it was the
  // head of a compound subject ("the car keys are").
  for (std::size_t i = 1; i < toks.size(); ++i) {
    auto& t = toks[i];
    const auto& w = t.normalized;
    if (t.pos != Pos::NOUN || w.size() < 4 || !w.ends_with('s') || known(w)) continue;
    if (w.ends_with("ss") || w.ends_with("us") || w.ends_with("is") || w.ends_with("'s")) continue;
    const Token& prev = toks[i - 1];
    const bool determined_noun =
        prev.pos == Pos::NOUN && i >= 2 &&
        (toks[i - 2].pos == Pos::DET || in_list(toks[i - 2].normalized, kPossessives));
    // a capitalized unknown word opening the sentence is tagged NOUN, but is
    // usually a name ("Mike works nights")
    const bool initial_name = i == 1 && prev.pos == Pos::NOUN && !known(prev.normalized) &&
                              std::isupper(static_cast<unsigned char>(prev.surface.front())) &&
                              !prev.normalized.ends_with('s');
    const bool after_subject = determined_noun || initial_name || prev.pos == Pos::PROPN ||
                               prev.normalized == "he" || prev.normalized == "she" || prev.normalized == "it";
    if (!after_subject) continue;
    if (i + 1 < toks.size()) {
      const Pos next = toks[i + 1].pos;
      if (next == Pos::VERB || next == Pos::AUX || next == Pos::MODAL || next == Pos::NEG) continue;
    }
    t.pos = Pos::VERB;
  }
}

Sentence tag(Sentence sentence, const Lexicon& lexicon) {
  LexiconTagger(lexicon).tag(sentence);
  return sentence;
}

void tag_corpus(Corpus& corpus, const Tagger& tagger) {
  for (auto& s : corpus.sentences) tagger.tag(s);
  corpus.tagged = true;
}

bool is_subject_candidate(const Token& token, const Lexicon& lexicon) {
  if (token.pos != Pos::PRON && token.pos != Pos::NOUN && token.pos != Pos::PROPN) return false;
  return !lexicon.discourse_markers.count(token.normalized);
}

}  // namespace aave
