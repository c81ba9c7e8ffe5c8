#include "aave/detectors.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include <json.hpp>

#include "aave/error.hpp"

namespace aave {

namespace {

using json = nlohmann::json;

template <std::size_t N>
bool in(const std::string& w, const std::array<std::string_view, N>& set) {
  return std::find(set.begin(), set.end(), w) != set.end();
}

constexpr std::array<std::string_view, 12> kClauseBreakWords = {
    ",", ".", "!", "?", ";", ":", "but", "and", "or", "so", "because", "cause",
};

constexpr std::array<std::string_view, 20> kModalWords = {
    "can", "could", "may", "might", "must", "shall", "should", "will", "would", "oughta",
    "finna", "gonna", "tryna", "imma", "ima", "'ll", "'d", "ca", "wo", "sha",
};

constexpr std::array<std::string_view, 18> kNegatorWords = {
    "n't", "not", "never", "nothing", "nobody", "none", "nowhere", "neither", "ain't",
    "cannot", "don", "dont", "cant", "wont", "aint", "nothin", "nuthin", "no",
};

constexpr std::array<std::string_view, 9> kVerbalNegators = {
    "n't", "not", "ain't", "aint", "cannot", "don", "dont", "cant", "wont",
};

// Within two tokens before "be" these make it an infinitive or a
// complement ("have to be", "let it be", "wanna be").
constexpr std::array<std::string_view, 9> kBeBlockers = {"have", "has", "had", "'ve", "having", "let", "wanna", "gotta", "lemme"};

constexpr std::array<std::string_view, 3> kDoForms = {"do", "does", "did"};

// Words that may not precede perfective "done": they make it a participle or
// an adjective ("have done", "is done", "got done").
constexpr std::array<std::string_view, 19> kDoneBlockers = {
    "have", "has", "had", "having", "be", "is", "are", "was", "were", "been",
    "'s", "'re", "'m", "get", "got", "'ve", "am", "being", "'d",
};

constexpr std::array<std::string_view, 4> kComparativeMarkers = {"more", "most", "less", "least"};
constexpr std::array<std::string_view, 4> kIrregularComparatives = {"better", "worse", "best", "worst"};
constexpr std::array<std::string_view, 4> kStackFirst = {"might", "may", "must", "should"};
constexpr std::array<std::string_view, 8> kStackSecond = {"can", "could", "would", "will", "should", "oughta", "ca", "wo"};

constexpr std::array<std::string_view, 16> kCopulaPronouns = {
    "he", "she", "we", "they", "you", "it", "that", "this", "who",
    "y'all", "yall", "u", "ya", "dey", "dat", "dis",
};

constexpr std::array<std::string_view, 3> kPredicateModals = {"gonna", "finna", "tryna"};

constexpr std::array<std::string_view, 14> kLocativePreps = {
    "in", "at", "on", "over", "outside", "inside", "up", "down", "out", "by", "around", "near", "behind", "from",
};

constexpr std::array<std::string_view, 8> kLocativeAdverbs = {
    "here", "there", "home", "outside", "inside", "upstairs", "downstairs", "away",
};

constexpr std::array<std::string_view, 14> kVocatives = {
    "man", "girl", "boy", "bro", "bruh", "dude", "son", "baby", "lord", "sis", "yo", "brother", "sister", "homie",
};

constexpr std::array<std::string_view, 4> kDemonstratives = {"this", "that", "these", "those"};

constexpr std::array<std::string_view, 3> kRelativeWords = {"who", "that", "which"};

bool is_break(const Token& t) { return in(t.normalized, kClauseBreakWords) || t.normalized == "cuz"; }

bool is_modal(const Token& t) { return t.pos == Pos::MODAL || in(t.normalized, kModalWords); }

bool is_ing(const Token& t) {
  return (t.normalized.size() > 4 && t.normalized.ends_with("ing")) ||
         (t.surface.size() > 3 && (t.surface.ends_with("in'") || t.surface.ends_with("IN'")));
}

bool has_past_morphology(const Token& t, const Lexicon& lex) {
  return (t.normalized.size() > 3 && t.normalized.ends_with("ed")) || lex.past_participles.count(t.normalized) > 0;
}

FeatureHit make_hit(FeatureKind f, const Sentence& s, std::size_t b, std::size_t e) {
  FeatureHit h;
  h.feature = f;
  h.doc_id = s.doc_id;
  h.sentence_index = s.index;
  h.begin = b;
  h.end = e;
  return h;
}

std::pair<std::size_t, std::size_t> clause_of(const Sentence& s, std::size_t i) {
  for (const auto& span : clause_spans(s)) {
    if (i >= span.first && i < span.second) return span;
  }
  return {i, i};
}

bool is_question(const Sentence& s) {
  for (auto it = s.tokens.rbegin(); it != s.tokens.rend(); ++it) {
    if (it->normalized == "?") return true;
    if (it->pos != Pos::OTHER) return false;
  }
  return false;
}

// The first index of a clause that can hold its subject: leading
// interjections, conjunctions, adverbs and vocatives are skipped.
std::size_t subject_slot(const Sentence& s, std::pair<std::size_t, std::size_t> clause) {
  std::size_t i = clause.first;
  while (i < clause.second) {
    const Token& t = s.tokens[i];
    const bool vocative = i == 0 && (t.pos == Pos::NOUN || t.pos == Pos::INTERJ) && in(t.normalized, kVocatives);
    if (t.pos == Pos::INTERJ || t.pos == Pos::CONJ || t.pos == Pos::ADV || vocative ||
        (t.pos == Pos::OTHER && !is_break(t))) {
      ++i;
    } else {
      break;
    }
  }
  return i;
}

// A tensed verb in the rest of the clause means the words after the subject
// were a modifier ("the man in the house yelled"), not a predicate.
bool finite_verb_follows(const Sentence& s, std::size_t from, std::size_t clause_end) {
  for (std::size_t k = from; k < clause_end; ++k) {
    const Token& t = s.tokens[k];
    if (in(t.normalized, kRelativeWords)) return false;
    if (t.pos == Pos::AUX || t.pos == Pos::MODAL || t.pos == Pos::NEG) return true;
    // "ready to go": an infinitive is not a tensed verb
    if (t.pos == Pos::VERB && !is_ing(t) && !(k > from && s.tokens[k - 1].normalized == "to")) return true;
  }
  return false;
}

// Index of the last token of the predicate opener starting at j, if any.
std::optional<std::size_t> predicate_opener(const Sentence& s, std::size_t j, std::size_t clause_end) {
  const auto& toks = s.tokens;
  const Token& t = toks[j];
  if (in(t.normalized, kPredicateModals)) return j;

  std::optional<std::size_t> last;
  if (t.pos == Pos::ADJ && t.normalized != "better") {
    last = j;
  } else if (t.pos == Pos::VERB && is_ing(t)) {
    last = j;
  } else if (t.pos == Pos::DET && j + 1 < clause_end) {
    const Pos next = toks[j + 1].pos;
    if (next == Pos::NOUN || next == Pos::PROPN || next == Pos::ADJ || next == Pos::NUM) last = j + 1;
  } else if (t.pos == Pos::PREP && in(t.normalized, kLocativePreps)) {
    last = j;
  } else if (in(t.normalized, kLocativeAdverbs)) {
    last = j;
  }
  if (!last) return std::nullopt;
  if (finite_verb_follows(s, *last + 1, clause_end)) return std::nullopt;
  return last;
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> clause_spans(const Sentence& s) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.tokens.size(); ++i) {
    if (i == s.tokens.size() || is_break(s.tokens[i])) {
      if (i > start) spans.emplace_back(start, i);
      start = i + 1;
    }
  }
  return spans;
}

bool is_negator(const Token& t) {
  if (t.normalized == "no") return t.pos == Pos::DET;
  return in(t.normalized, kNegatorWords);
}

std::optional<std::string> extract_subject(const Sentence& s, const FeatureHit& hit, const Lexicon& lex) {
  if (hit.begin >= s.tokens.size()) return std::nullopt;
  if (hit.feature == FeatureKind::NullCopula) return s.tokens[hit.begin].normalized;
  const auto clause = clause_of(s, hit.begin);
  for (std::size_t k = hit.begin; k-- > clause.first;) {
    if (is_subject_candidate(s.tokens[k], lex)) return s.tokens[k].normalized;
  }
  return std::nullopt;
}

std::vector<FeatureHit> detect_aint(const Sentence& s, const Lexicon& lex) {
  std::vector<FeatureHit> hits;
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    const auto& w = s.tokens[i].normalized;
    if (w == "ain't" || w == "aint") {
      auto h = make_hit(FeatureKind::Aint, s, i, i + 1);
      h.subject = extract_subject(s, h, lex);
      hits.push_back(std::move(h));
    }
  }
  return hits;
}

std::vector<FeatureHit> detect_habitual_be(const Sentence& s, const Lexicon& lex) {
  std::vector<FeatureHit> hits;
  const auto& toks = s.tokens;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].normalized != "be") continue;

    // Imperatives: nothing but punctuation before "be".
    const bool initial = std::all_of(toks.begin(), toks.begin() + static_cast<std::ptrdiff_t>(i),
                                     [](const Token& t) { return t.pos == Pos::OTHER; });
    if (initial) continue;

    bool blocked = false;
    for (std::size_t k = i >= 2 ? i - 2 : 0; k < i; ++k) {
      const auto& w = toks[k].normalized;
      if (w == "to" || is_modal(toks[k]) || in(w, kBeBlockers)) blocked = true;
    }
    if (blocked) continue;

    std::size_t k = i;
    while (k > 0 && toks[k - 1].pos == Pos::ADV) --k;
    if (k == 0) continue;
    const Token& prev = toks[k - 1];

    bool subject_before = is_subject_candidate(prev, lex);
    if (!subject_before && prev.pos == Pos::NEG) {
      // "they don't be", "she dont be": negated do-support with a subject.
      std::size_t d = k - 1;
      if (prev.normalized == "n't" && d > 0 && in(toks[d - 1].normalized, kDoForms)) {
        --d;
      } else if (prev.normalized != "dont" && prev.normalized != "don") {
        continue;
      }
      while (d > 0 && toks[d - 1].pos == Pos::ADV) --d;
      subject_before = d > 0 && is_subject_candidate(toks[d - 1], lex);
    }
    if (!subject_before) continue;

    auto h = make_hit(FeatureKind::HabitualBe, s, i, i + 1);
    h.subject = extract_subject(s, h, lex);
    hits.push_back(std::move(h));
  }
  return hits;
}

std::vector<FeatureHit> detect_negative_concord(const Sentence& s, const Lexicon& lex) {
  std::vector<FeatureHit> hits;
  for (const auto& [b, e] : clause_spans(s)) {
    std::size_t count = 0;
    bool verbal = false;
    std::size_t first = e;
    std::size_t last = b;
    for (std::size_t i = b; i < e; ++i) {
      const Token& t = s.tokens[i];
      if (!is_negator(t)) continue;
      ++count;
      verbal = verbal || in(t.normalized, kVerbalNegators);
      first = std::min(first, i);
      last = i;
    }
    // Inverted negative auxiliary opening the clause: "ain't nobody", "can't nobody".
    const std::size_t slot = subject_slot(s, {b, e});
    bool inverted = false;
    if (slot < e) {
      const auto& w = s.tokens[slot].normalized;
      inverted = w == "ain't" || w == "aint" ||
                 (slot + 1 < e && s.tokens[slot + 1].normalized == "n't" &&
                  (is_modal(s.tokens[slot]) || s.tokens[slot].pos == Pos::AUX));
    }
    if (count >= 2 && (verbal || inverted)) {
      auto h = make_hit(FeatureKind::NegativeConcord, s, first, last + 1);
      h.subject = extract_subject(s, h, lex);
      hits.push_back(std::move(h));
    }
  }
  return hits;
}

std::vector<FeatureHit> detect_double_comparative(const Sentence& s, const Lexicon& lex) {
  std::vector<FeatureHit> hits;
  const auto& toks = s.tokens;
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    if (!in(toks[i].normalized, kComparativeMarkers)) continue;
    const Token& next = toks[i + 1];
    const auto& w = next.normalized;
    const bool inflected = (w.ends_with("er") || w.ends_with("est")) &&
                           (next.pos == Pos::ADJ || next.pos == Pos::ADV) && !lex.er_nouns.count(w);
    if (inflected || in(w, kIrregularComparatives)) {
      auto h = make_hit(FeatureKind::DoubleComparative, s, i, i + 2);
      h.subject = extract_subject(s, h, lex);
      hits.push_back(std::move(h));
    }
  }
  return hits;
}

std::vector<FeatureHit> detect_perfective_done(const Sentence& s, const Lexicon& lex) {
  std::vector<FeatureHit> hits;
  const auto& toks = s.tokens;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].normalized != "done") continue;
    if (i > 0 && in(toks[i - 1].normalized, kDoneBlockers)) continue;
    std::size_t j = i + 1;
    while (j < toks.size() && toks[j].pos == Pos::ADV) ++j;
    if (j >= toks.size()) continue;
    const Token& v = toks[j];
    if ((v.pos == Pos::VERB || v.pos == Pos::AUX) && has_past_morphology(v, lex)) {
      auto h = make_hit(FeatureKind::PerfectiveDone, s, i, j + 1);
      h.subject = extract_subject(s, h, lex);
      hits.push_back(std::move(h));
    }
  }
  return hits;
}

std::vector<FeatureHit> detect_multiple_modals(const Sentence& s, const Lexicon& lex) {
  std::vector<FeatureHit> hits;
  const auto& toks = s.tokens;
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    const Token& a = toks[i];
    const Token& b = toks[i + 1];
    if (a.pos == Pos::MODAL && b.pos == Pos::MODAL && in(a.normalized, kStackFirst) &&
        in(b.normalized, kStackSecond)) {
      auto h = make_hit(FeatureKind::MultipleModals, s, i, i + 2);
      h.subject = extract_subject(s, h, lex);
      hits.push_back(std::move(h));
    }
  }
  return hits;
}

std::vector<FeatureHit> detect_null_copula(const Sentence& s, const Lexicon& lex) {
  std::vector<FeatureHit> hits;
  if (is_question(s)) return hits;
  const auto& toks = s.tokens;

  for (const auto& clause : clause_spans(s)) {
    const auto [cb, ce] = clause;
    const std::size_t slot = subject_slot(s, clause);
    for (std::size_t i = cb; i < ce; ++i) {
      const Token& t = toks[i];
      bool candidate = false;
      if (t.pos == Pos::PRON && in(t.normalized, kCopulaPronouns)) {
        candidate = i == slot || t.normalized == "who";
      } else if ((t.pos == Pos::NOUN || t.pos == Pos::PROPN) && is_subject_candidate(t, lex)) {
        // Head of a short noun phrase at the start of the clause:
        // determiners, demonstratives, adjectives and nouns before the head.
        const bool is_head = i + 1 >= ce || (toks[i + 1].pos != Pos::NOUN && toks[i + 1].pos != Pos::PROPN);
        bool np = is_head && i >= slot && i - slot <= 3;
        for (std::size_t k = slot; np && k < i; ++k) {
          const Token& m = toks[k];
          np = m.pos == Pos::DET || m.pos == Pos::ADJ || m.pos == Pos::NOUN || m.pos == Pos::PROPN ||
               in(m.normalized, kDemonstratives);
        }
        const bool vocative = i == slot && slot == cb && in(t.normalized, kVocatives);
        candidate = np && !vocative;
      }
      if (!candidate) continue;
      if (t.normalized == "you" && i + 1 < ce && toks[i + 1].normalized == "know") continue;

      std::size_t j = i + 1;
      while (j < ce && toks[j].pos == Pos::ADV && !in(toks[j].normalized, kLocativeAdverbs)) ++j;
      if (j >= ce) continue;
      if (auto last = predicate_opener(s, j, ce)) {
        auto h = make_hit(FeatureKind::NullCopula, s, i, *last + 1);
        h.subject = extract_subject(s, h, lex);
        hits.push_back(std::move(h));
        break;
      }
    }
  }
  return hits;
}

std::vector<FeatureHit> detect(FeatureKind feature, const Sentence& s, const Lexicon& lex) {
  switch (feature) {
    case FeatureKind::Aint: return detect_aint(s, lex);
    case FeatureKind::HabitualBe: return detect_habitual_be(s, lex);
    case FeatureKind::NegativeConcord: return detect_negative_concord(s, lex);
    case FeatureKind::DoubleComparative: return detect_double_comparative(s, lex);
    case FeatureKind::PerfectiveDone: return detect_perfective_done(s, lex);
    case FeatureKind::MultipleModals: return detect_multiple_modals(s, lex);
    case FeatureKind::NullCopula: return detect_null_copula(s, lex);
  }
  return {};
}

std::vector<FeatureHit> detect_sentence(const Sentence& s, const Lexicon& lex) {
  std::vector<FeatureHit> hits;
  for (auto f : kAllFeatures) {
    auto fh = detect(f, s, lex);
    std::move(fh.begin(), fh.end(), std::back_inserter(hits));
  }
  return hits;
}

std::vector<FeatureHit> detect_all(const Corpus& corpus, const Lexicon& lex) {
  if (corpus.sentences.empty()) throw ArgumentError("empty corpus");
  if (!corpus.tagged) throw ArgumentError("corpus '" + corpus.name + "' is not tagged");
  std::vector<FeatureHit> hits;
  for (const auto& s : corpus.sentences) {
    auto sh = detect_sentence(s, lex);
    std::move(sh.begin(), sh.end(), std::back_inserter(hits));
  }
  return hits;
}

std::vector<std::array<bool, kFeatureCount>> sentence_presence(const Corpus& corpus,
                                                              const std::vector<FeatureHit>& hits) {
  std::unordered_map<std::string, std::size_t> position;
  position.reserve(corpus.sentences.size());
  for (std::size_t i = 0; i < corpus.sentences.size(); ++i) position.emplace(corpus.sentences[i].id(), i);

  std::vector<std::array<bool, kFeatureCount>> presence(corpus.sentences.size());
  for (const auto& h : hits) {
    const auto it = position.find(h.doc_id + "/" + std::to_string(h.sentence_index));
    if (it == position.end()) {
      throw ArgumentError("hit refers to sentence " + h.doc_id + "/" + std::to_string(h.sentence_index) +
                          " which is not in corpus '" + corpus.name + "'");
    }
    presence[it->second][feature_index(h.feature)] = true;
  }
  return presence;
}

// ---------------------------------------------------------------------------

GoldEvaluation evaluate_against_gold(const std::vector<FeatureHit>& hits,
                                     const std::vector<GoldAnnotation>& gold) {
  std::set<std::pair<std::string, FeatureKind>> predicted;
  for (const auto& h : hits) predicted.emplace(h.doc_id + "/" + std::to_string(h.sentence_index), h.feature);

  GoldEvaluation ev;
  for (auto f : kAllFeatures) ev.per_feature[feature_index(f)].feature = f;

  std::set<std::pair<std::string, FeatureKind>> seen;
  for (const auto& g : gold) {
    if (!seen.emplace(g.sentence_id, g.feature).second) {
      throw ArgumentError("duplicate gold label for " + g.sentence_id + " " + std::string(feature_name(g.feature)));
    }
    const bool p = predicted.count({g.sentence_id, g.feature}) > 0;
    auto& acc = ev.per_feature[feature_index(g.feature)];
    if (p && g.label) ++acc.true_positive;
    else if (p && !g.label) ++acc.false_positive;
    else if (!p && g.label) ++acc.false_negative;
    else ++acc.true_negative;
    if (p != g.label) ev.disagreements.push_back({g.sentence_id, g.feature, g.label, p});
  }
  return ev;
}

std::vector<GoldAnnotation> read_gold_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<GoldAnnotation> gold;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, '\t');) cols.push_back(c);
    if (cols.size() != 3 || (cols[2] != "0" && cols[2] != "1")) {
      throw ParseError(path.string() + ": expected sentence_id<TAB>feature<TAB>0|1", lineno);
    }
    try {
      gold.push_back({cols[0], parse_feature(cols[1]), cols[2] == "1"});
    } catch (const ArgumentError& e) {
      throw ParseError(path.string() + ": " + e.what(), lineno);
    }
  }
  return gold;
}

// ---------------------------------------------------------------------------

std::string hit_to_json_line(const FeatureHit& h) {
  json j = {
      {"feature", feature_name(h.feature)},
      {"doc", h.doc_id},
      {"sentence", h.sentence_index},
      {"span", {h.begin, h.end}},
      {"subject", h.subject ? json(*h.subject) : json(nullptr)},
  };
  return j.dump();
}

FeatureHit hit_from_json_line(std::string_view line) {
  try {
    const auto j = json::parse(line);
    FeatureHit h;
    h.feature = parse_feature(j.at("feature").get<std::string>());
    h.doc_id = j.at("doc").get<std::string>();
    h.sentence_index = j.at("sentence").get<std::size_t>();
    h.begin = j.at("span").at(0).get<std::size_t>();
    h.end = j.at("span").at(1).get<std::size_t>();
    if (h.begin >= h.end) throw ParseError("hit span is empty");
    if (j.contains("subject") && !j["subject"].is_null()) h.subject = j["subject"].get<std::string>();
    return h;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed hit record: ") + e.what());
  } catch (const ArgumentError& e) {
    throw ParseError(std::string("malformed hit record: ") + e.what());
  }
}

void write_hits(const std::vector<FeatureHit>& hits, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& h : hits) out << hit_to_json_line(h) << '\n';
  if (!out) throw IoError("error while writing " + path.string());
}

std::vector<FeatureHit> read_hits(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<FeatureHit> hits;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      hits.push_back(hit_from_json_line(line));
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ": " + e.what(), lineno);
    }
  }
  return hits;
}

}  // namespace aave
