#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "aave/corpus.hpp"

namespace aave {

/// Word lists driving the bundled tagger. Loaded from a sectioned
/// `word<TAB>POS` text file; see data/pos_lexicon.tsv.
struct Lexicon {
  std::unordered_map<std::string, Pos> closed_class;
  // Overrides closed_class.
  std::unordered_map<std::string, Pos> dialect_terms;
  // Common open-class words whose suffix would mislead the heuristics
  // ("morning" is not a verb, "tired" is an adjective).
  std::unordered_map<std::string, Pos> open_class;
  std::unordered_set<std::string> past_participles;
  std::unordered_set<std::string> comparatives;
  // -er/-est words that are not comparatives ("teacher", "forest").
  std::unordered_set<std::string> er_nouns;
  std::unordered_set<std::string> discourse_markers;
  int version = 0;

  /// Throws ParseError on unknown sections, unknown tags, or a word given two
  /// different tags within one section.
  static Lexicon parse(std::string_view text);
  static Lexicon load(const std::filesystem::path& path);
  /// The lexicon compiled into the library.
  static const Lexicon& builtin();
};

class Tagger {
 public:
  virtual ~Tagger() = default;
  virtual void tag(Sentence& sentence) const = 0;
};

/// Lookup order: dialect terms, closed class, past participles (VERB), open
/// class, comparatives (ADJ), then suffix rules (-ing/-ed VERB, -ly ADV),
/// capitalized non-initial words as PROPN, and NOUN for everything else.
/// Punctuation is OTHER and digit strings NUM. A second pass retags unknown
/// -s words after a determined noun, a proper noun or he/she/it as VERB
/// ("my sister lives").
class LexiconTagger final : public Tagger {
 public:
  explicit LexiconTagger(const Lexicon& lexicon = Lexicon::builtin()) : lexicon_(&lexicon) {}

  void tag(Sentence& sentence) const override;
  Pos tag_token(const Token& token, bool sentence_initial) const;
  const Lexicon& lexicon() const { return *lexicon_; }

 private:
  bool known(const std::string& w) const;

  const Lexicon* lexicon_;
};

Sentence tag(Sentence sentence, const Lexicon& lexicon = Lexicon::builtin());

void tag_corpus(Corpus& corpus, const Tagger& tagger);

/// Pronouns, nouns and proper nouns, minus the lexicon's discourse markers
/// ("yeah", "like").
bool is_subject_candidate(const Token& token, const Lexicon& lexicon = Lexicon::builtin());

}  // namespace aave
