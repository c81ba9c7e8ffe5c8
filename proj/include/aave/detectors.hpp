#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aave/corpus.hpp"
#include "aave/feature.hpp"
#include "aave/tagger.hpp"

namespace aave {

struct FeatureHit {
  FeatureKind feature = FeatureKind::Aint;
  std::string doc_id;
  std::size_t sentence_index = 0;
  // Half-open token range [begin, end) of the trigger.
  std::size_t begin = 0;
  std::size_t end = 0;
  std::optional<std::string> subject;

  friend bool operator==(const FeatureHit&, const FeatureHit&) = default;
};

// Each detector takes a tagged sentence and returns every trigger it finds,
// subjects already filled in. docs/detector_rules.md spells out the rules.

std::vector<FeatureHit> detect_aint(const Sentence& s, const Lexicon& lex = Lexicon::builtin());
std::vector<FeatureHit> detect_habitual_be(const Sentence& s, const Lexicon& lex = Lexicon::builtin());
std::vector<FeatureHit> detect_negative_concord(const Sentence& s, const Lexicon& lex = Lexicon::builtin());
std::vector<FeatureHit> detect_double_comparative(const Sentence& s, const Lexicon& lex = Lexicon::builtin());
std::vector<FeatureHit> detect_perfective_done(const Sentence& s, const Lexicon& lex = Lexicon::builtin());
std::vector<FeatureHit> detect_multiple_modals(const Sentence& s, const Lexicon& lex = Lexicon::builtin());
std::vector<FeatureHit> detect_null_copula(const Sentence& s, const Lexicon& lex = Lexicon::builtin());

std::vector<FeatureHit> detect(FeatureKind feature, const Sentence& s, const Lexicon& lex = Lexicon::builtin());

/// All seven detectors on one sentence, in FeatureKind order.
std::vector<FeatureHit> detect_sentence(const Sentence& s, const Lexicon& lex = Lexicon::builtin());

/// All detectors over every sentence, ordered by (document, sentence,
/// feature). Throws ArgumentError on an empty or untagged corpus.
std::vector<FeatureHit> detect_all(const Corpus& corpus, const Lexicon& lex = Lexicon::builtin());

/// Nearest subject candidate left of the trigger inside its clause; for a
/// null copula hit, the subject token the trigger starts with.
std::optional<std::string> extract_subject(const Sentence& s, const FeatureHit& hit,
                                           const Lexicon& lex = Lexicon::builtin());

/// Token ranges of the clauses of a sentence: maximal runs not crossing
/// , . ! ? ; : or one of but/and/or/so/because/cause.
std::vector<std::pair<std::size_t, std::size_t>> clause_spans(const Sentence& s);

/// Whether `word` belongs to the negator set.
bool is_negator(const Token& token);

// ---------------------------------------------------------------------------
// Sentence presence

/// Feature presence per sentence: presence[i][f] is true when sentence i of
/// the corpus has at least one hit of feature f. Hits must come from
/// `corpus`.
std::vector<std::array<bool, kFeatureCount>> sentence_presence(const Corpus& corpus,
                                                              const std::vector<FeatureHit>& hits);

// ---------------------------------------------------------------------------
// Gold-standard evaluation

struct GoldAnnotation {
  std::string sentence_id;  // "<doc_id>/<sentence index>"
  FeatureKind feature = FeatureKind::Aint;
  bool label = false;
};

struct FeatureAccuracy {
  FeatureKind feature = FeatureKind::Aint;
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t false_negative = 0;
  std::size_t true_negative = 0;

  std::size_t total() const { return true_positive + false_positive + false_negative + true_negative; }
  double accuracy() const {
    return total() == 0 ? 0.0 : static_cast<double>(true_positive + true_negative) / static_cast<double>(total());
  }
};

struct Disagreement {
  std::string sentence_id;
  FeatureKind feature;
  bool gold;
  bool predicted;
};

struct GoldEvaluation {
  std::array<FeatureAccuracy, kFeatureCount> per_feature;
  std::vector<Disagreement> disagreements;
};

/// Throws ArgumentError on a duplicate (sentence, feature) label.
GoldEvaluation evaluate_against_gold(const std::vector<FeatureHit>& hits,
                                     const std::vector<GoldAnnotation>& gold);

/// `sentence_id<TAB>feature<TAB>0|1` per line; '#' comments and blank lines skipped.
std::vector<GoldAnnotation> read_gold_tsv(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Hit files (one JSON object per line)

std::string hit_to_json_line(const FeatureHit& hit);
FeatureHit hit_from_json_line(std::string_view line);
void write_hits(const std::vector<FeatureHit>& hits, const std::filesystem::path& path);
std::vector<FeatureHit> read_hits(const std::filesystem::path& path);

}  // namespace aave
