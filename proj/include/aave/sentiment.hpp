#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "aave/corpus.hpp"

namespace aave {

/// Word valences in the VADER lexicon format: `token<TAB>mean<TAB>...`.
/// Only the first two columns are read.
class SentimentLexicon {
 public:
  SentimentLexicon() = default;

  static SentimentLexicon parse(std::string_view text);
  static SentimentLexicon load(const std::filesystem::path& path);
  /// The lexicon compiled into the library.
  static const SentimentLexicon& builtin();

  bool contains(const std::string& word) const { return valence_.count(word) != 0; }
  double valence(const std::string& word) const;
  std::size_t size() const { return valence_.size(); }

 private:
  std::unordered_map<std::string, double> valence_;
};

struct PolarityScores {
  double negative = 0.0;
  double neutral = 0.0;
  double positive = 0.0;
  double compound = 0.0;  // in [-1, 1]
};

/// Full VADER scoring of one piece of text. Values are not rounded.
PolarityScores polarity_scores(std::string_view text, const SentimentLexicon& lex = SentimentLexicon::builtin());

double compound_score(std::string_view text, const SentimentLexicon& lex = SentimentLexicon::builtin());

enum class SentimentCategory { negative, neutral, positive };

std::string_view to_string(SentimentCategory c);

/// Positive above 0.5, negative below -0.5, neutral otherwise.
SentimentCategory categorize(double x);

struct SentimentSummary {
  std::string corpus_name;
  std::size_t n_sentences = 0;
  double mean_compound = 0.0;
  std::array<double, 3> proportions{};  // indexed by SentimentCategory
  std::vector<double> scores;           // one per sentence, corpus order

  double proportion(SentimentCategory c) const { return proportions[static_cast<std::size_t>(c)]; }
};

/// Scores each sentence's raw text (its cleaned text when no raw text was
/// kept). Throws ArgumentError on an empty corpus.
SentimentSummary summarize(const Corpus& corpus, const SentimentLexicon& lex = SentimentLexicon::builtin());

}  // namespace aave
