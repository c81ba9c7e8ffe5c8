#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aave/corpus.hpp"
#include "aave/detectors.hpp"
#include "aave/feature.hpp"

namespace aave {

enum class Denominator { per_10k_sentences, per_100_sentences, per_100_words };

std::string to_string(Denominator d);
Denominator parse_denominator(std::string_view s);
double scale_of(Denominator d);

struct DensityEntry {
  std::size_t hit_sentences = 0;
  std::size_t total = 0;
  double density = 0.0;
};

struct DensityTable {
  std::string corpus_name;
  Denominator denominator = Denominator::per_10k_sentences;
  std::array<DensityEntry, kFeatureCount> entries{};

  const DensityEntry& at(FeatureKind f) const { return entries[feature_index(f)]; }
};

/// Sentence-presence counts over `corpus`, scaled by the denominator. For
/// per_100_words the total is the corpus word count.
DensityTable compute_densities(const std::vector<FeatureHit>& hits, const Corpus& corpus,
                               Denominator denominator = Denominator::per_10k_sentences);

enum class TestKind { chi_square_1df, fisher_exact };

std::string to_string(TestKind t);
TestKind parse_test_kind(std::string_view s);

struct TestResult {
  double statistic = 0.0;  // chi-square value, or the observed-table probability for Fisher
  double p_value = 1.0;
  TestKind test = TestKind::chi_square_1df;
};

/// Pearson chi-square (1 df, no continuity correction) on the 2x2 table
/// [[k1, n1-k1], [k2, n2-k2]]; two-sided Fisher exact when any expected cell
/// is below 5.
TestResult two_proportion_test(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2, std::uint64_t n2);

TestResult chi_square_test(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2, std::uint64_t n2);
TestResult fisher_exact_test(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2, std::uint64_t n2);

using Interval = std::pair<double, double>;

Interval wilson_interval(std::uint64_t k, std::uint64_t n, double confidence = 0.95);

/// Hybrid score interval for p1 - p2.
Interval newcombe_interval(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2, std::uint64_t n2,
                           double confidence = 0.95);

struct ComparisonResult {
  FeatureKind feature = FeatureKind::Aint;
  std::optional<std::string> context;
  std::string model_name;
  std::uint64_t k_human = 0, n_human = 0, k_model = 0, n_model = 0;
  double p_human = 0.0;
  double p_model = 0.0;
  double delta = 0.0;  // model minus human, in the table's units
  TestKind test = TestKind::chi_square_1df;
  double statistic = 0.0;
  double p_value = 1.0;
  Interval ci95{0.0, 0.0};
  bool significant = false;
  bool absent = false;  // context cell with no model data at all
};

/// Compares one (k, n) pair per side. Delta and interval are multiplied by
/// `scale`.
ComparisonResult compare_counts(FeatureKind feature, std::uint64_t k_human, std::uint64_t n_human,
                                std::uint64_t k_model, std::uint64_t n_model, double scale = 1.0,
                                double alpha = 0.05);

/// One result per feature. Throws ArgumentError when the denominators differ.
std::vector<ComparisonResult> compare_corpora(const DensityTable& human, const DensityTable& model,
                                              double alpha = 0.05);

/// The k most frequent subjects of `feature` hits; ties broken
/// lexicographically. The result is sorted lexicographically.
std::vector<std::string> top_human_contexts(const std::vector<FeatureHit>& hits, FeatureKind feature,
                                            std::size_t k = 10);

struct ContextRow {
  std::string subject;
  std::uint64_t human_hits = 0;
  std::uint64_t human_subject_sentences = 0;
  double human_rate = 0.0;
  std::vector<ComparisonResult> models;
};

struct ContextTable {
  FeatureKind feature = FeatureKind::Aint;
  std::vector<std::string> model_names;
  std::vector<ContextRow> contexts;
};

struct SubjectCounts {
  std::uint64_t hits = 0;               // sentences where the feature fires with the subject
  std::uint64_t subject_sentences = 0;  // sentences where the subject occurs as a subject candidate
};

SubjectCounts count_subject(FeatureKind feature, const std::string& subject, const Corpus& corpus,
                            const std::vector<FeatureHit>& hits, const Lexicon& lex = Lexicon::builtin());

struct LabeledCorpus {
  const Corpus* corpus = nullptr;
  const std::vector<FeatureHit>* hits = nullptr;
};

/// Rates conditional on the subject. Throws ArgumentError for features that
/// are not tied to a subject.
ContextTable contextual_compare(FeatureKind feature, const std::vector<std::string>& contexts,
                                const LabeledCorpus& human, const std::vector<LabeledCorpus>& models,
                                double alpha = 0.05, const Lexicon& lex = Lexicon::builtin());

struct StabilityReport {
  std::string corpus_name;
  Denominator denominator = Denominator::per_100_sentences;
  std::size_t size = 0;
  std::uint64_t seed = 0;
  std::array<std::vector<double>, kFeatureCount> densities;
  std::array<double, kFeatureCount> mean{};
  std::array<double, kFeatureCount> relative_spread{};  // (max - min) / mean, 0 when mean is 0
};

/// Draws `n_subsamples` subsamples of `size` sentences. Subsample i uses seed
/// splitmix64(seed + i).
StabilityReport stability_analysis(const Corpus& corpus, const std::vector<FeatureHit>& hits,
                                   std::size_t n_subsamples = 10, std::size_t size = 2000,
                                   std::uint64_t seed = 7,
                                   Denominator denominator = Denominator::per_100_sentences);

}  // namespace aave
