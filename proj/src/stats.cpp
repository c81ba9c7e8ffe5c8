#include "aave/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include <boost/math/distributions/normal.hpp>

#include "aave/error.hpp"
#include "aave/rng.hpp"

namespace aave {

namespace {

constexpr double kFisherTolerance = 1e-7;

void check_counts(std::uint64_t k, std::uint64_t n) {
  if (n == 0) throw ArgumentError("sample size must be at least 1");
  if (k > n) throw ArgumentError("count " + std::to_string(k) + " exceeds sample size " + std::to_string(n));
}

double log_choose(std::uint64_t n, std::uint64_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

double ratio(std::uint64_t k, std::uint64_t n) { return static_cast<double>(k) / static_cast<double>(n); }

std::string sentence_key(const std::string& doc, std::size_t index) { return doc + "/" + std::to_string(index); }

std::unordered_map<std::string, std::size_t> sentence_positions(const Corpus& corpus) {
  std::unordered_map<std::string, std::size_t> pos;
  pos.reserve(corpus.sentences.size());
  for (std::size_t i = 0; i < corpus.sentences.size(); ++i) pos.emplace(corpus.sentences[i].id(), i);
  return pos;
}

}  // namespace

std::string to_string(Denominator d) {
  switch (d) {
    case Denominator::per_10k_sentences: return "per_10k_sentences";
    case Denominator::per_100_sentences: return "per_100_sentences";
    case Denominator::per_100_words: return "per_100_words";
  }
  return "per_10k_sentences";
}

Denominator parse_denominator(std::string_view s) {
  if (s == "per_10k_sentences" || s == "per10k") return Denominator::per_10k_sentences;
  if (s == "per_100_sentences" || s == "per100") return Denominator::per_100_sentences;
  if (s == "per_100_words" || s == "per100words") return Denominator::per_100_words;
  throw ArgumentError("unknown denominator '" + std::string(s) + "'");
}

double scale_of(Denominator d) { return d == Denominator::per_10k_sentences ? 10000.0 : 100.0; }

std::string to_string(TestKind t) { return t == TestKind::fisher_exact ? "fisher_exact" : "chi_square_1df"; }

TestKind parse_test_kind(std::string_view s) {
  if (s == "chi_square_1df") return TestKind::chi_square_1df;
  if (s == "fisher_exact") return TestKind::fisher_exact;
  throw ArgumentError("unknown test kind '" + std::string(s) + "'");
}

DensityTable compute_densities(const std::vector<FeatureHit>& hits, const Corpus& corpus, Denominator denominator) {
  DensityTable t;
  t.corpus_name = corpus.name;
  t.denominator = denominator;
  const auto presence = sentence_presence(corpus, hits);

  std::size_t total = corpus.sentences.size();
  if (denominator == Denominator::per_100_words) {
    total = 0;
    for (const auto& s : corpus.sentences) total += count_words(s.text);
  }
  for (auto f : kAllFeatures) {
    auto& e = t.entries[feature_index(f)];
    for (const auto& row : presence) e.hit_sentences += row[feature_index(f)];
    e.total = total;
    e.density = total == 0 ? 0.0 : ratio(e.hit_sentences, total) * scale_of(denominator);
  }
  return t;
}

// ---------------------------------------------------------------------------

TestResult chi_square_test(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2, std::uint64_t n2) {
  check_counts(k1, n1);
  check_counts(k2, n2);
  const double a = static_cast<double>(k1), b = static_cast<double>(n1 - k1);
  const double c = static_cast<double>(k2), d = static_cast<double>(n2 - k2);
  const double n = a + b + c + d;
  const double margins = (a + b) * (c + d) * (a + c) * (b + d);
  TestResult r;
  r.test = TestKind::chi_square_1df;
  if (margins == 0.0) return r;
  const double diff = a * d - b * c;
  r.statistic = n * diff * diff / margins;
  // Upper tail of chi-square with one degree of freedom.
  r.p_value = std::erfc(std::sqrt(r.statistic / 2.0));
  return r;
}

TestResult fisher_exact_test(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2, std::uint64_t n2) {
  check_counts(k1, n1);
  check_counts(k2, n2);
  const std::uint64_t m = k1 + k2;
  const std::uint64_t n = n1 + n2;
  const double log_total = log_choose(n, m);
  auto log_p = [&](std::uint64_t x) { return log_choose(n1, x) + log_choose(n2, m - x) - log_total; };

  const double observed = log_p(k1);
  const double cutoff = observed + std::log1p(kFisherTolerance);
  const std::uint64_t lo = m > n2 ? m - n2 : 0;
  const std::uint64_t hi = std::min(m, n1);
  double sum = 0.0;
  for (std::uint64_t x = lo; x <= hi; ++x) {
    const double lp = log_p(x);
    if (lp <= cutoff) sum += std::exp(lp);
  }
  TestResult r;
  r.test = TestKind::fisher_exact;
  r.statistic = std::exp(observed);
  r.p_value = std::clamp(sum, 0.0, 1.0);
  return r;
}

TestResult two_proportion_test(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2, std::uint64_t n2) {
  check_counts(k1, n1);
  check_counts(k2, n2);
  const double n = static_cast<double>(n1 + n2);
  const double hit = static_cast<double>(k1 + k2);
  const double miss = n - hit;
  const double expected[4] = {n1 * hit / n, n1 * miss / n, n2 * hit / n, n2 * miss / n};
  const bool small = std::any_of(std::begin(expected), std::end(expected), [](double e) { return e < 5.0; });
  return small ? fisher_exact_test(k1, n1, k2, n2) : chi_square_test(k1, n1, k2, n2);
}

Interval wilson_interval(std::uint64_t k, std::uint64_t n, double confidence) {
  check_counts(k, n);
  if (!(confidence > 0.0 && confidence < 1.0)) throw ArgumentError("confidence must lie in (0, 1)");
  const double z = boost::math::quantile(boost::math::normal(), (1.0 + confidence) / 2.0);
  const double nn = static_cast<double>(n);
  const double p = ratio(k, n);
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  const double lo = k == 0 ? 0.0 : std::max(0.0, centre - half);
  const double hi = k == n ? 1.0 : std::min(1.0, centre + half);
  return {lo, hi};
}

Interval newcombe_interval(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2, std::uint64_t n2,
                           double confidence) {
  const auto [l1, u1] = wilson_interval(k1, n1, confidence);
  const auto [l2, u2] = wilson_interval(k2, n2, confidence);
  const double p1 = ratio(k1, n1), p2 = ratio(k2, n2);
  const double d = p1 - p2;
  const double below = std::sqrt((p1 - l1) * (p1 - l1) + (u2 - p2) * (u2 - p2));
  const double above = std::sqrt((u1 - p1) * (u1 - p1) + (p2 - l2) * (p2 - l2));
  return {d - below, d + above};
}

// ---------------------------------------------------------------------------

ComparisonResult compare_counts(FeatureKind feature, std::uint64_t k_human, std::uint64_t n_human,
                                std::uint64_t k_model, std::uint64_t n_model, double scale, double alpha) {
  ComparisonResult r;
  r.feature = feature;
  r.k_human = k_human;
  r.n_human = n_human;
  r.k_model = k_model;
  r.n_model = n_model;
  const auto test = two_proportion_test(k_human, n_human, k_model, n_model);
  r.p_human = ratio(k_human, n_human);
  r.p_model = ratio(k_model, n_model);
  r.delta = (r.p_model - r.p_human) * scale;
  r.test = test.test;
  r.statistic = test.statistic;
  r.p_value = test.p_value;
  const auto ci = newcombe_interval(k_model, n_model, k_human, n_human);
  r.ci95 = {ci.first * scale, ci.second * scale};
  r.significant = r.p_value < alpha;
  return r;
}

std::vector<ComparisonResult> compare_corpora(const DensityTable& human, const DensityTable& model, double alpha) {
  if (human.denominator != model.denominator) {
    throw ArgumentError("cannot compare " + to_string(human.denominator) + " with " + to_string(model.denominator));
  }
  std::vector<ComparisonResult> out;
  for (auto f : kAllFeatures) {
    const auto& h = human.at(f);
    const auto& m = model.at(f);
    auto r = compare_counts(f, h.hit_sentences, h.total, m.hit_sentences, m.total, scale_of(human.denominator),
                            alpha);
    r.model_name = model.corpus_name;
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::string> top_human_contexts(const std::vector<FeatureHit>& hits, FeatureKind feature,
                                            std::size_t k) {
  std::map<std::string, std::size_t> freq;
  for (const auto& h : hits) {
    if (h.feature == feature && h.subject && !h.subject->empty()) ++freq[*h.subject];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > k) ranked.resize(k);
  std::vector<std::string> out;
  for (auto& [s, n] : ranked) out.push_back(s);
  std::sort(out.begin(), out.end());
  return out;
}

SubjectCounts count_subject(FeatureKind feature, const std::string& subject, const Corpus& corpus,
                            const std::vector<FeatureHit>& hits, const Lexicon& lex) {
  std::vector<char> has_subject(corpus.sentences.size(), 0);
  std::vector<char> has_hit(corpus.sentences.size(), 0);
  for (std::size_t i = 0; i < corpus.sentences.size(); ++i) {
    for (const auto& t : corpus.sentences[i].tokens) {
      if (t.normalized == subject && is_subject_candidate(t, lex)) {
        has_subject[i] = 1;
        break;
      }
    }
  }
  const auto pos = sentence_positions(corpus);
  for (const auto& h : hits) {
    if (h.feature != feature || h.subject != subject) continue;
    const auto it = pos.find(sentence_key(h.doc_id, h.sentence_index));
    if (it == pos.end()) throw ArgumentError("hit refers to a sentence outside corpus '" + corpus.name + "'");
    // A hit's subject is a subject occurrence even when the tagger did not
    // mark the token as nominal.
    has_hit[it->second] = 1;
    has_subject[it->second] = 1;
  }
  SubjectCounts c;
  for (std::size_t i = 0; i < corpus.sentences.size(); ++i) {
    c.hits += has_hit[i];
    c.subject_sentences += has_subject[i];
  }
  return c;
}

ContextTable contextual_compare(FeatureKind feature, const std::vector<std::string>& contexts,
                                const LabeledCorpus& human, const std::vector<LabeledCorpus>& models,
                                double alpha, const Lexicon& lex) {
  if (!supports_context(feature)) {
    throw ArgumentError(std::string(feature_label(feature)) + " cannot be tied to a single subject");
  }
  if (!human.corpus || !human.hits) throw ArgumentError("human corpus missing");
  ContextTable table;
  table.feature = feature;
  for (const auto& m : models) {
    if (!m.corpus || !m.hits) throw ArgumentError("model corpus missing");
    table.model_names.push_back(m.corpus->name);
  }
  for (const auto& subject : contexts) {
    ContextRow row;
    row.subject = subject;
    const auto hc = count_subject(feature, subject, *human.corpus, *human.hits, lex);
    row.human_hits = hc.hits;
    row.human_subject_sentences = hc.subject_sentences;
    row.human_rate = hc.subject_sentences ? ratio(hc.hits, hc.subject_sentences) : 0.0;
    for (const auto& m : models) {
      const auto mc = count_subject(feature, subject, *m.corpus, *m.hits, lex);
      ComparisonResult r;
      if (mc.subject_sentences == 0 || hc.subject_sentences == 0) {
        r.feature = feature;
        r.k_human = hc.hits;
        r.n_human = hc.subject_sentences;
        r.p_human = row.human_rate;
        r.absent = true;
        r.p_value = 1.0;
      } else {
        r = compare_counts(feature, hc.hits, hc.subject_sentences, mc.hits, mc.subject_sentences, 1.0, alpha);
      }
      r.context = subject;
      r.model_name = m.corpus->name;
      row.models.push_back(std::move(r));
    }
    table.contexts.push_back(std::move(row));
  }
  return table;
}

// ---------------------------------------------------------------------------

StabilityReport stability_analysis(const Corpus& corpus, const std::vector<FeatureHit>& hits,
                                   std::size_t n_subsamples, std::size_t size, std::uint64_t seed,
                                   Denominator denominator) {
  if (n_subsamples == 0) throw ArgumentError("need at least one subsample");
  if (size == 0) throw ArgumentError("subsample size must be at least 1");
  if (corpus.sentences.size() < size) {
    throw ArgumentError("corpus '" + corpus.name + "' has " + std::to_string(corpus.sentences.size()) +
                        " sentences, fewer than the subsample size " + std::to_string(size));
  }
  const auto presence = sentence_presence(corpus, hits);
  std::vector<std::size_t> words;
  if (denominator == Denominator::per_100_words) {
    for (const auto& s : corpus.sentences) words.push_back(count_words(s.text));
  }

  StabilityReport rep;
  rep.corpus_name = corpus.name;
  rep.denominator = denominator;
  rep.size = size;
  rep.seed = seed;
  for (std::size_t i = 0; i < n_subsamples; ++i) {
    const auto idx = sample_indices(corpus.sentences.size(), size, splitmix64(seed + i));
    std::array<std::size_t, kFeatureCount> counts{};
    std::size_t total = denominator == Denominator::per_100_words ? 0 : size;
    for (auto j : idx) {
      for (std::size_t f = 0; f < kFeatureCount; ++f) counts[f] += presence[j][f];
      if (denominator == Denominator::per_100_words) total += words[j];
    }
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      rep.densities[f].push_back(total ? ratio(counts[f], total) * scale_of(denominator) : 0.0);
    }
  }
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    const auto& v = rep.densities[f];
    double sum = 0.0;
    for (double d : v) sum += d;
    rep.mean[f] = sum / static_cast<double>(v.size());
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    rep.relative_spread[f] = rep.mean[f] > 0.0 ? (*mx - *mn) / rep.mean[f] : 0.0;
  }
  return rep;
}

}  // namespace aave
