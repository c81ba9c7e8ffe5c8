#include "aave/sentiment.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "aave/error.hpp"
#include "builtin_sentiment_lexicon.inc"

// Port of the VADER rule set (vaderSentiment 3.3.2, MIT licensed; see
// data/VADER_LICENSE.txt). Emoji-to-description substitution is not ported.

namespace aave {

namespace {

constexpr double kBoostIncr = 0.293;
constexpr double kBoostDecr = -0.293;
constexpr double kCapsIncr = 0.733;
constexpr double kNegScalar = -0.74;
constexpr double kNormAlpha = 15.0;

const std::unordered_set<std::string>& negate_words() {
  static const std::unordered_set<std::string> words = {
      "aint",     "arent",   "cannot",   "cant",     "couldnt",  "darent",  "didnt",   "doesnt",  "ain't",
      "aren't",   "can't",   "couldn't", "daren't",  "didn't",   "doesn't", "dont",    "hadnt",   "hasnt",
      "havent",   "isnt",    "mightnt",  "mustnt",   "neither",  "don't",   "hadn't",  "hasn't",  "haven't",
      "isn't",    "mightn't", "mustn't", "neednt",   "needn't",  "never",   "none",    "nope",    "nor",
      "not",      "nothing", "nowhere",  "oughtnt",  "shant",    "shouldnt", "uhuh",   "wasnt",   "werent",
      "oughtn't", "shan't",  "shouldn't", "uh-uh",   "wasn't",   "weren't", "without", "wont",    "wouldnt",
      "won't",    "wouldn't", "rarely",  "seldom",   "despite"};
  return words;
}

const std::unordered_map<std::string, double>& boosters() {
  static const std::unordered_map<std::string, double> b = {
      {"absolutely", kBoostIncr},   {"amazingly", kBoostIncr},    {"awfully", kBoostIncr},
      {"completely", kBoostIncr},   {"considerable", kBoostIncr}, {"considerably", kBoostIncr},
      {"decidedly", kBoostIncr},    {"deeply", kBoostIncr},       {"effing", kBoostIncr},
      {"enormous", kBoostIncr},     {"enormously", kBoostIncr},   {"entirely", kBoostIncr},
      {"especially", kBoostIncr},   {"exceptional", kBoostIncr},  {"exceptionally", kBoostIncr},
      {"extreme", kBoostIncr},      {"extremely", kBoostIncr},    {"fabulously", kBoostIncr},
      {"flipping", kBoostIncr},     {"flippin", kBoostIncr},      {"frackin", kBoostIncr},
      {"fracking", kBoostIncr},     {"fricking", kBoostIncr},     {"frickin", kBoostIncr},
      {"frigging", kBoostIncr},     {"friggin", kBoostIncr},      {"fully", kBoostIncr},
      {"fuckin", kBoostIncr},       {"fucking", kBoostIncr},      {"fuggin", kBoostIncr},
      {"fugging", kBoostIncr},      {"greatly", kBoostIncr},      {"hella", kBoostIncr},
      {"highly", kBoostIncr},       {"hugely", kBoostIncr},       {"incredible", kBoostIncr},
      {"incredibly", kBoostIncr},   {"intensely", kBoostIncr},    {"major", kBoostIncr},
      {"majorly", kBoostIncr},      {"more", kBoostIncr},         {"most", kBoostIncr},
      {"particularly", kBoostIncr}, {"purely", kBoostIncr},       {"quite", kBoostIncr},
      {"really", kBoostIncr},       {"remarkably", kBoostIncr},   {"so", kBoostIncr},
      {"substantially", kBoostIncr}, {"thoroughly", kBoostIncr},  {"total", kBoostIncr},
      {"totally", kBoostIncr},      {"tremendous", kBoostIncr},   {"tremendously", kBoostIncr},
      {"uber", kBoostIncr},         {"unbelievably", kBoostIncr}, {"unusually", kBoostIncr},
      {"utter", kBoostIncr},        {"utterly", kBoostIncr},      {"very", kBoostIncr},
      {"almost", kBoostDecr},       {"barely", kBoostDecr},       {"hardly", kBoostDecr},
      {"just enough", kBoostDecr},  {"kind of", kBoostDecr},      {"kinda", kBoostDecr},
      {"kindof", kBoostDecr},       {"kind-of", kBoostDecr},      {"less", kBoostDecr},
      {"little", kBoostDecr},       {"marginal", kBoostDecr},     {"marginally", kBoostDecr},
      {"occasional", kBoostDecr},   {"occasionally", kBoostDecr}, {"partly", kBoostDecr},
      {"scarce", kBoostDecr},       {"scarcely", kBoostDecr},     {"slight", kBoostDecr},
      {"slightly", kBoostDecr},     {"somewhat", kBoostDecr},     {"sort of", kBoostDecr},
      {"sorta", kBoostDecr},        {"sortof", kBoostDecr},       {"sort-of", kBoostDecr}};
  return b;
}

const std::unordered_map<std::string, double>& special_cases() {
  static const std::unordered_map<std::string, double> s = {
      {"the shit", 3.0},   {"the bomb", 3.0},        {"bad ass", 1.5},    {"badass", 1.5},
      {"bus stop", 0.0},   {"yeah right", -2.0},     {"kiss of death", -1.5}, {"to die for", 3.0},
      {"beating heart", 3.5}};
  return s;
}

bool is_ascii_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// At least one cased character and no lowercase ones.
bool is_upper(std::string_view s) {
  bool cased = false;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (std::islower(u)) return false;
    if (std::isupper(u)) cased = true;
  }
  return cased;
}

// Edge punctuation is stripped unless that leaves two characters or fewer,
// which keeps emoticons such as ":)" intact.
std::string strip_punct_if_word(std::string_view token) {
  std::size_t b = 0, e = token.size();
  while (b < e && is_ascii_punct(token[b])) ++b;
  while (e > b && is_ascii_punct(token[e - 1])) --e;
  if (e - b <= 2) return std::string(token);
  return std::string(token.substr(b, e - b));
}

std::vector<std::string> words_and_emoticons(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) out.push_back(strip_punct_if_word(text.substr(i, j - i)));
    i = j;
  }
  return out;
}

bool negated(const std::string& word_lower) {
  return negate_words().count(word_lower) || word_lower.find("n't") != std::string::npos;
}

double scalar_inc_dec(const std::string& word, double valence, bool cap_diff) {
  const auto it = boosters().find(lower(word));
  if (it == boosters().end()) return 0.0;
  double scalar = it->second;
  if (valence < 0) scalar = -scalar;
  if (is_upper(word) && cap_diff) scalar += valence > 0 ? kCapsIncr : -kCapsIncr;
  return scalar;
}

class Scorer {
 public:
  Scorer(std::string_view text, const SentimentLexicon& lex) : lex_(lex), words_(words_and_emoticons(text)) {
    for (const auto& w : words_) lower_.push_back(lower(w));
    std::size_t caps = 0;
    for (const auto& w : words_) caps += is_upper(w);
    cap_diff_ = caps > 0 && caps < words_.size();
  }

  std::vector<double> sentiments() const {
    std::vector<double> out;
    out.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (boosters().count(lower_[i])) {
        out.push_back(0.0);
        continue;
      }
      if (i + 1 < words_.size() && lower_[i] == "kind" && lower_[i + 1] == "of") {
        out.push_back(0.0);
        continue;
      }
      out.push_back(valence_at(i));
    }
    but_check(out);
    return out;
  }

 private:
  bool in_lex(std::size_t i) const { return lex_.contains(lower_[i]); }

  double valence_at(std::size_t i) const {
    if (!in_lex(i)) return 0.0;
    const double base = lex_.valence(lower_[i]);
    double valence = base;
    if (lower_[i] == "no" && i + 1 < words_.size() && in_lex(i + 1)) valence = 0.0;
    if ((i > 0 && lower_[i - 1] == "no") || (i > 1 && lower_[i - 2] == "no") ||
        (i > 2 && lower_[i - 3] == "no" && (lower_[i - 1] == "or" || lower_[i - 1] == "nor"))) {
      valence = base * kNegScalar;
    }
    if (is_upper(words_[i]) && cap_diff_) valence += valence > 0 ? kCapsIncr : -kCapsIncr;

    for (std::size_t start = 0; start < 3; ++start) {
      if (i > start && !in_lex(i - (start + 1))) {
        double s = scalar_inc_dec(words_[i - (start + 1)], valence, cap_diff_);
        if (start == 1 && s != 0) s *= 0.95;
        if (start == 2 && s != 0) s *= 0.9;
        valence += s;
        valence = negation_check(valence, start, i);
        if (start == 2) valence = special_idioms_check(valence, i);
      }
    }
    return least_check(valence, i);
  }

  double negation_check(double valence, std::size_t start, std::size_t i) const {
    const auto& w = lower_;
    if (start == 0) {
      if (negated(w[i - 1])) valence *= kNegScalar;
    } else if (start == 1) {
      if (w[i - 2] == "never" && (w[i - 1] == "so" || w[i - 1] == "this")) {
        valence *= 1.25;
      } else if (w[i - 2] == "without" && w[i - 1] == "doubt") {
      } else if (negated(w[i - 2])) {
        valence *= kNegScalar;
      }
    } else {
      // Operator precedence follows the reference: (never && (so|this)) || (so|this).
      if ((w[i - 3] == "never" && (w[i - 2] == "so" || w[i - 2] == "this")) || w[i - 1] == "so" ||
          w[i - 1] == "this") {
        valence *= 1.25;
      } else if (w[i - 3] == "without" && (w[i - 2] == "doubt" || w[i - 1] == "doubt")) {
      } else if (negated(w[i - 3])) {
        valence *= kNegScalar;
      }
    }
    return valence;
  }

  double special_idioms_check(double valence, std::size_t i) const {
    const auto& w = lower_;
    const std::string onezero = w[i - 1] + " " + w[i];
    const std::string twoonezero = w[i - 2] + " " + w[i - 1] + " " + w[i];
    const std::string twoone = w[i - 2] + " " + w[i - 1];
    const std::string threetwoone = w[i - 3] + " " + w[i - 2] + " " + w[i - 1];
    const std::string threetwo = w[i - 3] + " " + w[i - 2];
    for (const auto* seq : {&onezero, &twoonezero, &twoone, &threetwoone, &threetwo}) {
      const auto it = special_cases().find(*seq);
      if (it != special_cases().end()) {
        valence = it->second;
        break;
      }
    }
    if (w.size() - 1 > i) {
      const auto it = special_cases().find(w[i] + " " + w[i + 1]);
      if (it != special_cases().end()) valence = it->second;
    }
    if (w.size() - 1 > i + 1) {
      const auto it = special_cases().find(w[i] + " " + w[i + 1] + " " + w[i + 2]);
      if (it != special_cases().end()) valence = it->second;
    }
    for (const auto* gram : {&threetwoone, &threetwo, &twoone}) {
      const auto it = boosters().find(*gram);
      if (it != boosters().end()) valence += it->second;
    }
    return valence;
  }

  double least_check(double valence, std::size_t i) const {
    if (i > 1 && !in_lex(i - 1) && lower_[i - 1] == "least") {
      if (lower_[i - 2] != "at" && lower_[i - 2] != "very") valence *= kNegScalar;
    } else if (i > 0 && !in_lex(i - 1) && lower_[i - 1] == "least") {
      valence *= kNegScalar;
    }
    return valence;
  }

  // Words before the first "but" count half, words after it one and a half.
  // Applied by position; the reference locates values with list.index(),
  // which misplaces repeated values.
  void but_check(std::vector<double>& sentiments) const {
    const auto it = std::find(lower_.begin(), lower_.end(), "but");
    if (it == lower_.end()) return;
    const auto bi = static_cast<std::size_t>(it - lower_.begin());
    for (std::size_t k = 0; k < sentiments.size(); ++k) {
      if (k < bi) sentiments[k] *= 0.5;
      else if (k > bi) sentiments[k] *= 1.5;
    }
  }

  const SentimentLexicon& lex_;
  std::vector<std::string> words_;
  std::vector<std::string> lower_;
  bool cap_diff_ = false;
};

double punctuation_emphasis(std::string_view text) {
  const auto ep = std::min<std::ptrdiff_t>(std::count(text.begin(), text.end(), '!'), 4);
  const auto qm = std::count(text.begin(), text.end(), '?');
  double qm_amp = 0.0;
  if (qm > 1) qm_amp = qm <= 3 ? static_cast<double>(qm) * 0.18 : 0.96;
  return static_cast<double>(ep) * 0.292 + qm_amp;
}

double normalize(double score) {
  const double n = score / std::sqrt(score * score + kNormAlpha);
  return std::clamp(n, -1.0, 1.0);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------

SentimentLexicon SentimentLexicon::parse(std::string_view text) {
  SentimentLexicon lex;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw ParseError("sentiment lexicon entry without a valence", line_no);
    const auto word = line.substr(0, tab);
    auto rest = line.substr(tab + 1);
    rest = rest.substr(0, rest.find('\t'));
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), v);
    if (ec != std::errc() || ptr != rest.data() + rest.size()) {
      throw ParseError("bad valence '" + std::string(rest) + "' for '" + std::string(word) + "'", line_no);
    }
    if (v < -4.0 || v > 4.0) throw ParseError("valence out of [-4, 4] for '" + std::string(word) + "'", line_no);
    lex.valence_[std::string(word)] = v;
  }
  return lex;
}

SentimentLexicon SentimentLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const SentimentLexicon& SentimentLexicon::builtin() {
  static const SentimentLexicon lex = parse(kBuiltinSentimentLexicon);
  return lex;
}

double SentimentLexicon::valence(const std::string& word) const {
  const auto it = valence_.find(word);
  return it == valence_.end() ? 0.0 : it->second;
}

PolarityScores polarity_scores(std::string_view text, const SentimentLexicon& lex) {
  text = trim(text);
  const auto sentiments = Scorer(text, lex).sentiments();
  PolarityScores out;
  if (sentiments.empty()) return out;

  double sum = 0.0;
  for (double s : sentiments) sum += s;
  const double punct = punctuation_emphasis(text);
  if (sum > 0) sum += punct;
  else if (sum < 0) sum -= punct;
  out.compound = normalize(sum);

  double pos_sum = 0.0, neg_sum = 0.0;
  std::size_t neutral = 0;
  for (double s : sentiments) {
    if (s > 0) pos_sum += s + 1.0;
    if (s < 0) neg_sum += s - 1.0;
    if (s == 0) ++neutral;
  }
  if (pos_sum > std::fabs(neg_sum)) pos_sum += punct;
  else if (pos_sum < std::fabs(neg_sum)) neg_sum -= punct;
  const double total = pos_sum + std::fabs(neg_sum) + static_cast<double>(neutral);
  out.positive = std::fabs(pos_sum / total);
  out.negative = std::fabs(neg_sum / total);
  out.neutral = std::fabs(static_cast<double>(neutral) / total);
  return out;
}

double compound_score(std::string_view text, const SentimentLexicon& lex) { return polarity_scores(text, lex).compound; }

std::string_view to_string(SentimentCategory c) {
  switch (c) {
    case SentimentCategory::negative: return "negative";
    case SentimentCategory::neutral: return "neutral";
    case SentimentCategory::positive: return "positive";
  }
  return "neutral";
}

SentimentCategory categorize(double x) {
  if (x > 0.5) return SentimentCategory::positive;
  if (x < -0.5) return SentimentCategory::negative;
  return SentimentCategory::neutral;
}

SentimentSummary summarize(const Corpus& corpus, const SentimentLexicon& lex) {
  if (corpus.sentences.empty()) throw ArgumentError("empty corpus");
  SentimentSummary s;
  s.corpus_name = corpus.name;
  s.n_sentences = corpus.sentences.size();
  std::array<std::size_t, 3> counts{};
  double sum = 0.0;
  for (const auto& sent : corpus.sentences) {
    const double x = compound_score(sent.raw_text.empty() ? sent.text : sent.raw_text, lex);
    s.scores.push_back(x);
    sum += x;
    ++counts[static_cast<std::size_t>(categorize(x))];
  }
  const double n = static_cast<double>(s.n_sentences);
  s.mean_compound = sum / n;
  for (std::size_t i = 0; i < 3; ++i) s.proportions[i] = static_cast<double>(counts[i]) / n;
  return s;
}

}  // namespace aave
