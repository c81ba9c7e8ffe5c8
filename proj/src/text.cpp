// Cleaning, sentence splitting and tokenization.

#include <algorithm>
#include <array>
#include <cctype>
#include <regex>

#include "aave/corpus.hpp"

namespace aave {

namespace {

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

bool keep_char(char c) {
  return is_alnum(c) || c == '\'' || c == '.' || c == '!' || c == '?' || c == ',';
}

bool has_alnum(std::string_view s) { return std::any_of(s.begin(), s.end(), is_alnum); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (is_blank(s.front()) || s.front() == '\n')) s.remove_prefix(1);
  while (!s.empty() && (is_blank(s.back()) || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Punctuation that is peeled off the outside of a word into its own token.
bool is_edge_punct(char c) {
  switch (c) {
    case '.': case ',': case '!': case '?': case ';': case ':': case '"':
    case '(': case ')': case '[': case ']': case '{': case '}': case '-':
      return true;
    default:
      return false;
  }
}

struct Replacement {
  std::string_view from;
  std::string_view to;
};

constexpr std::array<Replacement, 10> kTypography = {{
    {"\xE2\x80\x98", "'"},    // left single quote
    {"\xE2\x80\x99", "'"},    // right single quote
    {"\xE2\x80\x9C", "\""},   // left double quote
    {"\xE2\x80\x9D", "\""},   // right double quote
    {"\xE2\x80\x93", " - "},  // en dash
    {"\xE2\x80\x94", " - "},  // em dash
    {"\xE2\x80\xA6", "..."},  // ellipsis
    {"\xC2\xA0", " "},        // no-break space
    {"\xE2\x80\x8B", ""},     // zero-width space
    {"\xEF\xBB\xBF", ""},     // byte order mark
}};

constexpr std::array<std::string_view, 6> kApostropheClitics = {"'s", "'m", "'d", "'re", "'ll", "'ve"};

}  // namespace

std::vector<std::string> default_annotation_patterns() {
  return {
      R"(\((pause|laugh|laughs|laughing|cough|coughs|breath|breathing|sigh|sighs|inaudible|unintelligible|crosstalk|clears throat)[^)\n]*\))",
      R"(/[A-Za-z0-9_?-]+/)",
      R"(<[^>\n]*>)",
      R"(\[[^\]\n]*\])",
  };
}

std::string strip_annotations(std::string_view text, const std::vector<std::string>& patterns) {
  std::string out(text);
  for (const auto& p : patterns) {
    const std::regex re(p, std::regex::ECMAScript | std::regex::icase);
    out = std::regex_replace(out, re, " ");
  }
  return out;
}

std::string fold_typography(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    bool replaced = false;
    if (static_cast<unsigned char>(text[i]) >= 0x80) {
      for (const auto& r : kTypography) {
        if (text.substr(i, r.from.size()) == r.from) {
          out += r.to;
          i += r.from.size();
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out += text[i++];
  }
  return out;
}

std::string clean_text(std::string_view raw) {
  const std::string folded = fold_typography(raw);
  std::string out;
  out.reserve(folded.size());
  std::string_view rest = folded;
  bool first_line = true;
  while (true) {
    const auto nl = rest.find('\n');
    const std::string_view line = rest.substr(0, nl);
    if (!first_line) out += '\n';
    first_line = false;

    bool first_word = true;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && is_blank(line[i])) ++i;
      std::size_t j = i;
      while (j < line.size() && !is_blank(line[j])) ++j;
      if (j == i) break;
      const std::string_view word = line.substr(i, j - i);
      i = j;

      const bool undecodable = std::any_of(word.begin(), word.end(), [](char c) {
        return static_cast<unsigned char>(c) >= 0x80 || (static_cast<unsigned char>(c) < 0x20);
      });
      if (undecodable) continue;
      std::string kept;
      for (char c : word) {
        if (keep_char(c)) kept += c;
      }
      if (kept.empty()) continue;
      if (!first_word) out += ' ';
      out += kept;
      first_word = false;
    }

    if (nl == std::string_view::npos) break;
    rest.remove_prefix(nl + 1);
  }
  return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> pieces;
  auto push = [&](std::string_view piece) {
    piece = trim(piece);
    if (!piece.empty()) pieces.emplace_back(piece);
  };
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '\n') {
      push(text.substr(start, i - start));
      start = ++i;
    } else if (is_terminal(text[i])) {
      while (i < text.size() && is_terminal(text[i])) ++i;
      push(text.substr(start, i - start));
      start = i;
    } else {
      ++i;
    }
  }
  push(text.substr(start));
  return pieces;
}

std::vector<Sentence> segment_sentences(const RawDocument& doc) {
  std::vector<Sentence> out;
  for (auto& piece : split_sentences(fold_typography(doc.text))) {
    std::string cleaned(trim(clean_text(piece)));
    if (!has_alnum(cleaned)) continue;
    Sentence s;
    s.doc_id = doc.id;
    s.index = out.size();
    s.tokens = tokenize(cleaned);
    s.text = std::move(cleaned);
    s.raw_text = std::move(piece);
    out.push_back(std::move(s));
  }
  return out;
}

std::string normalize_token(std::string_view surface) {
  std::string low = lower(surface);
  if (!has_alnum(low)) return low;
  if (std::find(kApostropheClitics.begin(), kApostropheClitics.end(), low) != kApostropheClitics.end()) {
    return low;
  }
  std::string_view v = low;
  while (!v.empty() && !is_alnum(v.front())) v.remove_prefix(1);
  while (!v.empty() && !is_alnum(v.back())) v.remove_suffix(1);
  return std::string(v);
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  auto emit = [&](std::size_t b, std::size_t e) {
    Token t;
    t.surface = std::string(text.substr(b, e - b));
    t.normalized = normalize_token(t.surface);
    t.start = b;
    t.end = e;
    tokens.push_back(std::move(t));
  };

  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (is_blank(text[i]) || text[i] == '\n')) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_blank(text[j]) && text[j] != '\n') ++j;
    if (j == i) break;

    std::size_t b = i;
    std::size_t e = j;
    i = j;
    while (b < e && is_edge_punct(text[b])) {
      emit(b, b + 1);
      ++b;
    }
    std::size_t trail = e;
    while (trail > b && is_edge_punct(text[trail - 1])) --trail;
    if (trail > b && has_alnum(text.substr(b, trail - b))) {
      const std::string core = lower(text.substr(b, trail - b));
      const std::size_t n = core.size();
      std::size_t split = n;
      if (core == "ain't" || core == "aint") {
        split = n;
      } else if (n > 3 && core.ends_with("n't")) {
        split = n - 3;
      } else {
        for (auto clitic : kApostropheClitics) {
          if (n > clitic.size() && core.ends_with(clitic)) {
            split = n - clitic.size();
            break;
          }
        }
      }
      if (split < n && split > 0) {
        emit(b, b + split);
        emit(b + split, trail);
      } else {
        emit(b, trail);
      }
    } else if (trail > b) {
      // Apostrophes or other leftovers without letters: one token.
      emit(b, trail);
    }
    for (std::size_t k = trail; k < e; ++k) emit(k, k + 1);
  }
  return tokens;
}

}  // namespace aave
