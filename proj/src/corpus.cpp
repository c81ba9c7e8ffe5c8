#include "aave/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <numeric>
#include <random>
#include <regex>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "aave/error.hpp"
#include "aave/rng.hpp"

namespace aave {

namespace {

using json = nlohmann::json;

constexpr std::array<std::string_view, 16> kPosNames = {
    "PRON", "NOUN", "PROPN", "VERB", "AUX", "MODAL", "ADJ", "ADV",
    "DET",  "PREP", "CONJ",  "NEG",  "INTERJ", "NUM", "PART", "OTHER",
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error while reading " + path.string());
  return ss.str();
}

bool blank_line(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; });
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

const std::regex& speaker_prefix() {
  static const std::regex re(R"(^\s*([A-Za-z][A-Za-z0-9_.-]*)\s*:\s+)");
  return re;
}

}  // namespace

std::size_t count_words(std::string_view text) {
  std::size_t words = 0;
  bool in_word = false;
  bool word_has_alnum = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (in_word && word_has_alnum) ++words;
      in_word = false;
      word_has_alnum = false;
    } else {
      in_word = true;
      word_has_alnum = word_has_alnum || std::isalnum(static_cast<unsigned char>(c));
    }
  }
  if (in_word && word_has_alnum) ++words;
  return words;
}

std::string_view to_string(SourceKind k) { return k == SourceKind::interview ? "interview" : "tweetset"; }

std::string_view to_string(Origin o) { return o == Origin::human ? "human" : "model"; }

std::string_view to_string(InputFormat f) {
  switch (f) {
    case InputFormat::plain_interview: return "interview";
    case InputFormat::tweets_lines: return "tweets";
    case InputFormat::jsonl: return "jsonl";
  }
  return "interview";
}

std::string_view to_string(Pos p) { return kPosNames[static_cast<std::size_t>(p)]; }

Origin parse_origin(std::string_view s) {
  if (s == "human") return Origin::human;
  if (s == "model") return Origin::model;
  throw ArgumentError("unknown origin '" + std::string(s) + "' (expected human or model)");
}

InputFormat parse_input_format(std::string_view s) {
  if (s == "interview" || s == "plain-interview") return InputFormat::plain_interview;
  if (s == "tweets" || s == "tweets-lines") return InputFormat::tweets_lines;
  if (s == "jsonl") return InputFormat::jsonl;
  throw ArgumentError("unknown input format '" + std::string(s) + "' (expected interview, tweets or jsonl)");
}

Pos parse_pos(std::string_view s) {
  for (std::size_t i = 0; i < kPosNames.size(); ++i) {
    if (kPosNames[i] == s) return static_cast<Pos>(i);
  }
  throw ArgumentError("unknown part of speech '" + std::string(s) + "'");
}

CorpusStats compute_stats(const Corpus& corpus) {
  CorpusStats st;
  st.sentence_count = corpus.sentences.size();
  st.document_count = corpus.documents.size();
  for (const auto& s : corpus.sentences) {
    st.character_count += s.text.size();
    st.word_count += count_words(s.text);
  }
  return st;
}

// ---------------------------------------------------------------------------

std::string preprocess_document_text(std::string_view text, InputFormat format,
                                     const LoadOptions& options) {
  std::string stripped = strip_annotations(text, options.annotation_patterns);
  if (format != InputFormat::plain_interview) return stripped;

  std::string out;
  for (auto line : lines_of(stripped)) {
    std::string l(line);
    std::smatch m;
    if (std::regex_search(l, m, speaker_prefix())) {
      if (options.exclude_speakers.count(m[1].str())) continue;
      l = m.suffix().str();
    }
    out += l;
    out += '\n';
  }
  return out;
}

std::vector<RawDocument> read_documents(const std::vector<std::filesystem::path>& paths,
                                        InputFormat format, Origin origin,
                                        const LoadOptions& options) {
  std::vector<RawDocument> docs;
  std::unordered_set<std::string> ids;

  auto add = [&](RawDocument d, bool explicit_id, const std::filesystem::path& path, std::size_t line) {
    if (blank_line(d.text)) return;
    if (ids.count(d.id)) {
      if (explicit_id) throw ParseError(path.string() + ": duplicate document id '" + d.id + "'", line);
      const std::string base = d.id;
      for (int k = 2; ids.count(d.id); ++k) d.id = base + "~" + std::to_string(k);
    }
    ids.insert(d.id);
    d.origin = origin;
    d.model_name = options.model_name;
    docs.push_back(std::move(d));
  };

  for (const auto& path : paths) {
    const std::string content = read_file(path);
    const std::string stem = path.stem().string();
    switch (format) {
      case InputFormat::plain_interview: {
        RawDocument d;
        d.id = stem;
        d.source_kind = SourceKind::interview;
        d.text = preprocess_document_text(content, format, options);
        add(std::move(d), false, path, 0);
        break;
      }
      case InputFormat::tweets_lines: {
        std::size_t lineno = 0;
        for (auto line : lines_of(content)) {
          ++lineno;
          RawDocument d;
          d.id = stem + ":" + std::to_string(lineno);
          d.source_kind = SourceKind::tweetset;
          d.text = preprocess_document_text(line, format, options);
          add(std::move(d), false, path, lineno);
        }
        break;
      }
      case InputFormat::jsonl: {
        std::size_t lineno = 0;
        for (auto line : lines_of(content)) {
          ++lineno;
          if (blank_line(line)) continue;
          const std::string where = path.string() + ": ";
          json rec;
          try {
            rec = json::parse(line);
          } catch (const json::parse_error& e) {
            throw ParseError(where + "malformed json: " + e.what(), lineno);
          }
          if (!rec.is_object() || !rec.contains("text") || !rec["text"].is_string()) {
            throw ParseError(where + "record needs a string \"text\" field", lineno);
          }
          RawDocument d;
          bool explicit_id = false;
          if (rec.contains("id")) {
            if (!rec["id"].is_string()) throw ParseError(where + "\"id\" must be a string", lineno);
            d.id = rec["id"].get<std::string>();
            explicit_id = true;
          } else {
            d.id = stem + ":" + std::to_string(lineno);
          }
          d.source_kind = SourceKind::interview;
          if (rec.contains("kind")) {
            const auto kind = rec["kind"].is_string() ? rec["kind"].get<std::string>() : "";
            if (kind == "tweet" || kind == "tweetset") {
              d.source_kind = SourceKind::tweetset;
            } else if (kind != "interview") {
              throw ParseError(where + "\"kind\" must be interview or tweet", lineno);
            }
          }
          if (rec.contains("meta")) {
            const auto& meta = rec["meta"];
            if (!meta.is_object()) throw ParseError(where + "\"meta\" must be an object", lineno);
            for (const auto& [k, v] : meta.items()) {
              d.meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
            }
          }
          d.text = preprocess_document_text(rec["text"].get<std::string>(), format, options);
          add(std::move(d), explicit_id, path, lineno);
        }
        break;
      }
    }
  }
  return docs;
}

Corpus build_corpus(const std::vector<RawDocument>& docs, Origin origin, std::string name) {
  Corpus c;
  c.name = std::move(name);
  c.origin = origin;
  for (const auto& d : docs) {
    auto sentences = segment_sentences(d);
    if (sentences.empty()) continue;
    c.documents.push_back({d.id, d.source_kind, d.model_name, d.meta});
    std::move(sentences.begin(), sentences.end(), std::back_inserter(c.sentences));
  }
  c.stats = compute_stats(c);
  return c;
}

Corpus load_corpus(const std::vector<std::filesystem::path>& paths, InputFormat format,
                   Origin origin, std::string name, const LoadOptions& options) {
  return build_corpus(read_documents(paths, format, origin, options), origin, std::move(name));
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> sample_indices(std::size_t population, std::size_t n, std::uint64_t seed) {
  if (n > population) {
    throw ArgumentError("cannot sample " + std::to_string(n) + " items from " +
                        std::to_string(population));
  }
  std::vector<std::size_t> idx(population);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 gen(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_below(gen, population - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  return idx;
}

Corpus sample_sentences(const Corpus& corpus, std::size_t n, std::uint64_t seed) {
  if (n > corpus.sentences.size()) {
    throw ArgumentError("sample size " + std::to_string(n) + " exceeds sentence count " +
                        std::to_string(corpus.sentences.size()));
  }
  Corpus out;
  out.name = corpus.name;
  out.origin = corpus.origin;
  out.tagged = corpus.tagged;
  std::unordered_set<std::string> used_docs;
  for (auto i : sample_indices(corpus.sentences.size(), n, seed)) {
    out.sentences.push_back(corpus.sentences[i]);
    used_docs.insert(corpus.sentences[i].doc_id);
  }
  for (const auto& d : corpus.documents) {
    if (used_docs.count(d.id)) out.documents.push_back(d);
  }
  out.stats = compute_stats(out);
  return out;
}

// ---------------------------------------------------------------------------

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());

  json header = {
      {"magic", kCorpusMagic},
      {"version", kCorpusFormatVersion},
      {"name", corpus.name},
      {"origin", to_string(corpus.origin)},
      {"tagged", corpus.tagged},
      {"stats",
       {{"sentence_count", corpus.stats.sentence_count},
        {"character_count", corpus.stats.character_count},
        {"document_count", corpus.stats.document_count},
        {"word_count", corpus.stats.word_count}}},
  };
  out << header.dump() << '\n';
  for (const auto& d : corpus.documents) {
    json doc = {{"id", d.id}, {"kind", to_string(d.source_kind)}, {"meta", d.meta}};
    if (d.model_name) doc["model"] = *d.model_name;
    out << json{{"doc", doc}}.dump() << '\n';
  }
  for (const auto& s : corpus.sentences) {
    json toks = json::array();
    for (const auto& t : s.tokens) toks.push_back(json::array({t.start, t.end, to_string(t.pos)}));
    json rec = {{"doc", s.doc_id}, {"i", s.index}, {"text", s.text}, {"raw", s.raw_text}, {"tokens", toks}};
    out << json{{"s", rec}}.dump() << '\n';
  }
  if (!out) throw IoError("error while writing " + path.string());
}

Corpus read_corpus(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  const auto lines = lines_of(content);
  const std::string where = path.string() + ": ";
  if (lines.empty()) throw ParseError(where + "empty corpus file");

  Corpus c;
  CorpusStats declared;
  try {
    const auto header = json::parse(lines[0]);
    if (!header.is_object() || header.value("magic", "") != kCorpusMagic) {
      throw ParseError(where + "not an aavekit corpus file", 1);
    }
    if (header.value("version", 0) != kCorpusFormatVersion) {
      throw ParseError(where + "unsupported corpus format version " + header["version"].dump(), 1);
    }
    c.name = header.at("name").get<std::string>();
    c.origin = parse_origin(header.at("origin").get<std::string>());
    c.tagged = header.at("tagged").get<bool>();
    const auto& st = header.at("stats");
    declared.sentence_count = st.at("sentence_count").get<std::size_t>();
    declared.character_count = st.at("character_count").get<std::size_t>();
    declared.document_count = st.at("document_count").get<std::size_t>();
    declared.word_count = st.at("word_count").get<std::size_t>();
  } catch (const json::exception& e) {
    throw ParseError(where + "bad header: " + e.what(), 1);
  }

  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (blank_line(lines[ln])) continue;
    try {
      const auto rec = json::parse(lines[ln]);
      if (rec.contains("doc")) {
        const auto& d = rec["doc"];
        DocumentInfo info;
        info.id = d.at("id").get<std::string>();
        info.source_kind = d.at("kind").get<std::string>() == "tweetset" ? SourceKind::tweetset
                                                                        : SourceKind::interview;
        if (d.contains("model")) info.model_name = d["model"].get<std::string>();
        info.meta = d.at("meta").get<std::map<std::string, std::string>>();
        c.documents.push_back(std::move(info));
      } else if (rec.contains("s")) {
        const auto& r = rec["s"];
        Sentence s;
        s.doc_id = r.at("doc").get<std::string>();
        s.index = r.at("i").get<std::size_t>();
        s.text = r.at("text").get<std::string>();
        s.raw_text = r.at("raw").get<std::string>();
        for (const auto& t : r.at("tokens")) {
          Token tok;
          tok.start = t.at(0).get<std::size_t>();
          tok.end = t.at(1).get<std::size_t>();
          if (tok.start >= tok.end || tok.end > s.text.size()) {
            throw ParseError(where + "token span out of range", ln + 1);
          }
          tok.pos = parse_pos(t.at(2).get<std::string>());
          tok.surface = s.text.substr(tok.start, tok.end - tok.start);
          tok.normalized = normalize_token(tok.surface);
          s.tokens.push_back(std::move(tok));
        }
        c.sentences.push_back(std::move(s));
      } else {
        throw ParseError(where + "unknown record", ln + 1);
      }
    } catch (const json::exception& e) {
      throw ParseError(where + "malformed record: " + e.what(), ln + 1);
    } catch (const ArgumentError& e) {
      throw ParseError(where + e.what(), ln + 1);
    }
  }
  c.stats = compute_stats(c);
  if (!(c.stats == declared)) throw ParseError(where + "stored stats do not match contents");
  return c;
}

}  // namespace aave
