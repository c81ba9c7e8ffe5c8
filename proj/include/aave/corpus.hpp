#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace aave {

enum class SourceKind { interview, tweetset };
enum class Origin { human, model };
enum class InputFormat { plain_interview, tweets_lines, jsonl };

enum class Pos : std::uint8_t {
  PRON, NOUN, PROPN, VERB, AUX, MODAL, ADJ, ADV, DET, PREP, CONJ, NEG, INTERJ, NUM, PART, OTHER,
};

std::string_view to_string(SourceKind k);
std::string_view to_string(Origin o);
std::string_view to_string(InputFormat f);
std::string_view to_string(Pos p);
Origin parse_origin(std::string_view s);
InputFormat parse_input_format(std::string_view s);
Pos parse_pos(std::string_view s);

struct RawDocument {
  std::string id;
  SourceKind source_kind = SourceKind::interview;
  Origin origin = Origin::human;
  std::optional<std::string> model_name;
  std::string text;
  std::map<std::string, std::string> meta;
};

struct Token {
  std::string surface;
  std::string normalized;
  Pos pos = Pos::OTHER;
  // Byte offsets into Sentence::text, half-open.
  std::size_t start = 0;
  std::size_t end = 0;
};

struct Sentence {
  std::string doc_id;
  std::size_t index = 0;
  std::string text;
  // The sentence before character cleaning. Sentiment scoring reads this one
  // because capitalization and punctuation carry signal there.
  std::string raw_text;
  std::vector<Token> tokens;

  std::string id() const { return doc_id + "/" + std::to_string(index); }
};

struct CorpusStats {
  std::size_t sentence_count = 0;
  std::size_t character_count = 0;
  std::size_t document_count = 0;
  std::size_t word_count = 0;

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

struct DocumentInfo {
  std::string id;
  SourceKind source_kind = SourceKind::interview;
  std::optional<std::string> model_name;
  std::map<std::string, std::string> meta;
};

struct Corpus {
  std::string name;
  Origin origin = Origin::human;
  std::vector<DocumentInfo> documents;
  std::vector<Sentence> sentences;
  CorpusStats stats;
  bool tagged = false;
};

/// Whitespace-delimited words holding at least one ASCII letter or digit.
std::size_t count_words(std::string_view text);

/// Recounts sentences, characters, documents and words from the contents.
CorpusStats compute_stats(const Corpus& corpus);

// ---------------------------------------------------------------------------
// Text cleaning

/// Patterns for transcript annotations ("(pause 0.5)", "/RD-NAME-2/", ...)
/// removed before character cleaning.
std::vector<std::string> default_annotation_patterns();

/// Removes every match of each ECMAScript regex in `patterns`.
std::string strip_annotations(std::string_view text, const std::vector<std::string>& patterns);

/// Keeps letters, digits, whitespace, apostrophes and . ! ? , and strips any
/// other ASCII symbol. A whitespace-delimited word carrying a byte sequence
/// that cannot be handled (non-ASCII, invalid UTF-8) is dropped whole.
/// Typographic punctuation is folded first (see fold_typography). Runs of blanks
/// collapse to a single space; line breaks are kept. Idempotent.
std::string clean_text(std::string_view raw);

// ---------------------------------------------------------------------------
// Segmentation and tokenization

/// Replaces typographic punctuation LLM output is full of with ASCII:
/// curly quotes, dashes, ellipsis, non-breaking space.
std::string fold_typography(std::string_view text);

/// Splits text into trimmed, non-empty pieces after each run of . ! ? and at
/// every line break. A piece never spans two lines, which keeps tweets apart.
std::vector<std::string> split_sentences(std::string_view text);

/// Splits `doc.text`, cleans each piece and tokenizes it. Pieces without a
/// letter or digit after cleaning are dropped, so no sentence is empty.
std::vector<Sentence> segment_sentences(const RawDocument& doc);

/// Whitespace tokenization with punctuation peeled off and clitics split:
/// "don't" -> do + n't, "it's" -> it + 's; "ain't"/"aint" stay whole.
/// Every token gets pos OTHER.
std::vector<Token> tokenize(std::string_view sentence_text);

/// Lowercases and strips outer punctuation; punctuation-only tokens and
/// apostrophe clitics keep their form.
std::string normalize_token(std::string_view surface);

// ---------------------------------------------------------------------------
// Loading

struct LoadOptions {
  std::vector<std::string> annotation_patterns = default_annotation_patterns();
  // Lines of plain-interview files whose "SPEAKER:" prefix names one of
  // these are left out. Empty keeps every turn.
  std::set<std::string> exclude_speakers;
  std::optional<std::string> model_name;
};

/// Reads raw documents from files. Interview files become one document per
/// file; tweet files one document per non-blank line; jsonl one document per
/// record ({"text": ..., "meta": {...}} with an optional "id").
std::vector<RawDocument> read_documents(const std::vector<std::filesystem::path>& paths,
                                        InputFormat format, Origin origin,
                                        const LoadOptions& options = {});

/// Prepares raw text for segmentation: annotations and speaker prefixes go.
std::string preprocess_document_text(std::string_view text, InputFormat format,
                                     const LoadOptions& options);

/// Builds an untagged corpus from already-read documents.
Corpus build_corpus(const std::vector<RawDocument>& docs, Origin origin, std::string name);

Corpus load_corpus(const std::vector<std::filesystem::path>& paths, InputFormat format,
                   Origin origin, std::string name, const LoadOptions& options = {});

// ---------------------------------------------------------------------------
// Sampling

/// `n` distinct indices out of [0, population) in increasing order, uniform
/// without replacement. The stream depends only on `seed`.
std::vector<std::size_t> sample_indices(std::size_t population, std::size_t n, std::uint64_t seed);

/// Throws ArgumentError when n exceeds the sentence count.
Corpus sample_sentences(const Corpus& corpus, std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Cache files

inline constexpr std::string_view kCorpusMagic = "aavekit-corpus";
inline constexpr int kCorpusFormatVersion = 1;

void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
Corpus read_corpus(const std::filesystem::path& path);

}  // namespace aave
