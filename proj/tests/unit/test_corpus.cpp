#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "aave/corpus.hpp"
#include "aave/error.hpp"

namespace fs = std::filesystem;
using namespace aave;

namespace {

const fs::path kData = AAVEKIT_TEST_DATA_DIR;

std::vector<std::string> surfaces(const std::vector<Token>& toks) {
  std::vector<std::string> out;
  for (const auto& t : toks) out.push_back(t.surface);
  return out;
}

fs::path temp_file(const std::string& name, const std::string& content) {
  const auto p = fs::temp_directory_path() / ("aavekit_test_" + name);
  std::ofstream(p, std::ios::binary) << content;
  return p;
}

// Random text drawn from letters, punctuation, whitespace and a few
// multi-byte sequences, for the property checks below.
std::string random_text(std::mt19937_64& gen, std::size_t len) {
  static const std::vector<std::string> alphabet = {
      "a", "b", "Z", "7", " ", " ", "\n", "\t", ".", "!", "?", ",", "'", "~", "#", "-", "(", ")",
      "\xF0\x9F\x92\xAF", "\xE2\x80\x99", "\xC3\xA9", "\xFF", "\x01"};
  std::string s;
  for (std::size_t i = 0; i < len; ++i) s += alphabet[gen() % alphabet.size()];
  return s;
}

}  // namespace

TEST_CASE("clean_text keeps dialect apostrophes and sentence punctuation") {
  CHECK(clean_text("I ain't doing all that.") == "I ain't doing all that.");
  CHECK(clean_text("") == "");
  CHECK(clean_text("so~ cool \xF0\x9F\x92\xAF fr") == "so cool fr");
}

TEST_CASE("clean_text drops whole words carrying undecodable bytes") {
  CHECK(clean_text("caf\xC3\xA9 is open") == "is open");
  CHECK(clean_text("bad \xFF byte") == "bad byte");
  CHECK(clean_text("It\xE2\x80\x99s fine") == "It's fine");
  CHECK(clean_text("tough\xE2\x80\x94really tough") == "tough really tough");
  CHECK(clean_text("line one\nline  two") == "line one\nline two");
}

TEST_CASE("clean_text is idempotent") {
  std::mt19937_64 gen(11);
  for (int i = 0; i < 500; ++i) {
    const auto text = random_text(gen, gen() % 40);
    const auto once = clean_text(text);
    CHECK(clean_text(once) == once);
  }
}

TEST_CASE("annotation patterns strip transcript markup") {
  const auto out = strip_annotations("so (pause 0.5) my friend /RD-NAME-2/ said [laughs] hi",
                                     default_annotation_patterns());
  CHECK(clean_text(out) == "so my friend said hi");
}

TEST_CASE("split_sentences and segment_sentences") {
  CHECK(split_sentences("a. b! c?").size() == 3);
  CHECK(split_sentences("wait... what?! ok").size() == 3);

  RawDocument doc;
  doc.id = "ex";
  doc.text = "We didn't have much, but we had each other.";
  const auto s = segment_sentences(doc);
  REQUIRE(s.size() == 1);
  CHECK(s[0].text == doc.text);
  CHECK(s[0].raw_text == doc.text);

  doc.text = "Wow!!! \xF0\x9F\x98\x82\xF0\x9F\x98\x82. That was GREAT";
  const auto s2 = segment_sentences(doc);
  REQUIRE(s2.size() == 2);
  CHECK(s2[0].raw_text == "Wow!!!");
  CHECK(s2[1].text == "That was GREAT");
  CHECK(s2[1].index == 1);
}

TEST_CASE("segment_sentences never yields an empty sentence") {
  std::mt19937_64 gen(5);
  for (int i = 0; i < 300; ++i) {
    RawDocument doc;
    doc.id = "r";
    doc.text = random_text(gen, gen() % 60);
    for (const auto& s : segment_sentences(doc)) {
      CHECK_FALSE(s.text.empty());
      CHECK_FALSE(s.tokens.empty());
    }
  }
}

TEST_CASE("tokenize splits clitics and punctuation") {
  using V = std::vector<std::string>;
  CHECK(surfaces(tokenize("I don't never have no problems.")) ==
        V{"I", "do", "n't", "never", "have", "no", "problems", "."});
  CHECK(surfaces(tokenize("I ain't doing all that.")) == V{"I", "ain't", "doing", "all", "that", "."});
  CHECK(surfaces(tokenize("It's what we're gonna do, y'all")) ==
        V{"It", "'s", "what", "we", "'re", "gonna", "do", ",", "y'all"});
  CHECK(surfaces(tokenize("I'm done. She'll go; he'd know")) ==
        V{"I", "'m", "done", ".", "She", "'ll", "go", ";", "he", "'d", "know"});
  CHECK(tokenize("").empty());

  const auto toks = tokenize("Can't stop 'cause goin' home!");
  CHECK(surfaces(toks) == V{"Ca", "n't", "stop", "'cause", "goin'", "home", "!"});
  CHECK(toks[0].normalized == "ca");
  CHECK(toks[1].normalized == "n't");
  CHECK(toks[3].normalized == "cause");
  CHECK(toks[4].normalized == "goin");
}

TEST_CASE("token spans are sorted, disjoint and in bounds") {
  std::mt19937_64 gen(3);
  for (int i = 0; i < 500; ++i) {
    const auto text = clean_text(random_text(gen, gen() % 50));
    const auto toks = tokenize(text);
    std::size_t prev_end = 0;
    for (const auto& t : toks) {
      CHECK(t.start < t.end);
      CHECK(t.start >= prev_end);
      CHECK(t.end <= text.size());
      CHECK(text.substr(t.start, t.end - t.start) == t.surface);
      prev_end = t.end;
    }
  }
}

TEST_CASE("tweet files keep lines apart") {
  const auto c = load_corpus({kData / "tweets_three_lines.txt"}, InputFormat::tweets_lines, Origin::human, "tw");
  CHECK(c.stats.sentence_count == 4);
  CHECK(c.stats.document_count == 3);
  CHECK(c.sentences[1].text == "we up by ten");
  CHECK(c.sentences[2].doc_id == "tweets_three_lines:2");
}

TEST_CASE("interview files drop speaker prefixes and annotations") {
  LoadOptions opts;
  const auto c = load_corpus({kData / "interview_small.txt"}, InputFormat::plain_interview, Origin::human, "iv", opts);
  REQUIRE(c.sentences.size() == 4);
  CHECK(c.sentences[0].text == "So tell me about growing up there.");
  CHECK(c.sentences[1].text == "We didn't have much, but we had each other.");
  CHECK(c.sentences[2].text == "My cousin lived next door!");
  CHECK(c.stats == compute_stats(c));

  opts.exclude_speakers = {"INT_1"};
  const auto c2 = load_corpus({kData / "interview_small.txt"}, InputFormat::plain_interview, Origin::human, "iv", opts);
  CHECK(c2.sentences.size() == 2);
}

TEST_CASE("jsonl loading and its errors") {
  const auto good = temp_file("good.jsonl",
                              "{\"text\": \"He be working.\", \"meta\": {\"city\": \"DC\"}}\n"
                              "\n"
                              "{\"id\": \"x\", \"text\": \"She tired. We out\"}\n");
  const auto c = load_corpus({good}, InputFormat::jsonl, Origin::model, "m");
  CHECK(c.stats.document_count == 2);
  CHECK(c.stats.sentence_count == 3);
  CHECK(c.documents[0].meta.at("city") == "DC");
  CHECK(c.documents[1].id == "x");

  const auto bad = temp_file("bad.jsonl", "{\"text\": \"ok\"}\n{\"text\": 3}\n");
  try {
    load_corpus({bad}, InputFormat::jsonl, Origin::model, "m");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  const auto broken = temp_file("broken.jsonl", "{\"text\": \"ok\"}\n{\"text\": \n");
  CHECK_THROWS_AS(load_corpus({broken}, InputFormat::jsonl, Origin::model, "m"), ParseError);

  try {
    load_corpus({"/nonexistent/file.txt"}, InputFormat::plain_interview, Origin::human, "h");
    FAIL("expected an io error");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/file.txt") != std::string::npos);
  }
}

TEST_CASE("corpus cache round trip preserves contents and rejects foreign files") {
  auto c = load_corpus({kData / "interview_small.txt"}, InputFormat::plain_interview, Origin::human, "iv");
  c.sentences[0].tokens[0].pos = Pos::ADV;
  c.tagged = true;
  const auto path = fs::temp_directory_path() / "aavekit_test_cache.corpus";
  save_corpus(c, path);
  const auto back = read_corpus(path);
  CHECK(back.name == c.name);
  CHECK(back.tagged);
  CHECK(back.stats == c.stats);
  REQUIRE(back.sentences.size() == c.sentences.size());
  for (std::size_t i = 0; i < c.sentences.size(); ++i) {
    CHECK(back.sentences[i].text == c.sentences[i].text);
    CHECK(back.sentences[i].raw_text == c.sentences[i].raw_text);
    REQUIRE(back.sentences[i].tokens.size() == c.sentences[i].tokens.size());
    for (std::size_t k = 0; k < c.sentences[i].tokens.size(); ++k) {
      CHECK(back.sentences[i].tokens[k].normalized == c.sentences[i].tokens[k].normalized);
      CHECK(back.sentences[i].tokens[k].pos == c.sentences[i].tokens[k].pos);
    }
  }
  CHECK_THROWS_AS(read_corpus(temp_file("notacorpus", "{\"hello\": 1}\n")), ParseError);
}

TEST_CASE("sample_sentences") {
  Corpus c;
  c.name = "synthetic";
  for (std::size_t i = 0; i < 100; ++i) {
    Sentence s;
    s.doc_id = "d" + std::to_string(i / 10);
    s.index = i % 10;
    s.text = "s" + std::to_string(i);
    c.sentences.push_back(s);
    if (i % 10 == 0) c.documents.push_back({s.doc_id, SourceKind::interview, std::nullopt, {}});
  }
  c.stats = compute_stats(c);

  const auto all = sample_sentences(c, 100, 1);
  REQUIRE(all.sentences.size() == 100);
  for (std::size_t i = 0; i < 100; ++i) CHECK(all.sentences[i].text == c.sentences[i].text);

  const auto a = sample_sentences(c, 30, 42);
  const auto b = sample_sentences(c, 30, 42);
  REQUIRE(a.sentences.size() == 30);
  for (std::size_t i = 0; i < 30; ++i) CHECK(a.sentences[i].text == b.sentences[i].text);
  CHECK(a.stats == compute_stats(a));

  CHECK_THROWS_AS(sample_sentences(c, 101, 1), ArgumentError);
}

TEST_CASE("sample_indices stream is pinned") {
  // Frozen once: changing the generator or the shuffle breaks reproducibility
  // of every published subsample.
  const auto idx = sample_indices(1000, 5, 7);
  const std::vector<std::size_t> expected {15, 113, 493, 495, 548};
  CHECK(idx == expected);
}

TEST_CASE("sampling 2000 of 100k sentences with a 5% rate stays within 3 sigma") {
  // Sentence i carries the feature when i % 20 == 0, so the population rate is
  // exactly 0.05 and the sample rate has sd sqrt(p(1-p)/n) (finite-population
  // correction only tightens it).
  const std::size_t population = 100000;
  const std::size_t n = 2000;
  const double p = 0.05;
  const double bound = 3.0 * std::sqrt(p * (1 - p) / static_cast<double>(n));
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::size_t hits = 0;
    for (auto i : sample_indices(population, n, seed)) hits += (i % 20 == 0);
    CHECK(std::abs(static_cast<double>(hits) / n - p) <= bound);
  }
}
