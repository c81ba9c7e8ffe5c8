#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "aave/config.hpp"
#include "aave/error.hpp"
#include "aave/generator.hpp"
#include "aave/io.hpp"
#include "aave/pipeline.hpp"

using namespace aave;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = fs::path(AAVEKIT_DATA_DIR) / "fixtures";

CorpusInput fixture_human() {
  return {"coraal_fixture",
          {kFixtures / "human" / "interview_01.txt", kFixtures / "human" / "interview_02.txt"},
          InputFormat::plain_interview};
}

std::vector<CorpusInput> fixture_models() {
  return {{"model_a", {kFixtures / "models" / "model_a.jsonl"}, InputFormat::jsonl},
          {"model_b", {kFixtures / "models" / "model_b.jsonl"}, InputFormat::jsonl}};
}

fs::path fresh_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("aavekit_pipe_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args, const fs::path& err_file) {
  const std::string cmd = std::string("\"") + AAVEKIT_CLI + "\" " + args + " >/dev/null 2>\"" + err_file.string() + "\"";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("fnv1a64 reference vectors") {
  // published FNV-1a 64-bit test values
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("config parsing") {
  const auto c = Config::parse(
      "# comment\n"
      "seed = 11\n"
      "alpha=0.01\n"
      "denominator = per100\n"
      "annotation_pattern = \\(pause[^)]*\\)\n"
      "exclude_speaker = INTERVIEWER\n"
      "generate.system_prompt = \"  padded  \"\n");
  CHECK(c.seed == 11);
  CHECK(c.alpha == 0.01);
  CHECK(c.denominator == Denominator::per_100_sentences);
  CHECK(c.annotation_patterns == std::vector<std::string>{"\\(pause[^)]*\\)"});
  CHECK(c.exclude_speakers.count("INTERVIEWER") == 1);
  CHECK(c.system_prompt == "  padded  ");

  CHECK(Config{}.annotation_patterns == default_annotation_patterns());

  try {
    Config::parse("seed = 1\nsed = 2\n");
    FAIL("unknown key accepted");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(Config::parse("seed = seven\n"), ParseError);
  CHECK_THROWS_AS(Config::parse("just words\n"), ParseError);
  CHECK_THROWS_AS(Config::parse("denominator = per_mile\n"), ParseError);

  Config bad;
  bad.alpha = 1.5;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
}

TEST_CASE("config serialization round trip and hash") {
  Config c;
  c.seed = 99;
  c.system_prompt = " leading space";
  c.exclude_speakers = {"INT", "Interviewer 2"};
  c.annotation_patterns = {"\\[[^]]*\\]", "x=y"};
  const auto back = Config::parse(c.serialize());
  CHECK(back.effective() == c.effective());
  CHECK(back.hash() == c.hash());
  CHECK(c.hash().size() == 16);

  Config d = c;
  d.seed = 100;
  CHECK(d.hash() != c.hash());
  CHECK(Config{}.hash() == Config{}.hash());
}

TEST_CASE("pipeline is deterministic and thread-count independent") {
  Config cfg = Config::load(kFixtures / "fixture.conf");
  const auto a = bundle_to_json(run_pipeline(cfg, fixture_human(), fixture_models()));
  const auto b = bundle_to_json(run_pipeline(cfg, fixture_human(), fixture_models()));
  CHECK(a == b);

  cfg.threads = 1;
  auto one = run_pipeline(cfg, fixture_human(), fixture_models());
  cfg.threads = 4;
  auto four = run_pipeline(cfg, fixture_human(), fixture_models());
  one.provenance = four.provenance = Provenance{};
  CHECK(bundle_to_json(one) == bundle_to_json(four));
}

TEST_CASE("pipeline bundle shape") {
  const auto cfg = Config::load(kFixtures / "fixture.conf");
  const auto b = run_pipeline(cfg, fixture_human(), fixture_models());
  CHECK(b.provenance.corpus_names == std::vector<std::string>{"coraal_fixture", "model_a", "model_b"});
  CHECK(b.provenance.config_hash == cfg.hash());
  CHECK(b.provenance.config.at("seed") == "7");
  CHECK(b.comparisons.size() == 2 * kFeatureCount);
  CHECK(b.contexts.size() == 4);  // the subject-anchored features
  CHECK(b.sentiment.size() == 3);
  for (const auto& s : b.sentiment) CHECK(s.scores.empty());
  REQUIRE(b.stability);
  CHECK(b.stability->size == cfg.stability_size);
  for (std::size_t i = 0; i < b.comparisons.size(); ++i) {
    CHECK(b.comparisons[i].model_name == (i < kFeatureCount ? "model_a" : "model_b"));
    CHECK(b.comparisons[i].significant == (b.comparisons[i].p_value < cfg.alpha));
  }
}

TEST_CASE("stage errors") {
  const auto dir = fresh_dir("stage");
  const auto empty = dir / "empty.txt";
  write_file_atomic(empty, "");
  Config cfg;
  cfg.stability_enabled = false;

  try {
    run_pipeline(cfg, fixture_human(), {{"empty_model", {empty}, InputFormat::tweets_lines}});
    FAIL("empty corpus accepted");
  } catch (const StageError& e) {
    CHECK(e.stage() == "detect");
    CHECK(std::string(e.what()).rfind("detect: empty corpus", 0) == 0);
  }

  try {
    run_pipeline(cfg, fixture_human(), {{"m", {dir / "missing.txt"}, InputFormat::tweets_lines}});
    FAIL("missing file accepted");
  } catch (const StageError& e) {
    CHECK(e.stage() == "ingest");
  }

  cfg.stability_enabled = true;
  cfg.stability_size = 100000;
  try {
    run_pipeline(cfg, fixture_human(), fixture_models());
    FAIL("oversized stability sample accepted");
  } catch (const StageError& e) {
    CHECK(e.stage() == "stability");
  }

  CHECK_THROWS_AS(run_pipeline(Config{}, fixture_human(), {}), StageError);
  fs::remove_all(dir);
}

TEST_CASE("cli validates arguments before touching the filesystem") {
  const auto dir = fresh_dir("cli");
  const auto err = dir / "stderr.txt";
  const std::string human = (kFixtures / "human" / "interview_01.txt").string();

  for (const char* sub : {"ingest", "tag", "detect", "compare", "context", "sentiment", "stability", "generate",
                          "report", "eval-detectors", "run-all"}) {
    CAPTURE(sub);
    CHECK(run_cli(std::string(sub) + " --help", err) == 0);
  }

  // bad enum value: rejected by the parser, no output directory appears
  CHECK(run_cli("run-all --human " + human + " --model m=" + human + " --format html --out " +
                    (dir / "out1").string(),
                err) != 0);
  CHECK_FALSE(fs::exists(dir / "out1"));

  // malformed NAME=PATH
  CHECK(run_cli("run-all --human " + human + " --model nopath --out " + (dir / "out2").string(), err) == 1);
  CHECK_FALSE(fs::exists(dir / "out2"));
  CHECK(read_text_file(err).find("NAME=PATH") != std::string::npos);

  // missing required option
  CHECK(run_cli("ingest --name x " + human, err) != 0);

  // empty model corpus: the failing stage is named
  write_file_atomic(dir / "empty.txt", "");
  CHECK(run_cli("run-all --set stability.enabled=false --human " + human + " --model m=" +
                    (dir / "empty.txt").string() + " --model-format tweets --out " + (dir / "out3").string(),
                err) == 1);
  CHECK(read_text_file(err).find("detect: empty corpus") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("shipped example files load") {
  const fs::path ex = fs::path(AAVEKIT_DATA_DIR) / "examples";
  const auto cfg = Config::load(ex / "aavekit.conf");
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.hash() != Config{}.hash());  // endpoint, model and weights are set
  const auto w = DemographicWeights::load(cfg.resolve(cfg.weights));
  CHECK_NOTHROW(w.validate());
  CHECK(w.gender.size() == 2);
  CHECK(w.city.size() == 7);
}

TEST_CASE("each golden record is one sentence") {
  const auto c = load_corpus({fs::path(AAVEKIT_DATA_DIR) / "golden" / "golden.jsonl"}, InputFormat::jsonl,
                             Origin::human, "golden");
  std::size_t records = 0;
  std::istringstream in(read_text_file(fs::path(AAVEKIT_DATA_DIR) / "golden" / "golden.jsonl"));
  for (std::string line; std::getline(in, line);) records += !line.empty();
  CHECK(c.sentences.size() == records);
  for (const auto& s : c.sentences) CHECK(s.index == 0);
}
