#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "aave/config.hpp"
#include "aave/corpus.hpp"
#include "aave/report.hpp"
#include "aave/sentiment.hpp"
#include "aave/tagger.hpp"

namespace aave {

/// A failure attributed to one pipeline stage; what() reads "stage: message".
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& message)
      : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct CorpusInput {
  std::string name;
  std::vector<std::filesystem::path> paths;
  InputFormat format = InputFormat::plain_interview;
};

/// Lexicons named by the config, or the bundled ones.
struct Resources {
  Lexicon lexicon;
  SentimentLexicon sentiment;

  static Resources from_config(const Config& config);
};

/// Provenance for outputs built under `config`.
Provenance make_provenance(const Config& config, std::vector<std::string> corpus_names);

/// Tags every sentence unless the corpus is already tagged.
void ensure_tagged(Corpus& corpus, const Lexicon& lexicon);

/// Everything after ingestion, on loaded corpora. Per-corpus stages run on up
/// to config.threads workers; results are gathered in input order, so the
/// bundle does not depend on scheduling.
ReportBundle analyze(const Config& config, const Resources& resources, Corpus human, std::vector<Corpus> models);

/// Loads the inputs and runs analyze(). Every failure surfaces as a
/// StageError naming the stage (ingest, tag, detect, compare, context,
/// sentiment, stability).
ReportBundle run_pipeline(const Config& config, const CorpusInput& human, const std::vector<CorpusInput>& models);

}  // namespace aave
