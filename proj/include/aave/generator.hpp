#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aave/corpus.hpp"

namespace aave {

enum class TemplateKind { coraal_style, twitter_style };

std::string_view to_string(TemplateKind k);
/// Accepts "coraal", "coraal_style", "twitter", "twitter_style".
TemplateKind parse_template_kind(std::string_view s);

struct PromptTemplate {
  TemplateKind kind = TemplateKind::twitter_style;
  std::string body;

  /// The bundled interview or tweet prompt.
  static PromptTemplate builtin(TemplateKind kind);
  /// Throws ArgumentError when the slots do not match the kind.
  void validate() const;
};

struct DemographicWeights {
  std::vector<std::pair<std::string, double>> gender;
  std::vector<std::pair<std::string, double>> city;

  /// Minimal TOML: [gender] and [city] tables of `key = number` lines, keys
  /// bare or double-quoted, '#' comments.
  static DemographicWeights parse(std::string_view text);
  static DemographicWeights load(const std::filesystem::path& path);
  /// Throws ArgumentError unless both tables are non-empty with
  /// non-negative finite weights and a positive sum.
  void validate() const;
};

/// Index drawn with probability proportional to its weight.
std::size_t weighted_choice(const std::vector<std::pair<std::string, double>>& weights, std::mt19937_64& rng);

/// Fills {gender} and {city}; the tweet template comes back unchanged.
std::string render_prompt(const PromptTemplate& tmpl, const DemographicWeights& weights, std::mt19937_64& rng);

/// The prompt for generation `index` of a job seeded with `seed`. Each index
/// has its own generator, so resumed jobs render the same prompts.
std::string render_prompt_for(const PromptTemplate& tmpl, const DemographicWeights& weights, std::uint64_t seed,
                              std::size_t index);

struct GenerationJob {
  PromptTemplate prompt;
  std::size_t n_generations = 1;
  std::string model;
  std::string endpoint;  // full URL, e.g. https://api.example.com/v1/chat/completions
  double temperature = 1.0;
  int max_tokens = 8192;
  std::optional<std::string> system_prompt;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;

  std::size_t max_in_flight = 4;
  int max_attempts = 5;
  std::chrono::milliseconds base_backoff{500};
  std::chrono::milliseconds max_backoff{30000};
  std::chrono::seconds timeout{600};
  std::string api_key_env = "API_KEY";
  bool require_api_key = true;

  void validate() const;
};

/// Raised when the endpoint rejects the credentials; stops the whole job.
class AuthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ItemFailure {
  std::size_t index = 0;
  int attempts = 0;
  std::string reason;
};

struct JobResult {
  std::vector<RawDocument> documents;
  std::size_t requests_issued = 0;  // HTTP attempts made by this run
  std::size_t archived = 0;         // responses archived by this run
  std::size_t skipped = 0;          // indices already archived before the run
  std::vector<ItemFailure> failures;
};

/// Requests every generation not yet archived under `job.out_dir`, archiving
/// raw/NNNNNN.resp before parsing. Transport errors, 429 and 5xx are retried
/// with exponential backoff; other failures are recorded per item. Every
/// attempt is appended to attempts.jsonl and progress to job_state.json.
JobResult run_job(const GenerationJob& job, const DemographicWeights& weights);

std::filesystem::path archive_path(const std::filesystem::path& out_dir, std::size_t index);

/// Documents from the archives under `out_dir`, in index order. Tweet
/// responses become one document per non-blank line.
std::vector<RawDocument> parse_archive(const std::filesystem::path& out_dir);

/// choices[0].message.content of a chat-completions response body. Throws
/// ParseError when absent.
std::string extract_content(std::string_view body);

/// Tweet lines of a response, trimmed, blank lines and list markers ("1.",
/// "2)", "-") removed.
std::vector<std::string> split_tweets(std::string_view content);

}  // namespace aave
