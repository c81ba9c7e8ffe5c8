#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aave/stats.hpp"

namespace aave {

/// Settings shared by every subcommand. The file format is one `key = value`
/// per line, '#' comment lines, keys from the list below; unknown keys are an
/// error so a typo never silently falls back to a default.
///
///   seed, alpha, denominator, threads, lexicon, sentiment_lexicon,
///   annotation_pattern (repeatable; replaces the defaults), exclude_speaker
///   (repeatable), context.top_k, stability.enabled, stability.n,
///   stability.size, stability.denominator, generate.endpoint,
///   generate.model, generate.temperature, generate.max_tokens,
///   generate.system_prompt, generate.max_in_flight, generate.max_attempts,
///   generate.base_backoff_ms, generate.max_backoff_ms, generate.timeout_s,
///   generate.api_key_env, generate.weights
struct Config {
  std::uint64_t seed = 7;
  double alpha = 0.05;
  Denominator denominator = Denominator::per_10k_sentences;
  std::size_t threads = 1;

  // Empty means the bundled file. Paths are kept as written; `base_dir`
  // resolves relative ones.
  std::string lexicon;
  std::string sentiment_lexicon;
  std::vector<std::string> annotation_patterns;
  std::set<std::string> exclude_speakers;

  std::size_t context_top_k = 10;

  bool stability_enabled = true;
  std::size_t stability_n = 10;
  std::size_t stability_size = 2000;
  Denominator stability_denominator = Denominator::per_100_sentences;

  std::string endpoint;
  std::string model;
  double temperature = 1.0;
  int max_tokens = 8192;
  std::string system_prompt;
  std::size_t max_in_flight = 4;
  int max_attempts = 5;
  std::int64_t base_backoff_ms = 500;
  std::int64_t max_backoff_ms = 30000;
  std::int64_t timeout_s = 600;
  std::string api_key_env = "API_KEY";
  std::string weights;

  std::filesystem::path base_dir;

  Config();

  /// Throws ParseError (with the line number) on malformed lines, unknown
  /// keys and bad values.
  static Config parse(std::string_view text);
  static Config load(const std::filesystem::path& path);

  /// Applies one setting; the same rules as a file line.
  void set(const std::string& key, const std::string& value);

  /// Throws ArgumentError on out-of-range values.
  void validate() const;

  /// Every setting as text, keys sorted. Repeatable keys hold a JSON array.
  std::map<std::string, std::string> effective() const;
  /// Canonical file text; parses back to an equal effective() map.
  std::string serialize() const;
  /// FNV-1a 64 of serialize(), 16 hex digits.
  std::string hash() const;

  std::filesystem::path resolve(const std::string& path) const;
};

/// FNV-1a, 64 bit.
std::uint64_t fnv1a64(std::string_view data);

}  // namespace aave
