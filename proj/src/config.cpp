#include "aave/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>

#include <json.hpp>

#include "aave/corpus.hpp"
#include "aave/error.hpp"
#include "aave/io.hpp"

namespace aave {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_int(const std::string& key, const std::string& v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ArgumentError(key + ": expected an integer, got '" + v + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size() || !std::isfinite(out)) throw ArgumentError(key + ": expected a number, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ArgumentError(key + ": expected true or false, got '" + v + "'");
}

std::string number(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

// Values that would not survive the line format unquoted.
std::string quote_if_needed(const std::string& v) {
  if (v.empty() || v.front() == ' ' || v.back() == ' ' || v.front() == '"' || v.find('\n') != std::string::npos) {
    return nlohmann::json(v).dump();
  }
  return v;
}

}  // namespace

Config::Config() : annotation_patterns(default_annotation_patterns()) {}

void Config::set(const std::string& key, const std::string& v) {
  if (key == "seed") seed = parse_int<std::uint64_t>(key, v);
  else if (key == "alpha") alpha = parse_double(key, v);
  else if (key == "denominator") denominator = parse_denominator(v);
  else if (key == "threads") threads = parse_int<std::size_t>(key, v);
  else if (key == "lexicon") lexicon = v;
  else if (key == "sentiment_lexicon") sentiment_lexicon = v;
  else if (key == "annotation_pattern") annotation_patterns.push_back(v);
  else if (key == "exclude_speaker") exclude_speakers.insert(v);
  else if (key == "context.top_k") context_top_k = parse_int<std::size_t>(key, v);
  else if (key == "stability.enabled") stability_enabled = parse_bool(key, v);
  else if (key == "stability.n") stability_n = parse_int<std::size_t>(key, v);
  else if (key == "stability.size") stability_size = parse_int<std::size_t>(key, v);
  else if (key == "stability.denominator") stability_denominator = parse_denominator(v);
  else if (key == "generate.endpoint") endpoint = v;
  else if (key == "generate.model") model = v;
  else if (key == "generate.temperature") temperature = parse_double(key, v);
  else if (key == "generate.max_tokens") max_tokens = parse_int<int>(key, v);
  else if (key == "generate.system_prompt") system_prompt = v;
  else if (key == "generate.max_in_flight") max_in_flight = parse_int<std::size_t>(key, v);
  else if (key == "generate.max_attempts") max_attempts = parse_int<int>(key, v);
  else if (key == "generate.base_backoff_ms") base_backoff_ms = parse_int<std::int64_t>(key, v);
  else if (key == "generate.max_backoff_ms") max_backoff_ms = parse_int<std::int64_t>(key, v);
  else if (key == "generate.timeout_s") timeout_s = parse_int<std::int64_t>(key, v);
  else if (key == "generate.api_key_env") api_key_env = v;
  else if (key == "generate.weights") weights = v;
  else throw ArgumentError("unknown config key '" + key + "'");
}

Config Config::parse(std::string_view text) {
  Config c;
  bool patterns_replaced = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("config: expected 'key = value'", line_no);
    const auto key = trim(std::string_view(line).substr(0, eq));
    auto value = trim(std::string_view(line).substr(eq + 1));
    if (!value.empty() && value.front() == '"') {
      try {
        value = nlohmann::json::parse(value).get<std::string>();
      } catch (const nlohmann::json::exception&) {
        throw ParseError("config: bad quoted value for '" + key + "'", line_no);
      }
    }
    if (key == "annotation_pattern" && !patterns_replaced) {
      c.annotation_patterns.clear();
      patterns_replaced = true;
    }
    try {
      c.set(key, value);
    } catch (const ArgumentError& e) {
      throw ParseError(std::string("config: ") + e.what(), line_no);
    }
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  auto c = parse(read_text_file(path));
  c.base_dir = path.parent_path();
  return c;
}

void Config::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must be in (0, 1)");
  if (threads == 0) throw ArgumentError("threads must be at least 1");
  if (stability_n == 0 || stability_size == 0) throw ArgumentError("stability.n and stability.size must be positive");
  if (max_in_flight == 0) throw ArgumentError("generate.max_in_flight must be at least 1");
  if (max_attempts < 1) throw ArgumentError("generate.max_attempts must be at least 1");
  if (max_tokens < 1) throw ArgumentError("generate.max_tokens must be positive");
  if (base_backoff_ms < 0 || max_backoff_ms < base_backoff_ms) throw ArgumentError("bad generate backoff bounds");
  if (timeout_s < 1) throw ArgumentError("generate.timeout_s must be positive");
  if (!(temperature >= 0.0)) throw ArgumentError("generate.temperature must be non-negative");
}

std::map<std::string, std::string> Config::effective() const {
  return {
      {"seed", std::to_string(seed)},
      {"alpha", number(alpha)},
      {"denominator", to_string(denominator)},
      {"threads", std::to_string(threads)},
      {"lexicon", lexicon},
      {"sentiment_lexicon", sentiment_lexicon},
      {"annotation_pattern", nlohmann::json(annotation_patterns).dump()},
      {"exclude_speaker", nlohmann::json(exclude_speakers).dump()},
      {"context.top_k", std::to_string(context_top_k)},
      {"stability.enabled", stability_enabled ? "true" : "false"},
      {"stability.n", std::to_string(stability_n)},
      {"stability.size", std::to_string(stability_size)},
      {"stability.denominator", to_string(stability_denominator)},
      {"generate.endpoint", endpoint},
      {"generate.model", model},
      {"generate.temperature", number(temperature)},
      {"generate.max_tokens", std::to_string(max_tokens)},
      {"generate.system_prompt", system_prompt},
      {"generate.max_in_flight", std::to_string(max_in_flight)},
      {"generate.max_attempts", std::to_string(max_attempts)},
      {"generate.base_backoff_ms", std::to_string(base_backoff_ms)},
      {"generate.max_backoff_ms", std::to_string(max_backoff_ms)},
      {"generate.timeout_s", std::to_string(timeout_s)},
      {"generate.api_key_env", api_key_env},
      {"generate.weights", weights},
  };
}

std::string Config::serialize() const {
  std::string out;
  for (const auto& [key, value] : effective()) {
    if (key == "annotation_pattern" || key == "exclude_speaker") continue;
    out += key + " = " + quote_if_needed(value) + "\n";
  }
  // An empty pattern list cannot be written as lines; the defaults come back.
  for (const auto& p : annotation_patterns) out += "annotation_pattern = " + quote_if_needed(p) + "\n";
  for (const auto& s : exclude_speakers) out += "exclude_speaker = " + quote_if_needed(s) + "\n";
  return out;
}

std::string Config::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(serialize())));
  return buf;
}

std::filesystem::path Config::resolve(const std::string& path) const {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace aave
