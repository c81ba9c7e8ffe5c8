#include "aave/generator.hpp"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <regex>
#include <set>
#include <thread>

#include <json.hpp>

#include "aave/error.hpp"
#include "aave/io.hpp"
#include "aave/rng.hpp"
#include "builtin_prompt_coraal.inc"
#include "builtin_prompt_twitter.inc"

namespace aave {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kGenderSlot = "{gender}";
constexpr std::string_view kCitySlot = "{city}";

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      out.push_back(text.substr(pos));
      break;
    }
    auto line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    pos = nl + 1;
  }
  return out;
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

struct Rendered {
  std::string prompt;
  std::optional<std::string> gender;
  std::optional<std::string> city;
};

Rendered render(const PromptTemplate& tmpl, const DemographicWeights& weights, std::mt19937_64& rng) {
  Rendered r;
  r.prompt = tmpl.body;
  if (tmpl.kind == TemplateKind::twitter_style) return r;
  weights.validate();
  r.gender = weights.gender[weighted_choice(weights.gender, rng)].first;
  r.city = weights.city[weighted_choice(weights.city, rng)].first;
  replace_all(r.prompt, kGenderSlot, *r.gender);
  replace_all(r.prompt, kCitySlot, *r.city);
  return r;
}

Rendered render_for(const PromptTemplate& tmpl, const DemographicWeights& weights, std::uint64_t seed,
                    std::size_t index) {
  std::mt19937_64 rng(splitmix64(seed + index));
  return render(tmpl, weights, rng);
}

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)", std::regex::icase);
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw ArgumentError("endpoint must be an http(s) URL: '" + url + "'");
  return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

std::string index_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu", index);
  return buf;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json job_identity(const GenerationJob& job) {
  return {{"model", job.model}, {"template", std::string(to_string(job.prompt.kind))}, {"seed", job.seed}};
}

// Shared bookkeeping for one run. All members are guarded by `mu`.
class RunState {
 public:
  RunState(const GenerationJob& job, std::set<std::size_t> archived)
      : job_(job), archived_(std::move(archived)), attempts_path_(job.out_dir / "attempts.jsonl") {}

  void log_attempt(std::size_t index, int attempt, std::optional<int> status, const std::string& error,
                   long long elapsed_ms) {
    json line = {{"index", index}, {"attempt", attempt}, {"status", status ? json(*status) : json(nullptr)},
                 {"error", error},  {"elapsed_ms", elapsed_ms}, {"time", utc_timestamp()}};
    std::lock_guard lock(mu_);
    std::ofstream out(attempts_path_, std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot append to " + attempts_path_.string());
    out << line.dump() << '\n';
  }

  void mark_archived(std::size_t index) {
    std::lock_guard lock(mu_);
    archived_.insert(index);
    failures_.erase(index);
    save_locked();
  }

  void mark_failed(ItemFailure f) {
    std::lock_guard lock(mu_);
    failures_[f.index] = std::move(f);
    save_locked();
  }

  void save() {
    std::lock_guard lock(mu_);
    save_locked();
  }

  std::vector<ItemFailure> failures() const {
    std::lock_guard lock(mu_);
    std::vector<ItemFailure> out;
    for (const auto& [i, f] : failures_) out.push_back(f);
    return out;
  }

 private:
  void save_locked() {
    json failed = json::array();
    for (const auto& [i, f] : failures_) {
      failed.push_back({{"index", f.index}, {"attempts", f.attempts}, {"reason", f.reason}});
    }
    json state = {{"version", 1},
                  {"job", job_identity(job_)},
                  {"endpoint", job_.endpoint},
                  {"n_generations", job_.n_generations},
                  {"archived", archived_},
                  {"failed", failed},
                  {"updated", utc_timestamp()}};
    write_file_atomic(job_.out_dir / "job_state.json", state.dump(2) + "\n");
  }

  const GenerationJob& job_;
  mutable std::mutex mu_;
  std::set<std::size_t> archived_;
  std::map<std::size_t, ItemFailure> failures_;
  fs::path attempts_path_;
};

void check_resumable(const GenerationJob& job) {
  const auto path = job.out_dir / "job_state.json";
  if (!fs::exists(path)) return;
  const auto state = json::parse(read_text_file(path), nullptr, false);
  if (state.is_discarded() || !state.contains("job")) throw ParseError("unreadable job state " + path.string());
  if (state["job"] != job_identity(job)) {
    throw ArgumentError(job.out_dir.string() + " holds archives of a different job (" + state["job"].dump() + ")");
  }
}

std::chrono::milliseconds backoff_for(const GenerationJob& job, int attempt) {
  const double factor = std::ldexp(1.0, std::min(attempt - 1, 30));
  const double ms = std::min(static_cast<double>(job.max_backoff.count()),
                             static_cast<double>(job.base_backoff.count()) * factor);
  return std::chrono::milliseconds(static_cast<long long>(ms));
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(TemplateKind k) { return k == TemplateKind::coraal_style ? "coraal_style" : "twitter_style"; }

TemplateKind parse_template_kind(std::string_view s) {
  if (s == "coraal" || s == "coraal_style") return TemplateKind::coraal_style;
  if (s == "twitter" || s == "twitter_style") return TemplateKind::twitter_style;
  throw ArgumentError("unknown template '" + std::string(s) + "' (expected coraal or twitter)");
}

PromptTemplate PromptTemplate::builtin(TemplateKind kind) {
  const auto text = kind == TemplateKind::coraal_style ? kBuiltinPromptCoraal : kBuiltinPromptTwitter;
  return {kind, std::string(trim(text))};
}

void PromptTemplate::validate() const {
  const bool g = body.find(kGenderSlot) != std::string::npos;
  const bool c = body.find(kCitySlot) != std::string::npos;
  if (kind == TemplateKind::coraal_style && !(g && c)) {
    throw ArgumentError("interview template needs both {gender} and {city} slots");
  }
  if (kind == TemplateKind::twitter_style && (g || c)) throw ArgumentError("tweet template takes no slots");
}

DemographicWeights DemographicWeights::parse(std::string_view text) {
  static const std::regex entry(R"re(^("([^"]*)"|([A-Za-z0-9_.\- ]*[A-Za-z0-9_.\-]))\s*=\s*(\S+)$)re");
  DemographicWeights w;
  std::vector<std::pair<std::string, double>>* table = nullptr;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  for (auto raw : split_lines(text)) {
    ++line_no;
    std::string line(raw);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    const auto t = std::string(trim(line));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t == "[gender]") table = &w.gender;
      else if (t == "[city]") table = &w.city;
      else throw ParseError("unknown table " + t + " (expected [gender] or [city])", line_no);
      seen.clear();
      continue;
    }
    if (!table) throw ParseError("weight outside a [gender] or [city] table", line_no);
    std::smatch m;
    if (!std::regex_match(t, m, entry)) throw ParseError("expected key = number", line_no);
    const std::string key = m[2].matched ? m[2].str() : m[3].str();
    const std::string value = m[4].str();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      throw ParseError("weight for '" + key + "' is not a number", line_no);
    }
    if (key.empty()) throw ParseError("empty key", line_no);
    if (!seen.insert(key).second) throw ParseError("duplicate key '" + key + "'", line_no);
    table->emplace_back(key, v);
  }
  return w;
}

DemographicWeights DemographicWeights::load(const fs::path& path) { return parse(read_text_file(path)); }

void DemographicWeights::validate() const {
  auto check = [](const std::vector<std::pair<std::string, double>>& t, const char* name) {
    if (t.empty()) throw ArgumentError(std::string("no ") + name + " weights");
    double sum = 0.0;
    for (const auto& [k, v] : t) {
      if (!std::isfinite(v) || v < 0.0) throw ArgumentError(std::string(name) + " weight for '" + k + "' is negative");
      sum += v;
    }
    if (!(sum > 0.0)) throw ArgumentError(std::string(name) + " weights sum to zero");
  };
  check(gender, "gender");
  check(city, "city");
}

std::size_t weighted_choice(const std::vector<std::pair<std::string, double>>& weights, std::mt19937_64& rng) {
  double total = 0.0;
  std::size_t last = weights.size();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    total += weights[i].second;
    if (weights[i].second > 0) last = i;
  }
  if (last == weights.size()) throw ArgumentError("weights sum to zero");
  const double u = uniform_unit(rng) * total;
  double cum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i].second <= 0) continue;
    cum += weights[i].second;
    if (u < cum) return i;
  }
  return last;
}

std::string render_prompt(const PromptTemplate& tmpl, const DemographicWeights& weights, std::mt19937_64& rng) {
  return render(tmpl, weights, rng).prompt;
}

std::string render_prompt_for(const PromptTemplate& tmpl, const DemographicWeights& weights, std::uint64_t seed,
                              std::size_t index) {
  return render_for(tmpl, weights, seed, index).prompt;
}

void GenerationJob::validate() const {
  prompt.validate();
  if (n_generations == 0) throw ArgumentError("n_generations must be at least 1");
  if (model.empty()) throw ArgumentError("model name is empty");
  split_endpoint(endpoint);
  if (out_dir.empty()) throw ArgumentError("output directory is empty");
  if (max_in_flight == 0) throw ArgumentError("max_in_flight must be at least 1");
  if (max_attempts < 1) throw ArgumentError("max_attempts must be at least 1");
  if (max_tokens < 1) throw ArgumentError("max_tokens must be at least 1");
}

fs::path archive_path(const fs::path& out_dir, std::size_t index) {
  return out_dir / "raw" / (index_name(index) + ".resp");
}

std::string extract_content(std::string_view body) {
  const auto j = json::parse(body, nullptr, false);
  if (j.is_discarded()) throw ParseError("response body is not JSON");
  if (!j.is_object() || !j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) {
    throw ParseError("response has no choices");
  }
  const auto& first = j["choices"][0];
  if (!first.is_object() || !first.contains("message") || !first["message"].is_object() ||
      !first["message"].contains("content") || !first["message"]["content"].is_string()) {
    throw ParseError("response has no choices[0].message.content string");
  }
  return first["message"]["content"].get<std::string>();
}

std::vector<std::string> split_tweets(std::string_view content) {
  static const std::regex marker(R"(^(\d{1,3}[.)]|[-*])\s+)");
  std::vector<std::string> out;
  for (auto line : split_lines(content)) {
    std::string t(trim(line));
    t = std::regex_replace(t, marker, "", std::regex_constants::format_first_only);
    t = std::string(trim(t));
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

JobResult run_job(const GenerationJob& job, const DemographicWeights& weights) {
  job.validate();
  if (job.prompt.kind == TemplateKind::coraal_style) weights.validate();
  const auto endpoint = split_endpoint(job.endpoint);

  std::string api_key;
  if (const char* k = std::getenv(job.api_key_env.c_str())) api_key = k;
  if (api_key.empty() && job.require_api_key) {
    throw ArgumentError("environment variable " + job.api_key_env + " holding the API key is not set");
  }

  std::error_code ec;
  fs::create_directories(job.out_dir / "raw", ec);
  if (ec) throw IoError("cannot create " + (job.out_dir / "raw").string());
  check_resumable(job);

  JobResult result;
  std::set<std::size_t> done;
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < job.n_generations; ++i) {
    if (fs::exists(archive_path(job.out_dir, i))) {
      done.insert(i);
      ++result.skipped;
    } else {
      pending.push_back(i);
    }
  }
  RunState state(job, done);
  state.save();

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> requests{0};
  std::atomic<std::size_t> archived{0};
  std::atomic<bool> stop{false};
  std::mutex auth_mu;
  std::string auth_message;

  auto process = [&](httplib::Client& cli, std::size_t index) {
    const auto rendered = render_for(job.prompt, weights, job.seed, index);
    json messages = json::array();
    if (job.system_prompt) messages.push_back({{"role", "system"}, {"content", *job.system_prompt}});
    messages.push_back({{"role", "user"}, {"content", rendered.prompt}});
    const json request = {{"model", job.model},
                          {"messages", messages},
                          {"temperature", job.temperature},
                          {"max_tokens", job.max_tokens}};
    const std::string payload = request.dump();
    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

    std::string reason;
    int attempt = 1;
    for (; attempt <= job.max_attempts; ++attempt) {
      if (stop) return;
      const auto t0 = std::chrono::steady_clock::now();
      auto res = cli.Post(endpoint.path, headers, payload, "application/json");
      ++requests;
      const auto elapsed =
          std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();

      if (!res) {
        reason = "transport error: " + httplib::to_string(res.error());
        state.log_attempt(index, attempt, std::nullopt, reason, elapsed);
      } else {
        const int status = res->status;
        if (status == 401 || status == 403) {
          state.log_attempt(index, attempt, status, "authentication rejected", elapsed);
          std::lock_guard lock(auth_mu);
          if (!stop.exchange(true)) {
            auth_message = "endpoint " + job.endpoint + " rejected the credentials (HTTP " + std::to_string(status) + ")";
          }
          return;
        }
        if (status >= 200 && status < 300) {
          state.log_attempt(index, attempt, status, "", elapsed);
          json header = {{"aavekit_archive", 1},
                         {"index", index},
                         {"model", job.model},
                         {"endpoint", job.endpoint},
                         {"template", std::string(to_string(job.prompt.kind))},
                         {"prompt", rendered.prompt},
                         {"system_prompt", job.system_prompt ? json(*job.system_prompt) : json(nullptr)},
                         {"temperature", job.temperature},
                         {"max_tokens", job.max_tokens},
                         {"seed", job.seed},
                         {"attempts", attempt},
                         {"http_status", status},
                         {"received", utc_timestamp()}};
          if (rendered.gender) header["slots"] = {{"gender", *rendered.gender}, {"city", *rendered.city}};
          try {
            extract_content(res->body);
          } catch (const ParseError& e) {
            write_file_atomic(job.out_dir / "raw" / (index_name(index) + ".bad"), header.dump() + "\n" + res->body);
            state.mark_failed({index, attempt, std::string("malformed response: ") + e.what()});
            return;
          }
          write_file_atomic(archive_path(job.out_dir, index), header.dump() + "\n" + res->body);
          ++archived;
          state.mark_archived(index);
          return;
        }
        reason = "HTTP " + std::to_string(status);
        state.log_attempt(index, attempt, status, reason, elapsed);
        if (status != 429 && status < 500) {
          state.mark_failed({index, attempt, reason});
          return;
        }
      }
      if (attempt < job.max_attempts) std::this_thread::sleep_for(backoff_for(job, attempt));
    }
    state.mark_failed({index, job.max_attempts, reason + " after " + std::to_string(job.max_attempts) + " attempts"});
  };

  auto worker = [&]() {
    httplib::Client cli(endpoint.base);
    cli.set_connection_timeout(std::chrono::seconds(30));
    cli.set_read_timeout(job.timeout);
    cli.set_write_timeout(std::chrono::seconds(60));
    for (;;) {
      const auto k = next++;
      if (k >= pending.size() || stop) break;
      process(cli, pending[k]);
    }
  };

  const auto n_threads = std::min(job.max_in_flight, pending.size());
  std::vector<std::thread> threads;
  std::exception_ptr error;
  std::mutex error_mu;
  for (std::size_t t = 0; t < n_threads; ++t) {
    threads.emplace_back([&]() {
      try {
        worker();
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        stop = true;
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
  if (!auth_message.empty()) throw AuthError(auth_message);

  result.requests_issued = requests;
  result.archived = archived;
  result.failures = state.failures();
  result.documents = parse_archive(job.out_dir);
  return result;
}

std::vector<RawDocument> parse_archive(const fs::path& out_dir) {
  static const std::regex name_re(R"(^(\d{6,})\.resp$)");
  std::vector<std::pair<std::size_t, fs::path>> files;
  const auto raw = out_dir / "raw";
  if (!fs::is_directory(raw)) throw IoError("no archive directory " + raw.string());
  for (const auto& e : fs::directory_iterator(raw)) {
    const auto name = e.path().filename().string();
    std::smatch m;
    if (e.is_regular_file() && std::regex_match(name, m, name_re)) files.emplace_back(std::stoull(m[1].str()), e.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<RawDocument> docs;
  for (const auto& [index, path] : files) {
    const auto content = read_text_file(path);
    const auto nl = content.find('\n');
    if (nl == std::string::npos) throw ParseError("archive " + path.string() + " has no header line");
    const auto header = json::parse(content.substr(0, nl), nullptr, false);
    if (header.is_discarded() || !header.contains("template") || !header.contains("model")) {
      throw ParseError("archive " + path.string() + " has a malformed header");
    }
    std::string text;
    try {
      text = extract_content(std::string_view(content).substr(nl + 1));
    } catch (const ParseError& e) {
      throw ParseError("archive " + path.string() + ": " + e.what());
    }
    const auto kind = parse_template_kind(header["template"].get<std::string>());
    const auto model = header["model"].get<std::string>();
    const std::string id = "gen-" + index_name(index);
    std::map<std::string, std::string> meta;
    if (header.contains("slots")) {
      for (const auto& [k, v] : header["slots"].items()) meta[k] = v.get<std::string>();
    }
    if (kind == TemplateKind::coraal_style) {
      RawDocument d;
      d.id = id;
      d.source_kind = SourceKind::interview;
      d.origin = Origin::model;
      d.model_name = model;
      d.text = text;
      d.meta = meta;
      if (!trim(d.text).empty()) docs.push_back(std::move(d));
    } else {
      std::size_t line = 0;
      for (auto& tweet : split_tweets(text)) {
        RawDocument d;
        d.id = id + ":" + std::to_string(++line);
        d.source_kind = SourceKind::tweetset;
        d.origin = Origin::model;
        d.model_name = model;
        d.text = std::move(tweet);
        docs.push_back(std::move(d));
      }
    }
  }
  return docs;
}

}  // namespace aave
