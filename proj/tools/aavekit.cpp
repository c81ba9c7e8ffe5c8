// aavekit: command-line front end. One subcommand per pipeline stage, so the
// expensive ones (generation above all) are run once and cached on disk.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "aave/config.hpp"
#include "aave/corpus.hpp"
#include "aave/detectors.hpp"
#include "aave/error.hpp"
#include "aave/generator.hpp"
#include "aave/io.hpp"
#include "aave/pipeline.hpp"
#include "aave/report.hpp"
#include "aave/sentiment.hpp"
#include "aave/stats.hpp"
#include "aave/tagger.hpp"

namespace fs = std::filesystem;
using namespace aave;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitPartial = 3;  // generate: some items failed

struct PartialFailure {};

const std::vector<std::string> kFormats = {"interview", "tweets", "jsonl"};
const std::vector<std::string> kReportFormats = {"md", "csv", "json"};
const std::vector<std::string> kDenominators = {"per_10k_sentences", "per_100_sentences", "per_100_words",
                                                "per10k", "per100", "per100words"};

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Key-value config file");
    cmd->add_option("--set", overrides, "Override one config key (key=value), repeatable");
  }

  Config load() const {
    Config c = config_path.empty() ? Config{} : Config::load(config_path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ArgumentError("--set expects key=value, got '" + kv + "'");
      c.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    c.validate();
    return c;
  }
};

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_file_atomic(out, text);
  }
}

Corpus read_tagged(const std::string& path, const Lexicon& lex) {
  auto c = read_corpus(path);
  ensure_tagged(c, lex);
  return c;
}

std::string documents_jsonl(const std::vector<RawDocument>& docs) {
  std::string out;
  for (const auto& d : docs) {
    nlohmann::json j = {{"id", d.id}, {"text", d.text}, {"meta", d.meta}};
    out += j.dump() + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------

struct IngestCmd {
  Common common;
  std::string format = "interview";
  std::string origin = "human";
  std::string name;
  std::string model_name;
  std::vector<std::string> exclude_speakers;
  std::vector<std::string> paths;
  std::string out;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("ingest", "Read raw text into a segmented corpus cache");
    common.attach(cmd);
    cmd->add_option("--format", format, "Input format")->check(CLI::IsMember(kFormats))->capture_default_str();
    cmd->add_option("--origin", origin, "human or model")->check(CLI::IsMember({"human", "model"}))->capture_default_str();
    cmd->add_option("--name", name, "Corpus name")->required();
    cmd->add_option("--model-name", model_name, "Model name recorded on each document");
    cmd->add_option("--exclude-speaker", exclude_speakers, "Drop interview turns by this speaker label");
    cmd->add_option("paths", paths, "Input files")->required();
    cmd->add_option("--out", out, "Corpus cache to write")->required();
    cmd->callback([this] { run(); });
  }

  void run() {
    const auto cfg = common.load();
    LoadOptions opts;
    opts.annotation_patterns = cfg.annotation_patterns;
    opts.exclude_speakers = cfg.exclude_speakers;
    opts.exclude_speakers.insert(exclude_speakers.begin(), exclude_speakers.end());
    if (!model_name.empty()) opts.model_name = model_name;
    std::vector<fs::path> ps(paths.begin(), paths.end());
    const auto c = load_corpus(ps, parse_input_format(format), parse_origin(origin), name, opts);
    save_corpus(c, out);
    std::printf("%s: %zu documents, %zu sentences, %zu words\n", c.name.c_str(), c.stats.document_count,
                c.stats.sentence_count, c.stats.word_count);
  }
};

struct TagCmd {
  Common common;
  std::string corpus, out;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("tag", "Part-of-speech tag a corpus cache");
    common.attach(cmd);
    cmd->add_option("--corpus", corpus, "Corpus cache")->required();
    cmd->add_option("--out", out, "Tagged corpus cache to write")->required();
    cmd->callback([this] { run(); });
  }

  void run() {
    const auto cfg = common.load();
    const auto res = Resources::from_config(cfg);
    auto c = read_corpus(corpus);
    c.tagged = false;  // always retag with the configured lexicon
    ensure_tagged(c, res.lexicon);
    save_corpus(c, out);
  }
};

struct DetectCmd {
  Common common;
  std::string corpus, out;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("detect", "Run the feature detectors; one hit per output line");
    common.attach(cmd);
    cmd->add_option("--corpus", corpus, "Corpus cache (tagged on the fly if needed)")->required();
    cmd->add_option("--out", out, "Hits file (jsonl)")->required();
    cmd->callback([this] { run(); });
  }

  void run() {
    const auto cfg = common.load();
    const auto res = Resources::from_config(cfg);
    const auto c = read_tagged(corpus, res.lexicon);
    if (c.sentences.empty()) throw ArgumentError("empty corpus '" + c.name + "'");
    const auto hits = detect_all(c, res.lexicon);
    write_hits(hits, out);
    std::array<std::size_t, kFeatureCount> n{};
    for (const auto& h : hits) ++n[feature_index(h.feature)];
    for (auto f : kAllFeatures) std::printf("%-20s %zu\n", std::string(feature_name(f)).c_str(), n[feature_index(f)]);
  }
};

struct CompareCmd {
  Common common;
  std::string human;
  std::vector<std::string> models;
  std::string denominator;
  std::string format = "json";
  std::string out;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("compare", "Feature densities and two-proportion tests, human vs model");
    common.attach(cmd);
    cmd->add_option("--human", human, "Human corpus cache")->required();
    cmd->add_option("--model", models, "Model corpus cache, repeatable")->required();
    cmd->add_option("--denominator", denominator, "Density unit (overrides config)")->check(CLI::IsMember(kDenominators));
    cmd->add_option("--format", format)->check(CLI::IsMember(kReportFormats))->capture_default_str();
    cmd->add_option("--out", out, "Output file (default stdout)");
    cmd->callback([this] { run(); });
  }

  void run() {
    auto cfg = common.load();
    if (!denominator.empty()) cfg.denominator = parse_denominator(denominator);
    const auto res = Resources::from_config(cfg);
    ReportBundle b;
    const auto h = read_tagged(human, res.lexicon);
    if (h.sentences.empty()) throw ArgumentError("empty corpus '" + h.name + "'");
    b.human_density = compute_densities(detect_all(h, res.lexicon), h, cfg.denominator);
    std::vector<std::string> names{h.name};
    for (const auto& p : models) {
      const auto m = read_tagged(p, res.lexicon);
      if (m.sentences.empty()) throw ArgumentError("empty corpus '" + m.name + "'");
      b.model_densities.push_back(compute_densities(detect_all(m, res.lexicon), m, cfg.denominator));
      const auto rs = compare_corpora(b.human_density, b.model_densities.back(), cfg.alpha);
      b.comparisons.insert(b.comparisons.end(), rs.begin(), rs.end());
      names.push_back(m.name);
    }
    b.provenance = make_provenance(cfg, names);
    emit(render_feature_table(b, parse_report_format(format)), out);
  }
};

struct ContextCmd {
  Common common;
  std::string feature;
  std::string human;
  std::vector<std::string> models;
  std::vector<std::string> subjects;
  std::size_t top = 0;
  std::string format = "md";
  std::string out;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("context", "Feature rates conditioned on the subject");
    common.attach(cmd);
    cmd->add_option("--feature", feature, "aint, habitual_be, perfective_done or null_copula")->required();
    cmd->add_option("--human", human, "Human corpus cache")->required();
    cmd->add_option("--model", models, "Model corpus cache, repeatable")->required();
    cmd->add_option("--subject", subjects, "Subjects to compare (default: the most frequent in the human corpus)")
        ->delimiter(',');
    cmd->add_option("--top", top, "How many human subjects to take (overrides context.top_k)");
    cmd->add_option("--format", format)->check(CLI::IsMember(kReportFormats))->capture_default_str();
    cmd->add_option("--out", out, "Output file (default stdout)");
    cmd->callback([this] { run(); });
  }

  void run() {
    auto cfg = common.load();
    const auto f = parse_feature(feature);
    if (!supports_context(f)) throw ArgumentError(std::string(feature_name(f)) + " has no subject to condition on");
    if (top > 0) cfg.context_top_k = top;
    const auto res = Resources::from_config(cfg);
    const auto h = read_tagged(human, res.lexicon);
    const auto h_hits = detect_all(h, res.lexicon);
    std::vector<Corpus> ms;
    std::vector<std::vector<FeatureHit>> m_hits;
    for (const auto& p : models) {
      ms.push_back(read_tagged(p, res.lexicon));
      m_hits.push_back(detect_all(ms.back(), res.lexicon));
    }
    std::vector<LabeledCorpus> labeled;
    std::vector<std::string> names{h.name};
    for (std::size_t i = 0; i < ms.size(); ++i) {
      labeled.push_back({&ms[i], &m_hits[i]});
      names.push_back(ms[i].name);
    }
    auto subj = subjects;
    if (subj.empty()) subj = top_human_contexts(h_hits, f, cfg.context_top_k);
    ReportBundle b;
    b.provenance = make_provenance(cfg, names);
    const auto table = contextual_compare(f, subj, {&h, &h_hits}, labeled, cfg.alpha, res.lexicon);
    const auto fmt = parse_report_format(format);
    std::string text = render_context_table(b, table, fmt);
    if (fmt == ReportFormat::md) {
      text = "<!-- aavekit " + b.provenance.tool_version + "; config: " + b.provenance.config_hash + " -->\n\n" + text;
    } else if (fmt == ReportFormat::csv) {
      text = "# aavekit " + b.provenance.tool_version + "; config: " + b.provenance.config_hash + "\n" + text;
    }
    emit(text, out);
  }
};

struct SentimentCmd {
  Common common;
  std::vector<std::string> corpora;
  std::string lexicon;
  std::string format = "json";
  std::string out;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("sentiment", "Sentence-level sentiment summary per corpus");
    common.attach(cmd);
    cmd->add_option("--corpus", corpora, "Corpus cache, repeatable")->required();
    cmd->add_option("--lexicon", lexicon, "Sentiment lexicon (token<TAB>valence...), overrides config");
    cmd->add_option("--format", format)->check(CLI::IsMember(kReportFormats))->capture_default_str();
    cmd->add_option("--out", out, "Output file (default stdout)");
    cmd->callback([this] { run(); });
  }

  void run() {
    auto cfg = common.load();
    if (!lexicon.empty()) {
      cfg.sentiment_lexicon = fs::absolute(lexicon).string();
    }
    const auto lex = cfg.sentiment_lexicon.empty() ? SentimentLexicon::builtin()
                                                   : SentimentLexicon::load(cfg.resolve(cfg.sentiment_lexicon));
    ReportBundle b;
    std::vector<std::string> names;
    for (const auto& p : corpora) {
      const auto c = read_corpus(p);
      auto s = summarize(c, lex);
      s.scores.clear();
      b.sentiment.push_back(std::move(s));
      names.push_back(c.name);
    }
    b.provenance = make_provenance(cfg, names);
    emit(render_sentiment(b, parse_report_format(format)), out);
  }
};

struct StabilityCmd {
  Common common;
  std::string corpus;
  std::size_t n = 0, size = 0;
  std::optional<std::uint64_t> seed;
  std::string denominator;
  std::string format = "md";
  std::string out;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("stability", "Feature densities over seeded random subsamples");
    common.attach(cmd);
    cmd->add_option("--corpus", corpus, "Corpus cache")->required();
    cmd->add_option("--n", n, "Number of subsamples (overrides stability.n)");
    cmd->add_option("--size", size, "Sentences per subsample (overrides stability.size)");
    cmd->add_option("--seed", seed, "Seed (overrides seed)");
    cmd->add_option("--denominator", denominator)->check(CLI::IsMember(kDenominators));
    cmd->add_option("--format", format)->check(CLI::IsMember(kReportFormats))->capture_default_str();
    cmd->add_option("--out", out, "Output file (default stdout)");
    cmd->callback([this] { run(); });
  }

  void run() {
    auto cfg = common.load();
    if (n > 0) cfg.stability_n = n;
    if (size > 0) cfg.stability_size = size;
    if (seed) cfg.seed = *seed;
    if (!denominator.empty()) cfg.stability_denominator = parse_denominator(denominator);
    const auto res = Resources::from_config(cfg);
    const auto c = read_tagged(corpus, res.lexicon);
    ReportBundle b;
    b.provenance = make_provenance(cfg, {c.name});
    b.stability = stability_analysis(c, detect_all(c, res.lexicon), cfg.stability_n, cfg.stability_size, cfg.seed,
                                     cfg.stability_denominator);
    emit(render_stability(b, parse_report_format(format)), out);
  }
};

struct GenerateCmd {
  Common common;
  std::string template_name;
  std::size_t n = 0;
  std::string model, endpoint, weights, out, system_prompt, api_key_env;
  std::optional<std::uint64_t> seed;
  std::optional<double> temperature;
  std::optional<int> max_tokens;
  std::optional<std::size_t> max_in_flight;
  std::optional<int> max_attempts;
  bool no_auth = false;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("generate", "Request completions from a chat-completions endpoint");
    common.attach(cmd);
    cmd->add_option("--template", template_name, "coraal or twitter")
        ->required()
        ->check(CLI::IsMember({"coraal", "twitter", "coraal_style", "twitter_style"}));
    cmd->add_option("--n", n, "Number of generations")->required()->check(CLI::PositiveNumber);
    cmd->add_option("--model", model, "Model name (overrides generate.model)");
    cmd->add_option("--endpoint", endpoint, "Full chat-completions URL (overrides generate.endpoint)");
    cmd->add_option("--weights", weights, "Demographic weights file (coraal template)");
    cmd->add_option("--out", out, "Job directory")->required();
    cmd->add_option("--seed", seed, "Seed (overrides seed)");
    cmd->add_option("--temperature", temperature);
    cmd->add_option("--max-tokens", max_tokens);
    cmd->add_option("--system-prompt", system_prompt);
    cmd->add_option("--max-in-flight", max_in_flight);
    cmd->add_option("--max-attempts", max_attempts);
    cmd->add_option("--api-key-env", api_key_env, "Environment variable holding the API key");
    cmd->add_flag("--no-auth", no_auth, "Send no Authorization header (local endpoints)");
    cmd->callback([this] { run(); });
  }

  void run() {
    auto cfg = common.load();
    if (!model.empty()) cfg.model = model;
    if (!endpoint.empty()) cfg.endpoint = endpoint;
    if (!weights.empty()) cfg.weights = fs::absolute(weights).string();
    if (!system_prompt.empty()) cfg.system_prompt = system_prompt;
    if (!api_key_env.empty()) cfg.api_key_env = api_key_env;
    if (seed) cfg.seed = *seed;
    if (temperature) cfg.temperature = *temperature;
    if (max_tokens) cfg.max_tokens = *max_tokens;
    if (max_in_flight) cfg.max_in_flight = *max_in_flight;
    if (max_attempts) cfg.max_attempts = *max_attempts;
    cfg.validate();

    GenerationJob job;
    job.prompt = PromptTemplate::builtin(parse_template_kind(template_name));
    job.n_generations = n;
    job.model = cfg.model;
    job.endpoint = cfg.endpoint;
    job.temperature = cfg.temperature;
    job.max_tokens = cfg.max_tokens;
    if (!cfg.system_prompt.empty()) job.system_prompt = cfg.system_prompt;
    job.seed = cfg.seed;
    job.out_dir = out;
    job.max_in_flight = cfg.max_in_flight;
    job.max_attempts = cfg.max_attempts;
    job.base_backoff = std::chrono::milliseconds(cfg.base_backoff_ms);
    job.max_backoff = std::chrono::milliseconds(cfg.max_backoff_ms);
    job.timeout = std::chrono::seconds(cfg.timeout_s);
    job.api_key_env = cfg.api_key_env;
    job.require_api_key = !no_auth;
    job.validate();

    DemographicWeights w;
    if (job.prompt.kind == TemplateKind::coraal_style) {
      if (cfg.weights.empty()) throw ArgumentError("the coraal template needs --weights (or generate.weights)");
      w = DemographicWeights::load(cfg.resolve(cfg.weights));
    }

    const auto result = run_job(job, w);
    write_file_atomic(fs::path(out) / "documents.jsonl", documents_jsonl(result.documents));
    std::printf("requested %zu, archived %zu, skipped %zu, failed %zu, documents %zu\n", result.requests_issued,
                result.archived, result.skipped, result.failures.size(), result.documents.size());
    for (const auto& f : result.failures) {
      std::fprintf(stderr, "item %zu failed after %d attempt(s): %s\n", f.index, f.attempts, f.reason.c_str());
    }
    if (!result.failures.empty()) throw PartialFailure{};
  }
};

struct ReportCmd {
  Common common;
  std::string bundle;
  std::string format = "md";
  std::string out;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("report", "Render a result bundle as tables and plot data");
    common.attach(cmd);
    cmd->add_option("--bundle", bundle, "Result bundle (JSON from run-all)")->required();
    cmd->add_option("--format", format)->check(CLI::IsMember(kReportFormats))->capture_default_str();
    cmd->add_option("--out", out, "Output directory")->required();
    cmd->callback([this] { run(); });
  }

  void run() {
    common.load();
    const auto b = read_bundle(bundle);
    for (const auto& name : write_report(b, parse_report_format(format), out)) std::printf("%s\n", name.c_str());
  }
};

struct EvalCmd {
  Common common;
  std::string gold, corpus;
  double min_accuracy = 0.0;
  bool show = false;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("eval-detectors", "Per-feature detector accuracy against gold labels");
    common.attach(cmd);
    cmd->add_option("--gold", gold, "gold.tsv: sentence_id<TAB>feature<TAB>0|1")->required();
    cmd->add_option("--corpus", corpus, "Corpus cache the ids refer to")->required();
    cmd->add_option("--min-accuracy", min_accuracy, "Fail when any feature scores below this")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_flag("--show-disagreements", show);
    cmd->callback([this] { run(); });
  }

  void run() {
    const auto cfg = common.load();
    const auto res = Resources::from_config(cfg);
    const auto labels = read_gold_tsv(gold);
    const auto c = read_tagged(corpus, res.lexicon);
    const auto ev = evaluate_against_gold(detect_all(c, res.lexicon), labels);
    std::printf("%-20s %6s %6s %6s %6s %9s\n", "feature", "tp", "fp", "fn", "tn", "accuracy");
    bool ok = true;
    for (const auto& a : ev.per_feature) {
      std::printf("%-20s %6zu %6zu %6zu %6zu %9.4f\n", std::string(feature_name(a.feature)).c_str(), a.true_positive,
                  a.false_positive, a.false_negative, a.true_negative, a.accuracy());
      if (a.accuracy() < min_accuracy) ok = false;
    }
    if (show) {
      for (const auto& d : ev.disagreements) {
        std::printf("%s\t%s\tgold=%d\tpredicted=%d\n", d.sentence_id.c_str(),
                    std::string(feature_name(d.feature)).c_str(), d.gold, d.predicted);
      }
    }
    if (!ok) throw ArgumentError("accuracy below " + std::to_string(min_accuracy));
  }
};

struct RunAllCmd {
  Common common;
  std::vector<std::string> human;
  std::string human_name = "human";
  std::string human_format = "interview";
  std::vector<std::string> models;  // NAME=PATH
  std::string model_format = "tweets";
  std::string format = "md";
  std::string out;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("run-all", "The whole workflow: ingest, tag, detect, compare, report");
    common.attach(cmd);
    cmd->add_option("--human", human, "Human corpus files")->required();
    cmd->add_option("--human-name", human_name)->capture_default_str();
    cmd->add_option("--human-format", human_format)->check(CLI::IsMember(kFormats))->capture_default_str();
    cmd->add_option("--model", models, "NAME=PATH, repeatable; several paths may share a name")->required();
    cmd->add_option("--model-format", model_format)->check(CLI::IsMember(kFormats))->capture_default_str();
    cmd->add_option("--format", format)->check(CLI::IsMember(kReportFormats))->capture_default_str();
    cmd->add_option("--out", out, "Output directory")->required();
    cmd->callback([this] { run(); });
  }

  void run() {
    // argument shape first; nothing is read before this passes
    std::vector<CorpusInput> ms;
    for (const auto& spec : models) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
        throw ArgumentError("--model expects NAME=PATH, got '" + spec + "'");
      }
      const auto name = spec.substr(0, eq);
      auto it = std::find_if(ms.begin(), ms.end(), [&](const CorpusInput& c) { return c.name == name; });
      if (it == ms.end()) {
        ms.push_back({name, {}, parse_input_format(model_format)});
        it = ms.end() - 1;
      }
      it->paths.push_back(spec.substr(eq + 1));
    }
    const auto fmt = parse_report_format(format);
    const auto cfg = common.load();
    const CorpusInput h{human_name, std::vector<fs::path>(human.begin(), human.end()), parse_input_format(human_format)};
    const auto bundle = run_pipeline(cfg, h, ms);
    write_bundle(bundle, fs::path(out) / "bundle.json");
    write_report(bundle, fmt, out);
    std::printf("%s\n", (fs::path(out) / "bundle.json").string().c_str());
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aavekit: dialect feature detection and human/model corpus comparison"};
  app.set_version_flag("--version", std::string(AAVEKIT_VERSION));
  app.require_subcommand(1);

  IngestCmd ingest;
  TagCmd tag;
  DetectCmd detect;
  CompareCmd compare;
  ContextCmd context;
  SentimentCmd sentiment;
  StabilityCmd stability;
  GenerateCmd generate;
  ReportCmd report;
  EvalCmd eval;
  RunAllCmd run_all;
  ingest.attach(app);
  tag.attach(app);
  detect.attach(app);
  compare.attach(app);
  context.attach(app);
  sentiment.attach(app);
  stability.attach(app);
  generate.attach(app);
  report.attach(app);
  eval.attach(app);
  run_all.attach(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const StageError& e) {
    std::fprintf(stderr, "aavekit: %s\n", e.what());
    return kExitFailure;
  } catch (const PartialFailure&) {
    return kExitPartial;  // failed items were already listed
  } catch (const std::exception& e) {
    const auto* cmd = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front();
    std::fprintf(stderr, "aavekit: %s: %s\n", cmd ? cmd->get_name().c_str() : "error", e.what());
    return kExitFailure;
  }
  return EXIT_SUCCESS;
}
