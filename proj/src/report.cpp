#include "aave/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "aave/error.hpp"
#include "aave/io.hpp"

namespace aave {

using nlohmann::json;

namespace {

constexpr const char* kSchema = "aavekit-report";
constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// JSON

template <typename T>
T get(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("report bundle: missing '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("report bundle: bad value for '") + key + "'");
  }
}

const json& sub(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("report bundle: missing '") + key + "'");
  return j.at(key);
}

json to_json(const DensityTable& t) {
  json features = json::object();
  for (auto f : kAllFeatures) {
    const auto& e = t.at(f);
    features[std::string(feature_name(f))] = {
        {"hit_sentences", e.hit_sentences}, {"total", e.total}, {"density", e.density}};
  }
  return {{"corpus", t.corpus_name}, {"denominator", to_string(t.denominator)}, {"features", features}};
}

DensityTable density_from_json(const json& j) {
  DensityTable t;
  t.corpus_name = get<std::string>(j, "corpus");
  t.denominator = parse_denominator(get<std::string>(j, "denominator"));
  const auto& features = sub(j, "features");
  for (auto f : kAllFeatures) {
    const auto& e = sub(features, std::string(feature_name(f)).c_str());
    auto& out = t.entries[feature_index(f)];
    out.hit_sentences = get<std::size_t>(e, "hit_sentences");
    out.total = get<std::size_t>(e, "total");
    out.density = get<double>(e, "density");
  }
  return t;
}

json to_json(const ComparisonResult& r) {
  return {{"feature", std::string(feature_name(r.feature))},
          {"context", r.context ? json(*r.context) : json(nullptr)},
          {"model", r.model_name},
          {"k_human", r.k_human},
          {"n_human", r.n_human},
          {"k_model", r.k_model},
          {"n_model", r.n_model},
          {"p_human", r.p_human},
          {"p_model", r.p_model},
          {"delta", r.delta},
          {"test", to_string(r.test)},
          {"statistic", r.statistic},
          {"p_value", r.p_value},
          {"ci95", {r.ci95.first, r.ci95.second}},
          {"significant", r.significant},
          {"absent", r.absent}};
}

ComparisonResult comparison_from_json(const json& j) {
  ComparisonResult r;
  r.feature = parse_feature(get<std::string>(j, "feature"));
  if (!sub(j, "context").is_null()) r.context = get<std::string>(j, "context");
  r.model_name = get<std::string>(j, "model");
  r.k_human = get<std::uint64_t>(j, "k_human");
  r.n_human = get<std::uint64_t>(j, "n_human");
  r.k_model = get<std::uint64_t>(j, "k_model");
  r.n_model = get<std::uint64_t>(j, "n_model");
  r.p_human = get<double>(j, "p_human");
  r.p_model = get<double>(j, "p_model");
  r.delta = get<double>(j, "delta");
  r.test = parse_test_kind(get<std::string>(j, "test"));
  r.statistic = get<double>(j, "statistic");
  r.p_value = get<double>(j, "p_value");
  const auto ci = get<std::vector<double>>(j, "ci95");
  if (ci.size() != 2) throw ParseError("report bundle: ci95 needs two values");
  r.ci95 = {ci[0], ci[1]};
  r.significant = get<bool>(j, "significant");
  r.absent = get<bool>(j, "absent");
  return r;
}

json to_json(const ContextTable& t) {
  json rows = json::array();
  for (const auto& row : t.contexts) {
    json models = json::array();
    for (const auto& m : row.models) models.push_back(to_json(m));
    rows.push_back({{"subject", row.subject},
                    {"human_hits", row.human_hits},
                    {"human_subject_sentences", row.human_subject_sentences},
                    {"human_rate", row.human_rate},
                    {"models", models}});
  }
  return {{"feature", std::string(feature_name(t.feature))}, {"models", t.model_names}, {"contexts", rows}};
}

ContextTable context_from_json(const json& j) {
  ContextTable t;
  t.feature = parse_feature(get<std::string>(j, "feature"));
  t.model_names = get<std::vector<std::string>>(j, "models");
  for (const auto& row : sub(j, "contexts")) {
    ContextRow r;
    r.subject = get<std::string>(row, "subject");
    r.human_hits = get<std::uint64_t>(row, "human_hits");
    r.human_subject_sentences = get<std::uint64_t>(row, "human_subject_sentences");
    r.human_rate = get<double>(row, "human_rate");
    for (const auto& m : sub(row, "models")) r.models.push_back(comparison_from_json(m));
    t.contexts.push_back(std::move(r));
  }
  return t;
}

json to_json(const SentimentSummary& s) {
  return {{"corpus", s.corpus_name},
          {"n_sentences", s.n_sentences},
          {"mean_compound", s.mean_compound},
          {"proportions",
           {{"negative", s.proportion(SentimentCategory::negative)},
            {"neutral", s.proportion(SentimentCategory::neutral)},
            {"positive", s.proportion(SentimentCategory::positive)}}}};
}

SentimentSummary sentiment_from_json(const json& j) {
  SentimentSummary s;
  s.corpus_name = get<std::string>(j, "corpus");
  s.n_sentences = get<std::size_t>(j, "n_sentences");
  s.mean_compound = get<double>(j, "mean_compound");
  const auto& p = sub(j, "proportions");
  for (auto c : {SentimentCategory::negative, SentimentCategory::neutral, SentimentCategory::positive}) {
    s.proportions[static_cast<std::size_t>(c)] = get<double>(p, std::string(to_string(c)).c_str());
  }
  return s;
}

json to_json(const StabilityReport& r) {
  json features = json::object();
  for (auto f : kAllFeatures) {
    const auto i = feature_index(f);
    features[std::string(feature_name(f))] = {
        {"densities", r.densities[i]}, {"mean", r.mean[i]}, {"relative_spread", r.relative_spread[i]}};
  }
  return {{"corpus", r.corpus_name},
          {"denominator", to_string(r.denominator)},
          {"size", r.size},
          {"seed", r.seed},
          {"features", features}};
}

StabilityReport stability_from_json(const json& j) {
  StabilityReport r;
  r.corpus_name = get<std::string>(j, "corpus");
  r.denominator = parse_denominator(get<std::string>(j, "denominator"));
  r.size = get<std::size_t>(j, "size");
  r.seed = get<std::uint64_t>(j, "seed");
  const auto& features = sub(j, "features");
  for (auto f : kAllFeatures) {
    const auto i = feature_index(f);
    const auto& e = sub(features, std::string(feature_name(f)).c_str());
    r.densities[i] = get<std::vector<double>>(e, "densities");
    r.mean[i] = get<double>(e, "mean");
    r.relative_spread[i] = get<double>(e, "relative_spread");
  }
  return r;
}

json to_json(const Provenance& p) {
  return {{"tool_version", p.tool_version},
          {"corpora", p.corpus_names},
          {"seed", p.seed},
          {"config_hash", p.config_hash},
          {"config", p.config}};
}

Provenance provenance_from_json(const json& j) {
  Provenance p;
  p.tool_version = get<std::string>(j, "tool_version");
  p.corpus_names = get<std::vector<std::string>>(j, "corpora");
  p.seed = get<std::uint64_t>(j, "seed");
  p.config_hash = get<std::string>(j, "config_hash");
  p.config = get<std::map<std::string, std::string>>(j, "config");
  return p;
}

// ---------------------------------------------------------------------------
// Text helpers

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string provenance_line(const Provenance& p) {
  return "aavekit " + p.tool_version + "; corpora: " + join(p.corpus_names, ", ") +
         "; seed: " + std::to_string(p.seed) + "; config: " + p.config_hash;
}

std::string header_comment(const ReportBundle& b, ReportFormat f) {
  const auto line = provenance_line(b.provenance);
  return f == ReportFormat::md ? "<!-- " + line + " -->\n\n" : "# " + line + "\n";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string md_cell(std::string s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

std::string md_row(const std::vector<std::string>& cells) {
  std::string out = "|";
  for (const auto& c : cells) out += " " + c + " |";
  return out + "\n";
}

std::string md_rule(std::size_t n) {
  std::string out = "|---|";
  for (std::size_t i = 1; i < n; ++i) out += "---:|";
  return out + "\n";
}

std::string denominator_label(Denominator d) {
  switch (d) {
    case Denominator::per_10k_sentences: return "per 10,000 sentences";
    case Denominator::per_100_sentences: return "per 100 sentences";
    case Denominator::per_100_words: return "per 100 words";
  }
  return "";
}

const ComparisonResult& find_result(const ReportBundle& b, const std::string& model, FeatureKind f) {
  for (const auto& r : b.comparisons) {
    if (r.model_name == model && r.feature == f && !r.context) return r;
  }
  throw ArgumentError("no comparison for model '" + model + "', feature " + std::string(feature_name(f)));
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string bold_if(const std::string& s, bool significant) { return significant ? "**" + s + "**" : s; }

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(ReportFormat f) {
  switch (f) {
    case ReportFormat::md: return "md";
    case ReportFormat::csv: return "csv";
    case ReportFormat::json: return "json";
  }
  return "md";
}

ReportFormat parse_report_format(std::string_view s) {
  if (s == "md" || s == "markdown") return ReportFormat::md;
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  throw ArgumentError("unknown report format '" + std::string(s) + "' (expected md, csv or json)");
}

std::string format_full(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

std::string format_display(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

std::string bundle_to_json(const ReportBundle& b) {
  json models = json::array();
  for (const auto& t : b.model_densities) models.push_back(to_json(t));
  json comparisons = json::array();
  for (const auto& r : b.comparisons) comparisons.push_back(to_json(r));
  json contexts = json::array();
  for (const auto& c : b.contexts) contexts.push_back(to_json(c));
  json sentiment = json::array();
  for (const auto& s : b.sentiment) sentiment.push_back(to_json(s));
  json out = {{"schema", kSchema},
              {"version", kSchemaVersion},
              {"provenance", to_json(b.provenance)},
              {"densities", {{"human", to_json(b.human_density)}, {"models", models}}},
              {"comparisons", comparisons},
              {"contexts", contexts},
              {"sentiment", sentiment},
              {"stability", b.stability ? to_json(*b.stability) : json(nullptr)}};
  return dump(out);
}

ReportBundle bundle_from_json(std::string_view text) {
  const auto j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("report bundle is not valid JSON");
  if (!j.is_object() || j.value("schema", "") != kSchema) throw ParseError("not an aavekit report bundle");
  if (get<int>(j, "version") != kSchemaVersion) throw ParseError("unsupported report bundle version");
  ReportBundle b;
  b.provenance = provenance_from_json(sub(j, "provenance"));
  const auto& d = sub(j, "densities");
  b.human_density = density_from_json(sub(d, "human"));
  for (const auto& m : sub(d, "models")) b.model_densities.push_back(density_from_json(m));
  for (const auto& r : sub(j, "comparisons")) b.comparisons.push_back(comparison_from_json(r));
  for (const auto& c : sub(j, "contexts")) b.contexts.push_back(context_from_json(c));
  for (const auto& s : sub(j, "sentiment")) b.sentiment.push_back(sentiment_from_json(s));
  if (!sub(j, "stability").is_null()) b.stability = stability_from_json(j.at("stability"));
  return b;
}

ReportBundle read_bundle(const std::filesystem::path& path) { return bundle_from_json(read_text_file(path)); }

void write_bundle(const ReportBundle& bundle, const std::filesystem::path& path) {
  write_file_atomic(path, bundle_to_json(bundle));
}

// ---------------------------------------------------------------------------

std::string render_feature_table(const ReportBundle& b, ReportFormat format) {
  const auto& human = b.human_density;
  std::vector<std::string> models;
  for (const auto& m : b.model_densities) models.push_back(m.corpus_name);

  if (format == ReportFormat::json) {
    json rows = json::array();
    for (auto f : kAllFeatures) {
      json per_model = json::array();
      for (std::size_t i = 0; i < models.size(); ++i) {
        const auto& r = find_result(b, models[i], f);
        per_model.push_back({{"model", models[i]},
                             {"density", b.model_densities[i].at(f).density},
                             {"delta", r.delta},
                             {"p_value", r.p_value},
                             {"test", to_string(r.test)},
                             {"ci95", {r.ci95.first, r.ci95.second}},
                             {"significant", r.significant}});
      }
      rows.push_back({{"feature", std::string(feature_name(f))},
                      {"human_density", human.at(f).density},
                      {"models", per_model}});
    }
    return dump({{"provenance", to_json(b.provenance)},
                 {"denominator", to_string(human.denominator)},
                 {"human", human.corpus_name},
                 {"features", rows}});
  }

  std::string out = header_comment(b, format);
  if (format == ReportFormat::csv) {
    out += "feature,human_corpus,human_density,model,model_density,delta,p_value,test,ci95_lo,ci95_hi,significant\n";
    for (auto f : kAllFeatures) {
      for (std::size_t i = 0; i < models.size(); ++i) {
        const auto& r = find_result(b, models[i], f);
        out += std::string(feature_name(f)) + "," + csv_field(human.corpus_name) + "," +
               format_full(human.at(f).density) + "," + csv_field(models[i]) + "," +
               format_full(b.model_densities[i].at(f).density) + "," + format_full(r.delta) + "," +
               format_full(r.p_value) + "," + to_string(r.test) + "," + format_full(r.ci95.first) + "," +
               format_full(r.ci95.second) + "," + (r.significant ? "1" : "0") + "\n";
      }
    }
    return out;
  }

  out += "## Feature densities (" + denominator_label(human.denominator) + ")\n\n";
  std::vector<std::string> head = {"Feature", "Human (" + md_cell(human.corpus_name) + ")"};
  for (const auto& m : models) {
    head.push_back(md_cell(m));
    head.push_back("Δ " + md_cell(m));
  }
  out += md_row(head) + md_rule(head.size());
  for (auto f : kAllFeatures) {
    std::vector<std::string> row = {std::string(feature_label(f)), format_display(human.at(f).density)};
    for (std::size_t i = 0; i < models.size(); ++i) {
      const auto& r = find_result(b, models[i], f);
      row.push_back(format_display(b.model_densities[i].at(f).density));
      row.push_back(bold_if(format_display(r.delta), r.significant));
    }
    out += md_row(row);
  }
  out += "\nBold Δ: p < " + (b.provenance.config.count("alpha") ? b.provenance.config.at("alpha") : "0.05") +
         " (chi-square with 1 df; Fisher exact when an expected cell is below 5). Δ = model minus human.\n";
  return out;
}

std::string render_context_table(const ReportBundle& b, const ContextTable& t, ReportFormat format) {
  if (format == ReportFormat::json) return dump({{"provenance", to_json(b.provenance)}, {"table", to_json(t)}});
  std::string out;
  if (format == ReportFormat::csv) {
    out += "feature,subject,human_hits,human_subject_sentences,human_rate,model,model_hits,model_subject_sentences,"
           "model_rate,delta,p_value,test,significant,absent\n";
    for (const auto& row : t.contexts) {
      for (const auto& m : row.models) {
        out += std::string(feature_name(t.feature)) + "," + csv_field(row.subject) + "," +
               std::to_string(row.human_hits) + "," + std::to_string(row.human_subject_sentences) + "," +
               format_full(row.human_rate) + "," + csv_field(m.model_name) + ",";
        if (m.absent) {
          out += "0,0,,,,,0,1\n";
        } else {
          out += std::to_string(m.k_model) + "," + std::to_string(m.n_model) + "," + format_full(m.p_model) + "," +
                 format_full(m.delta) + "," + format_full(m.p_value) + "," + to_string(m.test) + "," +
                 (m.significant ? "1" : "0") + ",0\n";
        }
      }
    }
    return out;
  }
  out += "### " + std::string(feature_label(t.feature)) + "\n\n";
  std::vector<std::string> head = {"Subject", "Human"};
  for (const auto& m : t.model_names) {
    head.push_back(md_cell(m));
    head.push_back("Δ " + md_cell(m));
  }
  out += md_row(head) + md_rule(head.size());
  for (const auto& row : t.contexts) {
    std::vector<std::string> cells = {md_cell(row.subject), format_display(row.human_rate)};
    for (const auto& m : row.models) {
      if (m.absent) {
        cells.push_back("--");
        cells.push_back("--");
      } else {
        cells.push_back(format_display(m.p_model));
        cells.push_back(bold_if(format_display(m.delta), m.significant));
      }
    }
    out += md_row(cells);
  }
  return out;
}

std::string render_sentiment(const ReportBundle& b, ReportFormat format) {
  if (format == ReportFormat::json) {
    json rows = json::array();
    for (const auto& s : b.sentiment) rows.push_back(to_json(s));
    return dump({{"provenance", to_json(b.provenance)}, {"sentiment", rows}});
  }
  std::string out = header_comment(b, format);
  if (format == ReportFormat::csv) {
    out += "corpus,n_sentences,mean_compound,negative,neutral,positive\n";
    for (const auto& s : b.sentiment) {
      out += csv_field(s.corpus_name) + "," + std::to_string(s.n_sentences) + "," + format_full(s.mean_compound) +
             "," + format_full(s.proportion(SentimentCategory::negative)) + "," +
             format_full(s.proportion(SentimentCategory::neutral)) + "," +
             format_full(s.proportion(SentimentCategory::positive)) + "\n";
    }
    return out;
  }
  out += "## Sentence sentiment\n\n";
  out += md_row({"Corpus", "Sentences", "Mean compound", "Negative", "Neutral", "Positive"}) + md_rule(6);
  for (const auto& s : b.sentiment) {
    out += md_row({md_cell(s.corpus_name), std::to_string(s.n_sentences), format_display(s.mean_compound),
                   format_display(s.proportion(SentimentCategory::negative)),
                   format_display(s.proportion(SentimentCategory::neutral)),
                   format_display(s.proportion(SentimentCategory::positive))});
  }
  out += "\nNegative: x < -0.5; neutral: -0.5 <= x <= 0.5; positive: x > 0.5.\n";
  return out;
}

std::string render_stability(const ReportBundle& b, ReportFormat format) {
  if (!b.stability) throw ArgumentError("bundle has no stability analysis");
  const auto& r = *b.stability;
  if (format == ReportFormat::json) return dump({{"provenance", to_json(b.provenance)}, {"stability", to_json(r)}});
  std::string out = header_comment(b, format);
  const std::size_t n = r.densities[0].size();
  if (format == ReportFormat::csv) {
    out += "feature,subsample,density\n";
    for (auto f : kAllFeatures) {
      for (std::size_t i = 0; i < n; ++i) {
        out += std::string(feature_name(f)) + ",V" + std::to_string(i + 1) + "," +
               format_full(r.densities[feature_index(f)][i]) + "\n";
      }
    }
    return out;
  }
  out += "## Subsample stability (" + md_cell(r.corpus_name) + ", " + std::to_string(n) + " x " +
         std::to_string(r.size) + " sentences, " + denominator_label(r.denominator) + ")\n\n";
  std::vector<std::string> head = {"Feature"};
  for (std::size_t i = 0; i < n; ++i) head.push_back("V" + std::to_string(i + 1));
  head.push_back("Mean");
  head.push_back("Rel. spread");
  out += md_row(head) + md_rule(head.size());
  for (auto f : kAllFeatures) {
    const auto i = feature_index(f);
    std::vector<std::string> row = {std::string(feature_label(f))};
    for (double d : r.densities[i]) row.push_back(format_display(d));
    row.push_back(format_display(r.mean[i]));
    row.push_back(format_display(r.relative_spread[i]));
    out += md_row(row);
  }
  return out;
}

std::map<std::string, std::string> emit_plot_data(const ReportBundle& b) {
  const auto head = header_comment(b, ReportFormat::csv);
  std::string densities = head + "corpus,feature,density\n";
  auto add = [&](const DensityTable& t) {
    for (auto f : kAllFeatures) {
      densities += csv_field(t.corpus_name) + "," + std::string(feature_name(f)) + "," + format_full(t.at(f).density) +
                   "\n";
    }
  };
  add(b.human_density);
  for (const auto& m : b.model_densities) add(m);

  std::string deltas = head + "model,feature,delta,ci95_lo,ci95_hi,significant\n";
  for (const auto& r : b.comparisons) {
    if (r.context) continue;
    deltas += csv_field(r.model_name) + "," + std::string(feature_name(r.feature)) + "," + format_full(r.delta) + "," +
              format_full(r.ci95.first) + "," + format_full(r.ci95.second) + "," + (r.significant ? "1" : "0") + "\n";
  }
  return {{"densities.csv", densities}, {"deltas.csv", deltas}};
}

std::vector<std::string> write_report(const ReportBundle& b, ReportFormat format, const std::filesystem::path& out_dir) {
  const std::string ext = "." + std::string(to_string(format));
  std::map<std::string, std::string> files = emit_plot_data(b);
  files["features" + ext] = render_feature_table(b, format);

  if (format == ReportFormat::json) {
    json tables = json::array();
    for (const auto& t : b.contexts) tables.push_back(to_json(t));
    files["contexts.json"] = dump({{"provenance", to_json(b.provenance)}, {"tables", tables}});
  } else {
    std::string ctx = header_comment(b, format);
    if (format == ReportFormat::md) ctx += "## Contextual rates (share of sentences with subject s in which the feature fires with s)\n\n";
    for (std::size_t i = 0; i < b.contexts.size(); ++i) {
      if (format == ReportFormat::csv && i > 0) {
        const auto body = render_context_table(b, b.contexts[i], format);
        ctx += body.substr(body.find('\n') + 1);
      } else {
        ctx += render_context_table(b, b.contexts[i], format);
      }
      if (format == ReportFormat::md) ctx += "\n";
    }
    if (format == ReportFormat::md) ctx += "--: the model corpus has no sentence with that subject.\n";
    files["contexts" + ext] = ctx;
  }
  files["sentiment" + ext] = render_sentiment(b, format);
  if (b.stability) files["stability" + ext] = render_stability(b, format);

  std::vector<std::string> names;
  for (const auto& [name, content] : files) {
    write_file_atomic(out_dir / name, content);
    names.push_back(name);
  }
  return names;
}

}  // namespace aave
