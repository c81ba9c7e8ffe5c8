#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aave/sentiment.hpp"
#include "aave/stats.hpp"

namespace aave {

struct Provenance {
  std::string tool_version;
  std::vector<std::string> corpus_names;  // human first
  std::uint64_t seed = 0;
  std::string config_hash;
  std::map<std::string, std::string> config;  // effective configuration
};

struct ReportBundle {
  Provenance provenance;
  DensityTable human_density;
  std::vector<DensityTable> model_densities;
  std::vector<ComparisonResult> comparisons;  // model by model, features in order
  std::vector<ContextTable> contexts;
  std::vector<SentimentSummary> sentiment;  // per-sentence scores are not kept
  std::optional<StabilityReport> stability;
};

enum class ReportFormat { md, csv, json };

std::string_view to_string(ReportFormat f);
ReportFormat parse_report_format(std::string_view s);

/// Shortest text that reads back as the same double.
std::string format_full(double x);
/// Three decimals, with "-0.000" printed as "0.000".
std::string format_display(double x);

std::string bundle_to_json(const ReportBundle& bundle);
ReportBundle bundle_from_json(std::string_view text);
ReportBundle read_bundle(const std::filesystem::path& path);
void write_bundle(const ReportBundle& bundle, const std::filesystem::path& path);

/// Rows are features; columns are the human density, then density and delta
/// for each model. Significant deltas are bold in Markdown and flagged in CSV
/// and JSON.
std::string render_feature_table(const ReportBundle& bundle, ReportFormat format);

/// Absent model cells print as "--".
std::string render_context_table(const ReportBundle& bundle, const ContextTable& table, ReportFormat format);

std::string render_sentiment(const ReportBundle& bundle, ReportFormat format);

std::string render_stability(const ReportBundle& bundle, ReportFormat format);

/// Long-format plot data: "densities.csv" (corpus, feature, density) and
/// "deltas.csv" (model, feature, delta, ci_lo, ci_hi, significant).
std::map<std::string, std::string> emit_plot_data(const ReportBundle& bundle);

/// Writes every table in `format` plus the plot data under `out_dir`;
/// returns the file names written, sorted.
std::vector<std::string> write_report(const ReportBundle& bundle, ReportFormat format,
                                      const std::filesystem::path& out_dir);

}  // namespace aave
