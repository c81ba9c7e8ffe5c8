#include "aave/pipeline.hpp"

#include <atomic>
#include <exception>
#include <functional>
#include <set>
#include <thread>

#include "aave/detectors.hpp"
#include "aave/error.hpp"
#include "aave/stats.hpp"

#ifndef AAVEKIT_VERSION
#define AAVEKIT_VERSION "0.0.0"
#endif

namespace aave {

namespace {

// Runs fn(0..n-1) on up to `threads` workers. The first failure by index is
// rethrown, so the reported error does not depend on scheduling either.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  const auto workers = std::min(threads, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (auto i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

template <typename F>
auto in_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

}  // namespace

Resources Resources::from_config(const Config& config) {
  Resources r{config.lexicon.empty() ? Lexicon::builtin() : Lexicon::load(config.resolve(config.lexicon)),
              config.sentiment_lexicon.empty() ? SentimentLexicon::builtin()
                                               : SentimentLexicon::load(config.resolve(config.sentiment_lexicon))};
  return r;
}

Provenance make_provenance(const Config& config, std::vector<std::string> corpus_names) {
  return {AAVEKIT_VERSION, std::move(corpus_names), config.seed, config.hash(), config.effective()};
}

void ensure_tagged(Corpus& corpus, const Lexicon& lexicon) {
  if (corpus.tagged) return;
  tag_corpus(corpus, LexiconTagger(lexicon));
}

ReportBundle analyze(const Config& config, const Resources& res, Corpus human, std::vector<Corpus> models) {
  in_stage("compare", [&] {
    config.validate();
    std::set<std::string> names{human.name};
    for (const auto& m : models) {
      if (!names.insert(m.name).second) throw ArgumentError("duplicate corpus name '" + m.name + "'");
    }
    if (models.empty()) throw ArgumentError("no model corpus given");
  });

  // corpus 0 is the human one throughout
  std::vector<Corpus*> all{&human};
  for (auto& m : models) all.push_back(&m);
  const auto threads = config.threads;

  in_stage("tag", [&] { parallel_for(all.size(), threads, [&](std::size_t i) { ensure_tagged(*all[i], res.lexicon); }); });

  std::vector<std::vector<FeatureHit>> hits(all.size());
  in_stage("detect", [&] {
    for (const auto* c : all) {
      if (c->sentences.empty()) throw StageError("detect", "empty corpus '" + c->name + "'");
    }
    parallel_for(all.size(), threads, [&](std::size_t i) { hits[i] = detect_all(*all[i], res.lexicon); });
  });

  ReportBundle b;
  std::vector<std::string> names;
  for (const auto* c : all) names.push_back(c->name);
  b.provenance = make_provenance(config, names);

  in_stage("compare", [&] {
    b.human_density = compute_densities(hits[0], human, config.denominator);
    for (std::size_t i = 1; i < all.size(); ++i) {
      b.model_densities.push_back(compute_densities(hits[i], *all[i], config.denominator));
      auto rs = compare_corpora(b.human_density, b.model_densities.back(), config.alpha);
      b.comparisons.insert(b.comparisons.end(), rs.begin(), rs.end());
    }
  });

  in_stage("context", [&] {
    const LabeledCorpus h{&human, &hits[0]};
    std::vector<LabeledCorpus> ms;
    for (std::size_t i = 1; i < all.size(); ++i) ms.push_back({all[i], &hits[i]});
    for (auto f : kAllFeatures) {
      if (!supports_context(f)) continue;
      const auto subjects = top_human_contexts(hits[0], f, config.context_top_k);
      b.contexts.push_back(contextual_compare(f, subjects, h, ms, config.alpha, res.lexicon));
    }
  });

  in_stage("sentiment", [&] {
    b.sentiment.resize(all.size());
    parallel_for(all.size(), threads, [&](std::size_t i) {
      b.sentiment[i] = summarize(*all[i], res.sentiment);
      b.sentiment[i].scores.clear();
    });
  });

  if (config.stability_enabled) {
    in_stage("stability", [&] {
      if (human.sentences.size() < config.stability_size) {
        throw ArgumentError("corpus '" + human.name + "' has " + std::to_string(human.sentences.size()) +
                            " sentences, fewer than stability.size = " + std::to_string(config.stability_size) +
                            " (lower it or set stability.enabled = false)");
      }
      b.stability = stability_analysis(human, hits[0], config.stability_n, config.stability_size, config.seed,
                                       config.stability_denominator);
    });
  }
  return b;
}

ReportBundle run_pipeline(const Config& config, const CorpusInput& human, const std::vector<CorpusInput>& models) {
  LoadOptions opts;
  opts.annotation_patterns = config.annotation_patterns;
  opts.exclude_speakers = config.exclude_speakers;

  auto load = [&](const CorpusInput& in, Origin origin) {
    return in_stage("ingest", [&] {
      if (in.paths.empty()) throw ArgumentError("no input files for corpus '" + in.name + "'");
      auto o = opts;
      if (origin == Origin::model) o.model_name = in.name;
      return load_corpus(in.paths, in.format, origin, in.name, o);
    });
  };

  const auto res = in_stage("ingest", [&] { return Resources::from_config(config); });
  auto h = load(human, Origin::human);
  std::vector<Corpus> ms;
  for (const auto& m : models) ms.push_back(load(m, Origin::model));
  return analyze(config, res, std::move(h), std::move(ms));
}

}  // namespace aave
