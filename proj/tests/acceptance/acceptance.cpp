// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
// Every expected value below comes from an independent route (exact integer
// enumeration, planted counts, published reference values, a frozen golden
// file), never from the code under test.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "aave/corpus.hpp"
#include "aave/detectors.hpp"
#include "aave/generator.hpp"
#include "aave/io.hpp"
#include "aave/report.hpp"
#include "aave/rng.hpp"
#include "aave/sentiment.hpp"
#include "aave/stats.hpp"
#include "aave/tagger.hpp"
#include "mock_server.hpp"

namespace fs = std::filesystem;
using namespace aave;

namespace {

const fs::path kData = AAVEKIT_DATA_DIR;
const fs::path kTestData = AAVEKIT_TEST_DATA_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

Corpus corpus_of(const std::vector<std::string>& sentences, const std::string& name = "c") {
  std::vector<RawDocument> docs;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    RawDocument d;
    d.id = "d" + std::to_string(i);
    d.text = sentences[i];
    docs.push_back(std::move(d));
  }
  auto c = build_corpus(docs, Origin::human, name);
  tag_corpus(c, LexiconTagger());
  return c;
}

std::set<FeatureKind> features_in(const std::string& sentence) {
  const auto c = corpus_of({sentence});
  std::set<FeatureKind> out;
  for (const auto& s : c.sentences) {
    for (const auto& h : detect_sentence(s)) out.insert(h.feature);
  }
  return out;
}

// ---------------------------------------------------------------------------

Outcome table2() {
  const std::vector<std::tuple<FeatureKind, std::string, std::string>> rows = {
      {FeatureKind::Aint, "I ain't doing all that.", "I am not doing all of that."},
      {FeatureKind::HabitualBe, "He be doing too much.", "He is always doing too much."},
      {FeatureKind::NegativeConcord, "I don't never have no problems.", "I don't ever have any problems."},
      {FeatureKind::DoubleComparative, "I am more happier when I'm alone.", "I am happier when I'm alone."},
      {FeatureKind::PerfectiveDone, "I done lost my wallet.", "I have lost my wallet."},
      {FeatureKind::MultipleModals, "We might can go up there next Saturday.",
       "We might be able to go up there next Saturday."},
      {FeatureKind::NullCopula, "Your mama a weight-lifter.", "Your mama is a weight-lifter."},
  };
  int ok = 0;
  std::string bad;
  for (const auto& [f, aave, sae] : rows) {
    if (features_in(aave) == std::set<FeatureKind>{f}) ++ok; else bad += " '" + aave + "'";
    if (features_in(sae).empty()) ++ok; else bad += " '" + sae + "'";
  }
  return {ok == 14, std::to_string(ok) + "/14 assertions" + (bad.empty() ? "" : ", wrong:" + bad)};
}

Outcome golden_accuracy() {
  auto c = load_corpus({kData / "golden" / "golden.jsonl"}, InputFormat::jsonl, Origin::human, "golden");
  tag_corpus(c, LexiconTagger());
  const auto ev = evaluate_against_gold(detect_all(c), read_gold_tsv(kData / "golden" / "gold.tsv"));
  double worst = 1.0;
  std::string per;
  char buf[64];
  bool complete = true;
  for (const auto& a : ev.per_feature) {
    worst = std::min(worst, a.accuracy());
    complete = complete && a.total() == c.sentences.size();
    std::snprintf(buf, sizeof buf, " %s=%.4f", std::string(feature_name(a.feature)).c_str(), a.accuracy());
    per += buf;
  }
  return {worst >= 0.96 && complete && c.sentences.size() >= 450,
          std::to_string(c.sentences.size()) + " sentences;" + per};
}

// Exact two-sided Fisher p by integer enumeration: every table with the same
// margins whose hypergeometric numerator does not exceed the observed one.
using u128 = unsigned __int128;

struct Pascal {
  std::vector<std::vector<u128>> c;
  explicit Pascal(int n) : c(n + 1, std::vector<u128>(n + 1, 0)) {
    for (int i = 0; i <= n; ++i) {
      c[i][0] = 1;
      for (int j = 1; j <= i; ++j) c[i][j] = c[i - 1][j - 1] + (j <= i - 1 ? c[i - 1][j] : 0);
    }
  }
};

long double fisher_oracle(const Pascal& p, int k1, int n1, int k2, int n2) {
  const int hits = k1 + k2;
  auto numer = [&](int a) { return p.c[n1][a] * p.c[n2][hits - a]; };
  const u128 observed = numer(k1);
  u128 sum = 0;
  for (int a = std::max(0, hits - n2); a <= std::min(hits, n1); ++a) {
    if (numer(a) <= observed) sum += numer(a);
  }
  return static_cast<long double>(sum) / static_cast<long double>(p.c[n1 + n2][hits]);
}

Outcome statistics_oracles() {
  const Pascal pascal(60);
  std::size_t tables = 0;
  double worst = 0.0;
  for (int total = 2; total <= 60; ++total) {
    for (int n1 = 1; n1 < total; ++n1) {
      const int n2 = total - n1;
      for (int k1 = 0; k1 <= n1; ++k1) {
        for (int k2 = 0; k2 <= n2; ++k2) {
          const double got = fisher_exact_test(k1, n1, k2, n2).p_value;
          const double want = static_cast<double>(fisher_oracle(pascal, k1, n1, k2, n2));
          worst = std::max(worst, std::fabs(got - want));
          ++tables;
        }
      }
    }
  }
  const auto chi = two_proportion_test(10, 100, 20, 100);
  const bool chi_ok = chi.test == TestKind::chi_square_1df && std::fabs(chi.statistic - 3.9216) <= 1e-3 &&
                      std::fabs(chi.p_value - 0.0477) <= 1e-3;
  char buf[200];
  std::snprintf(buf, sizeof buf, "%zu Fisher tables, max |dp| = %.2e; chi2(10/100 vs 20/100) = %.4f, p = %.4f",
                tables, worst, chi.statistic, chi.p_value);
  return {worst <= 1e-9 && chi_ok, buf};
}

std::uint64_t binomial_draw(std::mt19937_64& rng, std::uint64_t n, double p) {
  std::uint64_t k = 0;
  for (std::uint64_t i = 0; i < n; ++i) k += uniform_unit(rng) < p;
  return k;
}

Outcome intervals() {
  const auto w = wilson_interval(5, 10);
  const bool wilson_ok = std::fabs(w.first - 0.2366) <= 1e-4 && std::fabs(w.second - 0.7634) <= 1e-4;

  const double p1 = 0.3, p2 = 0.45;
  const std::uint64_t n1 = 40, n2 = 50;
  std::mt19937_64 rng(20240611);
  const int sims = 10000;
  int covered = 0;
  for (int i = 0; i < sims; ++i) {
    const auto ci = newcombe_interval(binomial_draw(rng, n1, p1), n1, binomial_draw(rng, n2, p2), n2);
    covered += ci.first <= p1 - p2 && p1 - p2 <= ci.second;
  }
  const double coverage = static_cast<double>(covered) / sims;
  char buf[160];
  std::snprintf(buf, sizeof buf, "Wilson(5,10) = (%.4f, %.4f); Newcombe coverage %.4f over %d simulations", w.first,
                w.second, coverage, sims);
  return {wilson_ok && coverage >= 0.93 && coverage <= 0.97, buf};
}

Outcome densities() {
  // 1 in 5 sentences carries ain't; nothing else fires
  std::vector<std::string> text;
  for (int i = 0; i < 1000; ++i) text.push_back(i % 5 == 0 ? "He ain't here." : "He is here.");
  const auto c = corpus_of(text, "planted");
  const auto hits = detect_all(c);
  const auto t10k = compute_densities(hits, c, Denominator::per_10k_sentences);
  const auto t100 = compute_densities(hits, c, Denominator::per_100_sentences);
  bool exact = t10k.at(FeatureKind::Aint).density == 2000.0 && t100.at(FeatureKind::Aint).density == 20.0;
  for (auto f : kAllFeatures) {
    if (f != FeatureKind::Aint) exact = exact && t10k.at(f).density == 0.0;
  }

  // 5% habitual be, planted every 20th sentence of 40,000
  std::vector<std::string> big;
  for (int i = 0; i < 40000; ++i) big.push_back(i % 20 == 0 ? "They be working late." : "They are working late.");
  const auto bc = corpus_of(big, "five_percent");
  const auto rep = stability_analysis(bc, detect_all(bc), 10, 2000, 7, Denominator::per_100_sentences);
  const double sigma = 100.0 * std::sqrt(0.05 * 0.95 / 2000.0);
  double worst = 0.0;
  for (double d : rep.densities[feature_index(FeatureKind::HabitualBe)]) worst = std::max(worst, std::fabs(d - 5.0));
  const bool stable = rep.densities[feature_index(FeatureKind::HabitualBe)].size() == 10 && worst <= 3 * sigma;
  char buf[200];
  std::snprintf(buf, sizeof buf, "1-in-5 -> %.1f per 10k (%s); 10 x 2000 subsamples of 5%%: max |d - 5| = %.3f <= 3 sigma = %.3f",
                t10k.at(FeatureKind::Aint).density, exact ? "exact" : "NOT exact", worst, 3 * sigma);
  return {exact && stable, buf};
}

Outcome sentiment() {
  bool ok = compound_score("") == 0.0;
  std::string why = ok ? "" : " empty!=0";

  for (const char* w : {"good", "happy", "love", "great", "nice", "bad", "sad", "hate", "terrible", "ugly"}) {
    const double plain = compound_score(w);
    const double negated = compound_score(std::string("not ") + w);
    if (!(plain != 0.0 && plain * negated < 0.0)) {
      ok = false;
      why += std::string(" negation:") + w;
    }
    const double bang = compound_score(std::string(w) + "!");
    const double bangs = compound_score(std::string(w) + "!!");
    if (!(std::fabs(bang) > std::fabs(plain) && std::fabs(bangs) > std::fabs(bang))) {
      ok = false;
      why += std::string(" exclamation:") + w;
    }
  }

  const double good = compound_score("good");
  if (std::fabs(good - 0.4404) > 1e-4) {
    ok = false;
    why += " good";
  }

  // reference implementation values
  std::istringstream ref(read_text_file(kTestData / "vader_reference.tsv"));
  std::size_t rows = 0;
  double worst = 0.0;
  for (std::string line; std::getline(ref, line);) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    worst = std::max(worst, std::fabs(compound_score(line.substr(tab + 1)) - std::stod(line.substr(0, tab))));
    ++rows;
  }
  if (rows == 0 || worst > 1e-4) {
    ok = false;
    why += " reference";
  }

  for (int i = -1000; i <= 1000; ++i) {
    const double x = i / 1000.0;
    const auto c = categorize(x);
    const auto want = x < -0.5 ? SentimentCategory::negative
                      : x > 0.5 ? SentimentCategory::positive
                                : SentimentCategory::neutral;
    if (c != want) {
      ok = false;
      why += " categorize";
      break;
    }
  }
  ok = ok && categorize(0.5) == SentimentCategory::neutral && categorize(-0.5) == SentimentCategory::neutral;

  char buf[160];
  std::snprintf(buf, sizeof buf, "good = %.4f; %zu reference sentences, max |d| = %.1e", good, rows, worst);
  return {ok, buf + (why.empty() ? std::string() : "; failed:" + why)};
}

std::size_t nonblank_lines(const fs::path& p) {
  std::istringstream in(read_text_file(p));
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

Outcome generator() {
  using testing::completion;
  using testing::MockServer;
  setenv("AAVEKIT_ACCEPT_KEY", "k", 1);
  const auto base = fs::temp_directory_path() / "aavekit_acceptance_gen";
  fs::remove_all(base);

  auto job_for = [&](const MockServer& srv, const std::string& dir, std::size_t n) {
    GenerationJob job;
    job.prompt = PromptTemplate::builtin(TemplateKind::twitter_style);
    job.n_generations = n;
    job.model = "mock";
    job.endpoint = srv.url();
    job.out_dir = base / dir;
    job.api_key_env = "AAVEKIT_ACCEPT_KEY";
    job.base_backoff = std::chrono::milliseconds(1);
    job.max_backoff = std::chrono::milliseconds(4);
    job.timeout = std::chrono::seconds(5);
    return job;
  };

  // two server errors, then a reply
  MockServer flaky([](const httplib::Request&, httplib::Response& res, int call) {
    if (call < 2) {
      res.status = 503;
    } else {
      res.set_content(completion("first tweet"), "application/json");
    }
  });
  const auto r1 = run_job(job_for(flaky, "retry", 1), {});
  const auto attempts = nonblank_lines(base / "retry" / "attempts.jsonl");
  const bool retry_ok = r1.documents.size() == 1 && r1.archived == 1 && r1.failures.empty() && attempts == 3;

  MockServer steady([](const httplib::Request&, httplib::Response& res, int call) {
    res.set_content(completion("tweet " + std::to_string(call)), "application/json");
  });
  run_job(job_for(steady, "resume", 2), {});
  const int before = steady.calls();
  const auto r2 = run_job(job_for(steady, "resume", 5), {});
  const bool resume_ok = steady.calls() - before == 3 && r2.skipped == 2 && r2.archived == 3;

  MockServer slow([](const httplib::Request&, httplib::Response& res, int) {
    std::this_thread::sleep_for(std::chrono::milliseconds(40));
    res.set_content(completion("slow"), "application/json");
  });
  auto capped = job_for(slow, "cap", 12);
  capped.max_in_flight = 3;
  const auto r3 = run_job(capped, {});
  const bool cap_ok = slow.peak() <= 3 && r3.archived == 12;

  fs::remove_all(base);
  char buf[200];
  std::snprintf(buf, sizeof buf, "retry: %zu doc, %zu attempts logged; resume: %d new requests; cap 3: peak %d in flight",
                r1.documents.size(), attempts, steady.calls() - before, slow.peak());
  return {retry_ok && resume_ok && cap_ok, buf};
}

// --- criterion 8 -----------------------------------------------------------

std::vector<std::string> cells_of(const std::string& row) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 1; i < row.size(); ++i) {
    if (row[i] == '|' && row[i - 1] != '\\') {
      const auto b = cur.find_first_not_of(' ');
      const auto e = cur.find_last_not_of(' ');
      out.push_back(b == std::string::npos ? "" : cur.substr(b, e - b + 1));
      cur.clear();
    } else {
      cur += row[i];
    }
  }
  return out;
}

bool is_bold(const std::string& cell) { return cell.size() > 4 && cell.rfind("**", 0) == 0 && cell.ends_with("**"); }

// Returns the number of delta cells checked, or -1 on a mismatch.
int check_bolding(const std::string& features_md, const std::string& contexts_md, const ReportBundle& b) {
  int checked = 0;
  std::istringstream in(features_md);
  std::size_t feature_row = 0;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("| ", 0) != 0 || line.rfind("| Feature", 0) == 0) continue;
    const auto cells = cells_of(line);
    for (std::size_t m = 0; m < b.model_densities.size(); ++m) {
      const auto& r = b.comparisons.at(m * kFeatureCount + feature_row);
      if (is_bold(cells.at(3 + 2 * m)) != (r.p_value < 0.05)) return -1;
      ++checked;
    }
    ++feature_row;
  }
  if (feature_row != kFeatureCount) return -1;

  std::istringstream ctx(contexts_md);
  int table = -1;
  std::size_t row = 0;
  for (std::string line; std::getline(ctx, line);) {
    if (line.rfind("### ", 0) == 0) {
      ++table;
      row = 0;
      continue;
    }
    if (line.rfind("| ", 0) != 0 || line.rfind("| Subject", 0) == 0) continue;
    const auto cells = cells_of(line);
    const auto& crow = b.contexts.at(table).contexts.at(row++);
    if (cells.at(0) != crow.subject) return -1;
    for (std::size_t m = 0; m < crow.models.size(); ++m) {
      const auto& r = crow.models[m];
      const auto& cell = cells.at(3 + 2 * m);
      if (r.absent ? cell != "--" : is_bold(cell) != (r.p_value < 0.05)) return -1;
      ++checked;
    }
  }
  return checked;
}

Outcome end_to_end() {
  const auto base = fs::temp_directory_path() / "aavekit_acceptance_e2e";
  fs::remove_all(base);
  const auto fx = kData / "fixtures";
  const std::string args = " run-all --config \"" + (fx / "fixture.conf").string() + "\" --human \"" +
                           (fx / "human" / "interview_01.txt").string() + "\" \"" +
                           (fx / "human" / "interview_02.txt").string() +
                           "\" --human-name coraal_fixture --model model_a=\"" +
                           (fx / "models" / "model_a.jsonl").string() + "\" --model model_b=\"" +
                           (fx / "models" / "model_b.jsonl").string() + "\" --model-format jsonl --format md --out ";
  for (const char* run : {"one", "two"}) {
    const auto cmd = std::string("\"") + AAVEKIT_CLI + "\"" + args + "\"" + (base / run).string() + "\" >/dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, std::string("run-all failed (") + run + ")"};
  }
  const auto one = read_text_file(base / "one" / "bundle.json");
  const bool same = one == read_text_file(base / "two" / "bundle.json") &&
                    read_text_file(base / "one" / "features.md") == read_text_file(base / "two" / "features.md");
  const bool golden = one == read_text_file(fx / "golden_bundle.json");
  const auto bundle = bundle_from_json(one);
  const int checked = check_bolding(read_text_file(base / "one" / "features.md"),
                                    read_text_file(base / "one" / "contexts.md"), bundle);
  int significant = 0;
  for (const auto& r : bundle.comparisons) significant += r.p_value < 0.05;
  fs::remove_all(base);
  char buf[200];
  std::snprintf(buf, sizeof buf, "two runs %s; golden bundle %s; bolding checked on %d delta cells (%d significant features)",
                same ? "byte-identical" : "DIFFER", golden ? "matches" : "DIFFERS", checked, significant);
  return {same && golden && checked > 0, buf};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;  // 0: no bound
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "Table 2 conformance", 1.0, table2},
      {2, "golden-corpus detector accuracy", 5.0, golden_accuracy},
      {3, "statistics oracle equivalence", 30.0, statistics_oracles},
      {4, "Wilson/Newcombe intervals", 60.0, intervals},
      {5, "density arithmetic and stability", 0.0, densities},
      {6, "sentiment", 0.0, sentiment},
      {7, "generator against mock endpoint", 10.0, generator},
      {8, "end-to-end determinism", 0.0, end_to_end},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.limit_s == 0.0 || secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    char timing[64];
    if (c.limit_s > 0.0) {
      std::snprintf(timing, sizeof timing, "%.2f s, limit %.0f s", secs, c.limit_s);
    } else {
      std::snprintf(timing, sizeof timing, "%.2f s", secs);
    }
    std::printf("%s  %d  %-34s %s [%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), timing);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
